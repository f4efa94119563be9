// enp-sim: command-line front end for the vehicle-identification simulator.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "enpsim/config.hpp"
#include "enpsim/experiment.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::vector<enpsim::SpeedRange> parse_ranges(const std::vector<std::string>& items)
{
    std::vector<enpsim::SpeedRange> out;
    for (const std::string& item : items) {
        const auto dash = item.find('-');
        if (dash == std::string::npos || dash == 0) {
            throw enpsim::ConfigError("--vs", 0, "expected MIN-MAX in km/h, got '" + item + "'");
        }
        try {
            out.push_back({std::stod(item.substr(0, dash)), std::stod(item.substr(dash + 1))});
        } catch (const std::exception&) {
            throw enpsim::ConfigError("--vs", 0, "expected MIN-MAX in km/h, got '" + item + "'");
        }
    }
    return out;
}

void print_summary(const enpsim::ExperimentResult& r)
{
    enpsim::write_summary_row(std::cout, r);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synchronous-transmission vehicle identification simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool events = false;

    auto* run = app.add_subcommand("run", "Run one experiment and write CSV outputs");
    run->add_option("--config", config_path, "Config file (section.key = value lines)")->required();
    auto* run_seed = run->add_option("--seed", seed, "Override run.master_seed");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_flag("--events", events, "Also write the per-slot event log (events.tsv)");

    std::vector<std::size_t> v_n_list;
    std::vector<std::string> vs_items;
    auto* sw = app.add_subcommand("sweep", "Run one experiment per (v_n, speed range) cell");
    sw->add_option("--config", config_path, "Config file")->required();
    sw->add_option("--vn", v_n_list, "Vehicle counts, comma separated")->required()->delimiter(',');
    sw->add_option("--vs", vs_items, "Speed ranges MIN-MAX km/h, comma separated (default: from config)")
        ->delimiter(',');
    auto* sw_seed = sw->add_option("--seed", seed, "Override run.master_seed");
    sw->add_option("--out", out_dir, "Output directory")->capture_default_str();

    auto* presets = app.add_subcommand("presets", "List presets and their expansions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (presets->parsed()) {
            for (const std::string& name : enpsim::preset_names()) {
                std::cout << "[" << name << "]\n" << enpsim::describe(enpsim::make_preset(name)) << '\n';
            }
            return EXIT_SUCCESS;
        }

        enpsim::SimConfig config = enpsim::load_config(config_path);
        if ((run->parsed() && run_seed->count() > 0) || (sw->parsed() && sw_seed->count() > 0)) {
            config.run.master_seed = seed;
        }

        if (run->parsed()) {
            const auto result = enpsim::run_experiment(config, {.record_events = events});
            enpsim::write_outputs(out_dir, result);
            enpsim::write_summary_header(std::cout);
            print_summary(result);
            if (!result.invariants.clean()) {
                std::cerr << "warning: protocol invariant violations detected\n";
            }
            return EXIT_SUCCESS;
        }

        std::vector<enpsim::SpeedRange> ranges = vs_items.empty()
                                                     ? std::vector<enpsim::SpeedRange>{{config.fleet.v_min_kmh,
                                                                                        config.fleet.v_max_kmh}}
                                                     : parse_ranges(vs_items);
        for (const auto& r : ranges) {
            enpsim::SimConfig probe = config;
            probe.fleet.v_min_kmh = r.min_kmh;
            probe.fleet.v_max_kmh = r.max_kmh;
            enpsim::validate(probe);
        }
        for (std::size_t v_n : v_n_list) {
            enpsim::SimConfig probe = config;
            probe.fleet.v_n = v_n;
            enpsim::validate(probe);
        }

        const auto cells = enpsim::sweep(config, v_n_list, ranges);
        std::filesystem::create_directories(out_dir);
        const auto path = std::filesystem::path(out_dir) / "summary.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << path << '\n';
            return kExitRuntime;
        }
        enpsim::write_summary_header(out);
        enpsim::write_summary_header(std::cout);
        for (const auto& cell : cells) {
            enpsim::write_summary_row(out, cell.result);
            print_summary(cell.result);
        }
        if (!out.flush()) {
            std::cerr << "error: write failed: " << path << '\n';
            return kExitRuntime;
        }
        return EXIT_SUCCESS;
    } catch (const enpsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

#include "enpsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace enpsim {

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message
                                  : field + ": " + message),
      field_(std::move(field)),
      line_(line)
{
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string fmt_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename Int>
bool parse_int(std::string_view s, Int& out)
{
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out)
{
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_bool(std::string_view s, bool& out)
{
    if (s == "true" || s == "1" || s == "yes") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        out = false;
        return true;
    }
    return false;
}

bool parse_double_list(std::string_view s, std::vector<double>& out)
{
    std::vector<double> values;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const std::string_view item = trim(s.substr(0, comma));
        double v = 0.0;
        if (!parse_double(item, v)) {
            return false;
        }
        values.push_back(v);
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
        if (trim(s).empty()) {
            return false;
        }
    }
    if (values.empty()) {
        return false;
    }
    out = std::move(values);
    return true;
}

std::string_view reseed_name(ReseedPolicy p)
{
    switch (p) {
    case ReseedPolicy::fixed:
        return "fixed";
    case ReseedPolicy::per_epoch:
        return "per_epoch";
    case ReseedPolicy::per_round:
        return "per_round";
    }
    return "fixed";
}

std::string_view scope_name(ProbeScope p)
{
    return p == ProbeScope::network ? "network" : "pair";
}

std::string join(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += fmt_double(values[i]);
    }
    return out;
}

/// Setter returns false when the value text does not parse.
using Setter = std::function<bool(SimConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto dbl = [](auto getter) {
            return Setter([getter](SimConfig& c, std::string_view v) { return parse_double(v, getter(c)); });
        };
        auto integer = [](auto getter) {
            return Setter([getter](SimConfig& c, std::string_view v) { return parse_int(v, getter(c)); });
        };
        auto boolean = [](auto getter) {
            return Setter([getter](SimConfig& c, std::string_view v) { return parse_bool(v, getter(c)); });
        };
        auto optional_dbl = [](auto getter) {
            return Setter([getter](SimConfig& c, std::string_view v) {
                if (v == "none") {
                    getter(c).reset();
                    return true;
                }
                double d = 0.0;
                if (!parse_double(v, d)) {
                    return false;
                }
                getter(c) = d;
                return true;
            });
        };

        t["geometry.segment_length_m"] = dbl([](SimConfig& c) -> double& { return c.geometry.segment_length_m; });
        t["geometry.ring_length_m"] = dbl([](SimConfig& c) -> double& { return c.geometry.ring_length_m; });
        t["geometry.road_width_m"] = dbl([](SimConfig& c) -> double& { return c.geometry.road_width_m; });
        t["geometry.vr_pair_xs"] = [](SimConfig& c, std::string_view v) {
            return parse_double_list(v, c.geometry.vr_pair_xs);
        };
        t["geometry.vr_offsets_y"] = [](SimConfig& c, std::string_view v) {
            return parse_double_list(v, c.geometry.vr_offsets_y);
        };

        t["radio.tx_power_dbm"] = dbl([](SimConfig& c) -> double& { return c.radio.tx_power_dbm; });
        t["radio.pl0_db"] = dbl([](SimConfig& c) -> double& { return c.radio.pl0_db; });
        t["radio.exponent"] = dbl([](SimConfig& c) -> double& { return c.radio.exponent; });
        t["radio.sensitivity_dbm"] = dbl([](SimConfig& c) -> double& { return c.radio.sensitivity_dbm; });
        t["radio.capture_threshold_db"] = dbl([](SimConfig& c) -> double& { return c.radio.capture_threshold_db; });
        t["radio.shadowing_sigma_db"] = dbl([](SimConfig& c) -> double& { return c.radio.shadowing_sigma_db; });

        t["hash.hash_id"] = [](SimConfig& c, std::string_view v) {
            const auto id = hash_id_from_name(v);
            if (id) {
                c.hash.hash_id = *id;
            }
            return id.has_value();
        };
        t["hash.seed"] = integer([](SimConfig& c) -> std::uint32_t& { return c.hash.seed; });
        t["hash.slot_count"] = integer([](SimConfig& c) -> std::uint32_t& { return c.hash.slot_count; });
        t["hash.reseed"] = [](SimConfig& c, std::string_view v) {
            for (ReseedPolicy p : {ReseedPolicy::fixed, ReseedPolicy::per_epoch, ReseedPolicy::per_round}) {
                if (v == reseed_name(p)) {
                    c.reseed = p;
                    return true;
                }
            }
            return false;
        };

        t["protocol.probe_scope"] = [](SimConfig& c, std::string_view v) {
            for (ProbeScope p : {ProbeScope::network, ProbeScope::pair}) {
                if (v == scope_name(p)) {
                    c.probe_scope = p;
                    return true;
                }
            }
            return false;
        };

        t["timing.glossy_period_us"] = integer([](SimConfig& c) -> TimeUs& { return c.timing.glossy_period_us; });
        t["timing.sync_window_us"] = integer([](SimConfig& c) -> TimeUs& { return c.timing.sync_window_us; });
        t["timing.probe_len_us"] = integer([](SimConfig& c) -> TimeUs& { return c.timing.probe_len_us; });
        t["timing.slot_len_us"] = integer([](SimConfig& c) -> TimeUs& { return c.timing.slot_len_us; });
        t["timing.sync_jitter_us"] = integer([](SimConfig& c) -> TimeUs& { return c.timing.sync_jitter_us; });

        t["fleet.v_n"] = integer([](SimConfig& c) -> std::size_t& { return c.fleet.v_n; });
        t["fleet.v_min_kmh"] = dbl([](SimConfig& c) -> double& { return c.fleet.v_min_kmh; });
        t["fleet.v_max_kmh"] = dbl([](SimConfig& c) -> double& { return c.fleet.v_max_kmh; });
        t["fleet.two_wheelers"] = integer([](SimConfig& c) -> std::size_t& { return c.fleet.two_wheelers; });
        t["fleet.stationary"] = boolean([](SimConfig& c) -> bool& { return c.fleet.stationary; });
        t["fleet.spawn_road_x_min"] =
            optional_dbl([](SimConfig& c) -> std::optional<double>& { return c.fleet.spawn_road_x_min; });
        t["fleet.spawn_road_x_max"] =
            optional_dbl([](SimConfig& c) -> std::optional<double>& { return c.fleet.spawn_road_x_max; });
        t["fleet.distinct_slots"] = boolean([](SimConfig& c) -> bool& { return c.fleet.distinct_slots; });

        t["run.epochs"] = integer([](SimConfig& c) -> std::uint32_t& { return c.run.epochs; });
        t["run.warmup_epochs"] = integer([](SimConfig& c) -> std::uint32_t& { return c.run.warmup_epochs; });
        t["run.master_seed"] = integer([](SimConfig& c) -> std::uint64_t& { return c.run.master_seed; });
        t["run.replications"] = integer([](SimConfig& c) -> std::uint32_t& { return c.run.replications; });
        return t;
    }();
    return table;
}

using LineMap = std::map<std::string, std::size_t, std::less<>>;

void check(bool ok, std::string_view field, const LineMap& lines, const std::string& message)
{
    if (ok) {
        return;
    }
    const auto it = lines.find(field);
    throw ConfigError(std::string(field), it == lines.end() ? 0 : it->second, message);
}

void validate_with_lines(const SimConfig& c, const LineMap& lines)
{
    const RoadGeometry& g = c.geometry;
    check(g.segment_length_m > 0.0, "geometry.segment_length_m", lines, "must be > 0");
    check(g.ring_length_m > g.segment_length_m, "geometry.ring_length_m", lines, "must exceed segment_length_m");
    check(g.road_width_m >= 2.5, "geometry.road_width_m", lines, "must be >= 2.5");
    check(!g.vr_pair_xs.empty() && g.vr_pair_xs.size() < kNetworkPairId, "geometry.vr_pair_xs", lines,
          "needs between 1 and 65534 pairs");
    for (double x : g.vr_pair_xs) {
        check(x >= 0.0 && x < g.segment_length_m, "geometry.vr_pair_xs", lines,
              "pair positions must lie in [0, segment_length_m)");
    }
    check(g.vr_offsets_y.size() == 2, "geometry.vr_offsets_y", lines, "needs exactly two lateral offsets");

    const RadioParams& r = c.radio;
    check(r.exponent > 0.0, "radio.exponent", lines, "must be > 0");
    check(r.pl0_db >= 0.0, "radio.pl0_db", lines, "must be >= 0");
    check(r.shadowing_sigma_db >= 0.0, "radio.shadowing_sigma_db", lines, "must be >= 0");
    check(r.capture_threshold_db >= 0.0, "radio.capture_threshold_db", lines, "must be >= 0");

    check(c.hash.slot_count >= 1 && c.hash.slot_count <= 255, "hash.slot_count", lines,
          "must be in [1, 255] (8-bit probe field)");

    const TimingParams& t = c.timing;
    check(t.glossy_period_us > 0, "timing.glossy_period_us", lines, "must be > 0");
    check(t.sync_window_us >= 0 && t.sync_window_us < t.glossy_period_us, "timing.sync_window_us", lines,
          "must be in [0, glossy_period_us)");
    check(t.probe_len_us > 0, "timing.probe_len_us", lines, "must be > 0");
    check(t.slot_len_us > 0, "timing.slot_len_us", lines, "must be > 0");
    const std::size_t rounds = rounds_per_epoch(t, c.hash.slot_count);
    check(rounds >= 1, "hash.slot_count", lines, "no probe/reply round fits in the glossy period");
    const TimeUs round_len = t.probe_len_us + static_cast<TimeUs>(c.hash.slot_count) * t.slot_len_us;
    const TimeUs slack = t.glossy_period_us - t.sync_window_us - static_cast<TimeUs>(rounds) * round_len;
    check(t.sync_jitter_us >= 0 && t.sync_jitter_us <= std::min(slack, t.sync_window_us), "timing.sync_jitter_us",
          lines, "must be in [0, min(sync window, idle tail of the epoch)]");

    const FleetParams& f = c.fleet;
    if (!f.stationary) {
        check(f.v_min_kmh > 0.0, "fleet.v_min_kmh", lines, "must be > 0");
        check(f.v_max_kmh >= f.v_min_kmh, "fleet.v_max_kmh", lines, "must be >= v_min_kmh");
    }
    check(f.two_wheelers <= f.v_n, "fleet.two_wheelers", lines, "must not exceed v_n");
    check(!f.distinct_slots || f.v_n <= c.hash.slot_count, "fleet.distinct_slots", lines,
          "needs v_n <= hash.slot_count");
    if (f.spawn_road_x_min && f.spawn_road_x_max) {
        check(*f.spawn_road_x_min < *f.spawn_road_x_max, "fleet.spawn_road_x_max", lines,
              "must exceed spawn_road_x_min");
    }

    check(c.run.epochs >= 1, "run.epochs", lines, "must be >= 1");
    check(c.run.replications >= 1, "run.replications", lines, "must be >= 1");
}

}  // namespace

std::vector<std::string> preset_names()
{
    return {"paper-fig1b", "paper-road", "oracle-collision-free"};
}

SimConfig make_preset(std::string_view name)
{
    SimConfig c;
    c.preset = std::string(name);
    if (name == "paper-fig1b") {
        return c;
    }
    if (name == "paper-road") {
        // One recorder pair on a campus road, 6 two-wheelers and 4 cars.
        c.geometry.vr_pair_xs = {100.0};
        c.hash.slot_count = 17;
        c.fleet.v_n = 10;
        c.fleet.two_wheelers = 6;
        return c;
    }
    if (name == "oracle-collision-free") {
        c.geometry.vr_pair_xs = {100.0};
        c.fleet.v_n = 5;
        c.fleet.stationary = true;
        c.fleet.spawn_road_x_min = 90.0;
        c.fleet.spawn_road_x_max = 110.0;
        c.fleet.distinct_slots = true;
        c.reseed = ReseedPolicy::fixed;
        c.run.epochs = 10;
        c.run.warmup_epochs = 0;
        return c;
    }
    throw ConfigError("preset", 0, "unknown preset '" + std::string(name) + "'");
}

SimConfig parse_config(std::string_view text)
{
    SimConfig config = make_preset("paper-fig1b");
    LineMap lines;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), line_no, "expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "preset") {
            try {
                config = make_preset(value);
            } catch (const ConfigError&) {
                throw ConfigError("preset", line_no, "unknown preset '" + std::string(value) + "'");
            }
            lines.clear();
            continue;
        }
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
            throw ConfigError(std::string(key), line_no, "unknown key");
        }
        if (!it->second(config, value)) {
            throw ConfigError(std::string(key), line_no, "cannot parse value '" + std::string(value) + "'");
        }
        lines[std::string(key)] = line_no;
    }

    validate_with_lines(config, lines);
    return config;
}

SimConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config", 0, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const SimConfig& config)
{
    validate_with_lines(config, {});
}

std::string describe(const SimConfig& c)
{
    std::ostringstream out;
    auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string("none"); };
    out << "geometry.segment_length_m = " << fmt_double(c.geometry.segment_length_m) << '\n'
        << "geometry.ring_length_m = " << fmt_double(c.geometry.ring_length_m) << '\n'
        << "geometry.road_width_m = " << fmt_double(c.geometry.road_width_m) << '\n'
        << "geometry.vr_pair_xs = " << join(c.geometry.vr_pair_xs) << '\n'
        << "geometry.vr_offsets_y = " << join(c.geometry.vr_offsets_y) << '\n'
        << "radio.tx_power_dbm = " << fmt_double(c.radio.tx_power_dbm) << '\n'
        << "radio.pl0_db = " << fmt_double(c.radio.pl0_db) << '\n'
        << "radio.exponent = " << fmt_double(c.radio.exponent) << '\n'
        << "radio.sensitivity_dbm = " << fmt_double(c.radio.sensitivity_dbm) << '\n'
        << "radio.capture_threshold_db = " << fmt_double(c.radio.capture_threshold_db) << '\n'
        << "radio.shadowing_sigma_db = " << fmt_double(c.radio.shadowing_sigma_db) << '\n'
        << "hash.hash_id = " << hash_id_name(c.hash.hash_id) << '\n'
        << "hash.seed = " << c.hash.seed << '\n'
        << "hash.slot_count = " << c.hash.slot_count << '\n'
        << "hash.reseed = " << reseed_name(c.reseed) << '\n'
        << "protocol.probe_scope = " << scope_name(c.probe_scope) << '\n'
        << "timing.glossy_period_us = " << c.timing.glossy_period_us << '\n'
        << "timing.sync_window_us = " << c.timing.sync_window_us << '\n'
        << "timing.probe_len_us = " << c.timing.probe_len_us << '\n'
        << "timing.slot_len_us = " << c.timing.slot_len_us << '\n'
        << "timing.sync_jitter_us = " << c.timing.sync_jitter_us << '\n'
        << "fleet.v_n = " << c.fleet.v_n << '\n'
        << "fleet.v_min_kmh = " << fmt_double(c.fleet.v_min_kmh) << '\n'
        << "fleet.v_max_kmh = " << fmt_double(c.fleet.v_max_kmh) << '\n'
        << "fleet.two_wheelers = " << c.fleet.two_wheelers << '\n'
        << "fleet.stationary = " << (c.fleet.stationary ? "true" : "false") << '\n'
        << "fleet.spawn_road_x_min = " << opt(c.fleet.spawn_road_x_min) << '\n'
        << "fleet.spawn_road_x_max = " << opt(c.fleet.spawn_road_x_max) << '\n'
        << "fleet.distinct_slots = " << (c.fleet.distinct_slots ? "true" : "false") << '\n'
        << "run.epochs = " << c.run.epochs << '\n'
        << "run.warmup_epochs = " << c.run.warmup_epochs << '\n'
        << "run.master_seed = " << c.run.master_seed << '\n'
        << "run.replications = " << c.run.replications << '\n';
    return out.str();
}

}  // namespace enpsim

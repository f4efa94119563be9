#include "enpsim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace enpsim {

void InvariantTally::merge(const InvariantTally& o)
{
    iterations += o.iterations;
    phantom_records += o.phantom_records;
    outside_ground_truth += o.outside_ground_truth;
    union_dominance += o.union_dominance;
    duplicate_records += o.duplicate_records;
    multi_reply += o.multi_reply;
    off_schedule += o.off_schedule;
    malformed += o.malformed;
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void check_epoch(const EpochResult& epoch, const std::vector<VrnSet>& gt, bool shadowing_off,
                 const RoadGeometry& geometry, InvariantTally& tally)
{
    std::set<std::tuple<Vrn, std::uint32_t, std::uint32_t>> sent;
    std::set<std::pair<std::size_t, std::uint32_t>> per_round;
    for (const ReplyTx& r : epoch.replies) {
        sent.emplace(r.vrn, r.round, r.slot);
        if (!per_round.emplace(r.vehicle, r.round).second) {
            ++tally.multi_reply;
        }
        if (r.round >= epoch.schedule.round_count() ||
            epoch.schedule.rounds[r.round].slot_start_us.at(r.slot) != r.tx_time_us) {
            ++tally.off_schedule;
        }
    }
    for (std::size_t vr = 0; vr < epoch.records.size(); ++vr) {
        const auto& recs = epoch.records[vr];
        const VrnSet& pair_gt = gt[vr / geometry.vr_offsets_y.size()];
        if (vrns_of(recs).size() != recs.size()) {
            ++tally.duplicate_records;
        }
        for (const RecordEntry& e : recs) {
            if (!sent.contains({e.vrn, e.round, e.slot})) {
                ++tally.phantom_records;
            }
            if (shadowing_off && !std::binary_search(pair_gt.begin(), pair_gt.end(), e.vrn)) {
                ++tally.outside_ground_truth;
            }
        }
    }
    tally.malformed += epoch.malformed;
}

ExperimentResult run_replication(const SimConfig& config, std::uint32_t replication, const RunOptions& options)
{
    ExperimentResult out;
    Rng rng(derive_seed(config.run.master_seed, replication));
    Fleet fleet = spawn_fleet(config.fleet, config.geometry, config.hash, rng);
    World world = make_world(config.geometry, config.radio, config.hash, config.timing, std::move(fleet));
    world.reseed = config.reseed;
    world.probe_scope = config.probe_scope;

    const std::size_t sides = config.geometry.vr_offsets_y.size();
    const bool shadowing_off = config.radio.shadowing_sigma_db == 0.0;
    std::vector<Event> events;

    const std::uint32_t total = config.run.warmup_epochs + config.run.epochs;
    for (std::uint32_t e = 0; e < total; ++e) {
        const bool measured = e >= config.run.warmup_epochs;
        events.clear();
        const EpochResult epoch =
            run_epoch(world, e, rng, measured && options.record_events ? &events : nullptr);
        if (!measured) {
            continue;
        }
        for (const Event& ev : events) {
            out.events.push_back(format_event(ev));
        }

        const std::vector<VrnSet> gt =
            ground_truth_by_pair(epoch.fleet_at_start, epoch.schedule, config.geometry, config.radio);
        check_epoch(epoch, gt, shadowing_off, config.geometry, out.invariants);

        for (std::size_t p = 0; p < config.geometry.pair_count(); ++p) {
            const VrnSet r1 = vrns_of(epoch.records[p * sides]);
            const VrnSet r2 = vrns_of(epoch.records[p * sides + 1]);
            const IterationStats s = iteration_accuracy(r1, r2, gt[p], static_cast<std::uint32_t>(p), e);
            ++out.invariants.iterations;
            if (s.union_count < std::max(s.detected_1, s.detected_2) ||
                s.acc_union < std::max(s.acc_1, s.acc_2)) {
                ++out.invariants.union_dominance;
            }
            out.iterations.push_back(IterationRow{replication, s});
        }
    }
    return out;
}

void finalize(ExperimentResult& result, const SimConfig& config)
{
    std::stable_sort(result.iterations.begin(), result.iterations.end(),
                     [](const IterationRow& a, const IterationRow& b) {
                         return std::tie(a.replication, a.stats.pair_id, a.stats.epoch) <
                                std::tie(b.replication, b.stats.pair_id, b.stats.epoch);
                     });
    AccuracyAccumulator all;
    std::vector<AccuracyAccumulator> pairs(config.geometry.pair_count());
    for (const IterationRow& row : result.iterations) {
        all.add(row.stats);
        pairs.at(row.stats.pair_id).add(row.stats);
    }
    result.summary = all.summary();
    result.by_pair.clear();
    for (const auto& acc : pairs) {
        result.by_pair.push_back(acc.summary());
    }
}

std::string acc_field(const IterationStats& s, double v)
{
    return s.included ? format_double(v) : std::string("NA");
}

}  // namespace

ExperimentResult run_experiment(const SimConfig& config, const RunOptions& options)
{
    validate(config);
    ExperimentResult result;
    result.slot_count = config.hash.slot_count;
    result.v_n = config.fleet.v_n;
    result.v_min_kmh = config.fleet.v_min_kmh;
    result.v_max_kmh = config.fleet.v_max_kmh;

    for (std::uint32_t r = 0; r < config.run.replications; ++r) {
        ExperimentResult part = run_replication(config, r, options);
        result.iterations.insert(result.iterations.end(), part.iterations.begin(), part.iterations.end());
        result.events.insert(result.events.end(), part.events.begin(), part.events.end());
        result.invariants.merge(part.invariants);
    }
    finalize(result, config);
    return result;
}

std::vector<SweepCell> sweep(const SimConfig& config, const std::vector<std::size_t>& v_n_list,
                             const std::vector<SpeedRange>& ranges)
{
    if (v_n_list.empty() || ranges.empty()) {
        throw std::invalid_argument("sweep needs at least one v_n and one speed range");
    }
    std::vector<SweepCell> cells;
    std::uint64_t index = 0;
    for (std::size_t v_n : v_n_list) {
        for (const SpeedRange& range : ranges) {
            SimConfig cell = config;
            cell.fleet.v_n = v_n;
            cell.fleet.v_min_kmh = range.min_kmh;
            cell.fleet.v_max_kmh = range.max_kmh;
            cell.run.master_seed = derive_seed(config.run.master_seed, index++);
            cells.push_back(SweepCell{v_n, range, run_experiment(cell)});
        }
    }
    return cells;
}

void write_iterations_csv(std::ostream& out, const ExperimentResult& result)
{
    out << "replication,pair_id,epoch,gt_count,det1,det2,det_union,acc1,acc2,acc_union\n";
    for (const IterationRow& row : result.iterations) {
        const IterationStats& s = row.stats;
        out << row.replication << ',' << s.pair_id << ',' << s.epoch << ',' << s.gt_count << ',' << s.detected_1
            << ',' << s.detected_2 << ',' << s.union_count << ',' << acc_field(s, s.acc_1) << ','
            << acc_field(s, s.acc_2) << ',' << acc_field(s, s.acc_union) << '\n';
    }
}

void write_summary_header(std::ostream& out)
{
    out << "v_n,v_s_min,v_s_max,s_slots,iterations,mean_acc_union,std_acc_union,mean_acc_single\n";
}

void write_summary_row(std::ostream& out, const ExperimentResult& result)
{
    out << result.v_n << ',' << format_double(result.v_min_kmh) << ',' << format_double(result.v_max_kmh) << ','
        << result.slot_count << ',';
    if (const auto& s = result.summary) {
        out << s->count << ',' << format_double(s->mean_acc_union) << ',' << format_double(s->std_acc_union) << ','
            << format_double(s->mean_acc_single) << '\n';
    } else {
        out << "0,NA,NA,NA\n";
    }
}

void write_pair_summary_csv(std::ostream& out, const ExperimentResult& result)
{
    out << "pair_id,iterations,mean_acc_union,std_acc_union,min_acc_union,mean_acc1,mean_acc2\n";
    for (std::size_t p = 0; p < result.by_pair.size(); ++p) {
        out << p << ',';
        if (const auto& s = result.by_pair[p]) {
            out << s->count << ',' << format_double(s->mean_acc_union) << ',' << format_double(s->std_acc_union)
                << ',' << format_double(s->min_acc_union) << ',' << format_double(s->mean_acc_1) << ','
                << format_double(s->mean_acc_2) << '\n';
        } else {
            out << "0,NA,NA,NA,NA,NA\n";
        }
    }
}

void write_events(std::ostream& out, const ExperimentResult& result)
{
    out << "time_us\tevent\tnode_id\tpair_id\tepoch\tround\tslot\tvrn\n";
    for (const std::string& line : result.events) {
        out << line << '\n';
    }
}

namespace {

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    fn(out);
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const ExperimentResult& result)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "iterations.csv", [&](std::ostream& o) { write_iterations_csv(o, result); });
    write_file(dir / "summary.csv", [&](std::ostream& o) {
        write_summary_header(o);
        write_summary_row(o, result);
    });
    write_file(dir / "summary_by_pair.csv", [&](std::ostream& o) { write_pair_summary_csv(o, result); });
    if (!result.events.empty()) {
        write_file(dir / "events.tsv", [&](std::ostream& o) { write_events(o, result); });
    }
}

}  // namespace enpsim

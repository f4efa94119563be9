#include "enpsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace enpsim {

VrnSet make_vrn_set(std::vector<Vrn> vrns)
{
    std::sort(vrns.begin(), vrns.end());
    vrns.erase(std::unique(vrns.begin(), vrns.end()), vrns.end());
    return vrns;
}

VrnSet vrns_of(std::span<const RecordEntry> records)
{
    std::vector<Vrn> out;
    out.reserve(records.size());
    for (const RecordEntry& e : records) {
        out.push_back(e.vrn);
    }
    return make_vrn_set(std::move(out));
}

namespace {

std::vector<TimeUs> sample_times(const EpochSchedule& schedule)
{
    std::vector<TimeUs> times;
    for (const RoundSchedule& rs : schedule.rounds) {
        times.push_back(rs.probe_tx_time_us);
        times.insert(times.end(), rs.slot_start_us.begin(), rs.slot_start_us.end());
    }
    return times;
}

}  // namespace

std::vector<VrnSet> ground_truth_by_pair(const Fleet& fleet_at_start, const EpochSchedule& schedule,
                                         const RoadGeometry& geometry, const RadioParams& radio)
{
    const std::size_t pairs = geometry.pair_count();
    const std::size_t sides = geometry.vr_offsets_y.size();
    std::vector<std::vector<Vrn>> members(pairs);
    const std::vector<TimeUs> times = sample_times(schedule);
    const double range = comm_range_m(radio);
    const TimeUs t0 = schedule.epoch_start_us;

    std::vector<bool> hit(pairs);
    for (const Vehicle& start : fleet_at_start) {
        std::fill(hit.begin(), hit.end(), false);
        std::size_t remaining = pairs;
        for (TimeUs t : times) {
            const Vehicle v = advance(start, static_cast<double>(t - t0) * 1e-6, geometry.ring_length_m);
            for (std::size_t p = 0; p < pairs; ++p) {
                if (hit[p]) {
                    continue;
                }
                for (std::size_t side = 0; side < sides; ++side) {
                    if (distance_to_vr(v, geometry.vr_position(p * sides + side), geometry) <= range) {
                        hit[p] = true;
                        --remaining;
                        break;
                    }
                }
            }
            if (remaining == 0) {
                break;
            }
        }
        for (std::size_t p = 0; p < pairs; ++p) {
            if (hit[p]) {
                members[p].push_back(start.vrn);
            }
        }
    }

    std::vector<VrnSet> out;
    out.reserve(pairs);
    for (auto& m : members) {
        out.push_back(make_vrn_set(std::move(m)));
    }
    return out;
}

VrnSet ground_truth(std::span<const Point> recorders, const Fleet& fleet_at_start, const EpochSchedule& schedule,
                    const RoadGeometry& geometry, const RadioParams& radio)
{
    const std::vector<TimeUs> times = sample_times(schedule);
    const double range = comm_range_m(radio);
    const TimeUs t0 = schedule.epoch_start_us;

    std::vector<Vrn> members;
    for (const Vehicle& start : fleet_at_start) {
        const bool inside = std::any_of(times.begin(), times.end(), [&](TimeUs t) {
            const Vehicle v = advance(start, static_cast<double>(t - t0) * 1e-6, geometry.ring_length_m);
            return std::any_of(recorders.begin(), recorders.end(),
                               [&](Point vr) { return distance_to_vr(v, vr, geometry) <= range; });
        });
        if (inside) {
            members.push_back(start.vrn);
        }
    }
    return make_vrn_set(std::move(members));
}

IterationStats iteration_accuracy(const VrnSet& records_1, const VrnSet& records_2, const VrnSet& gt,
                                  std::uint32_t pair_id, std::uint32_t epoch)
{
    IterationStats s;
    s.pair_id = pair_id;
    s.epoch = epoch;
    s.gt_count = gt.size();
    s.detected_1 = records_1.size();
    s.detected_2 = records_2.size();

    VrnSet both;
    std::set_union(records_1.begin(), records_1.end(), records_2.begin(), records_2.end(), std::back_inserter(both));
    s.union_count = both.size();

    if (gt.empty()) {
        return s;
    }
    const auto hits = [&gt](const VrnSet& recorded) {
        VrnSet common;
        std::set_intersection(recorded.begin(), recorded.end(), gt.begin(), gt.end(), std::back_inserter(common));
        return static_cast<double>(common.size());
    };
    const double n = static_cast<double>(gt.size());
    s.acc_1 = hits(records_1) / n;
    s.acc_2 = hits(records_2) / n;
    s.acc_union = hits(both) / n;
    s.included = true;
    return s;
}

void AccuracyAccumulator::Moments::add(double x)
{
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
    min = std::min(min, x);
}

void AccuracyAccumulator::Moments::merge(const Moments& o)
{
    if (o.n == 0) {
        return;
    }
    if (n == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double total = na + nb;
    const double delta = o.mean - mean;
    mean = (na * mean + nb * o.mean) / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    n += o.n;
    min = std::min(min, o.min);
}

double AccuracyAccumulator::Moments::sample_std() const
{
    return n > 1 ? std::sqrt(std::max(m2, 0.0) / static_cast<double>(n - 1)) : 0.0;
}

void AccuracyAccumulator::add(const IterationStats& stats)
{
    if (!stats.included) {
        return;
    }
    union_.add(stats.acc_union);
    vr1_.add(stats.acc_1);
    vr2_.add(stats.acc_2);
    single_.add(stats.acc_1);
    single_.add(stats.acc_2);
}

void AccuracyAccumulator::merge(const AccuracyAccumulator& other)
{
    union_.merge(other.union_);
    vr1_.merge(other.vr1_);
    vr2_.merge(other.vr2_);
    single_.merge(other.single_);
}

std::optional<AccuracySummary> AccuracyAccumulator::summary() const
{
    if (union_.n == 0) {
        return std::nullopt;
    }
    AccuracySummary s;
    s.count = union_.n;
    s.mean_acc_union = union_.mean;
    s.std_acc_union = union_.sample_std();
    s.min_acc_union = union_.min;
    s.mean_acc_1 = vr1_.mean;
    s.mean_acc_2 = vr2_.mean;
    s.mean_acc_single = single_.mean;
    s.std_acc_single = single_.sample_std();
    s.min_acc_single = single_.min;
    return s;
}

std::optional<AccuracySummary> aggregate(std::span<const IterationStats> stats)
{
    AccuracyAccumulator acc;
    for (const IterationStats& s : stats) {
        acc.add(s);
    }
    return acc.summary();
}

}  // namespace enpsim

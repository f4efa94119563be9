#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "enpsim/metrics.hpp"

using namespace enpsim;

namespace {

RoadGeometry one_pair_at(double x)
{
    RoadGeometry g;
    g.vr_pair_xs = {x};
    return g;
}

std::vector<Point> recorders(const RoadGeometry& g, std::size_t pair)
{
    return {g.vr_position(2 * pair), g.vr_position(2 * pair + 1)};
}

// Dense containment oracle: 10 us steps from the first to the last
// scheduled sample instant.
bool inside_dense(const Vehicle& start, const EpochSchedule& s, const RoadGeometry& g, const RadioParams& radio)
{
    const double range = comm_range_m(radio);
    const TimeUs first = s.rounds.front().probe_tx_time_us;
    const TimeUs last = s.rounds.back().slot_start_us.back();
    for (TimeUs t = first; t <= last; t += 10) {
        const Vehicle v = advance(start, static_cast<double>(t - s.epoch_start_us) * 1e-6, g.ring_length_m);
        for (std::size_t side = 0; side < 2; ++side) {
            if (distance_to_vr(v, g.vr_position(side), g) <= range) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("ground truth examples")
{
    const RoadGeometry g = one_pair_at(100.0);
    const RadioParams radio;
    const EpochSchedule s = build_epoch_schedule(TimingParams{}, 71, 0);
    const double off = g.segment_offset_m();

    const Fleet fleet{
        Vehicle{1, 100.0 + off, 3.0, 0.0},   // 5 m from VR0
        Vehicle{2, 0.0, 3.0, 0.0},           // road x = -100, ~200 m away
        Vehicle{3, 280.0 + off, 3.0, 0.0},   // return half, 180 m past the pair
    };
    const VrnSet gt = ground_truth(recorders(g, 0), fleet, s, g, radio);
    CHECK(gt == VrnSet{1});
    CHECK(ground_truth_by_pair(fleet, s, g, radio).at(0) == gt);
}

TEST_CASE("ground truth of boundary-crossing vehicles matches a dense-sampling oracle")
{
    const RoadGeometry g = one_pair_at(100.0);
    const RadioParams radio;
    const EpochSchedule s = build_epoch_schedule(TimingParams{}, 71, 0);
    const double off = g.segment_offset_m();
    // Entry boundary for y = 3 against VR0 at (100, -2).
    const double boundary = 100.0 - std::sqrt(std::pow(comm_range_m(radio), 2) - 25.0);

    Rng rng(31);
    int inside = 0;
    int outside = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double speed = rng.uniform(30.0, 90.0) / 3.6;
        // Start up to one epoch of travel before the boundary.
        const double start_x = boundary - rng.uniform(0.0, speed * 0.6);
        const Vehicle v{static_cast<Vrn>(trial + 1), start_x + off, 3.0, speed};
        const bool dense = inside_dense(v, s, g, radio);
        const VrnSet gt = ground_truth(recorders(g, 0), {v}, s, g, radio);
        CHECK(dense == !gt.empty());
        (dense ? inside : outside) += 1;
    }
    // Both outcomes must actually be exercised.
    CHECK(inside > 20);
    CHECK(outside > 20);

    // Hand-built crossing at 25 m/s: 5 m short of the boundary at the epoch
    // start, so it crosses at t = 200 ms, mid-epoch.
    const Vehicle crossing{7, boundary - 5.0 + off, 3.0, 25.0};
    CHECK(inside_dense(crossing, s, g, radio));
    CHECK(ground_truth(recorders(g, 0), {crossing}, s, g, radio) == VrnSet{7});
    // Crossing only after the last slot start (t > 452 ms) is outside.
    const Vehicle late{8, boundary - 25.0 * 0.47 + off, 3.0, 25.0};
    CHECK_FALSE(inside_dense(late, s, g, radio));
    CHECK(ground_truth(recorders(g, 0), {late}, s, g, radio).empty());
}

TEST_CASE("iteration accuracy examples")
{
    const VrnSet gt{1, 2, 3, 4};
    const IterationStats full = iteration_accuracy(gt, gt, gt);
    CHECK(full.acc_union == 1.0);
    CHECK(full.included);

    const IterationStats partial = iteration_accuracy({1, 2}, {2, 3}, gt);
    CHECK(partial.union_count == 3);
    CHECK(partial.acc_union == 0.75);
    CHECK(partial.acc_1 == 0.5);

    const IterationStats split = iteration_accuracy({1}, {2}, {1, 2});
    CHECK(split.acc_1 == 0.5);
    CHECK(split.acc_2 == 0.5);
    CHECK(split.acc_union == 1.0);

    const IterationStats empty = iteration_accuracy({}, {}, {});
    CHECK_FALSE(empty.included);
    CHECK(empty.gt_count == 0);
}

TEST_CASE("union dominance and swap invariance over random sets")
{
    Rng rng(12);
    auto random_set = [&rng](int universe) {
        std::vector<Vrn> v;
        for (int i = 0; i < universe; ++i) {
            if (rng.uniform() < 0.5) {
                v.push_back(static_cast<Vrn>(i));
            }
        }
        return make_vrn_set(v);
    };
    for (int trial = 0; trial < 5000; ++trial) {
        const VrnSet a = random_set(30);
        const VrnSet b = random_set(30);
        const VrnSet gt = random_set(30);
        const IterationStats s = iteration_accuracy(a, b, gt);
        const IterationStats swapped = iteration_accuracy(b, a, gt);
        CHECK(s.union_count >= std::max(s.detected_1, s.detected_2));
        CHECK(s.acc_union >= std::max(s.acc_1, s.acc_2));
        CHECK(s.acc_union <= 1.0);
        CHECK(s.acc_union == swapped.acc_union);
    }
}

TEST_CASE("aggregate examples")
{
    IterationStats one = iteration_accuracy({1}, {1}, {1});
    const auto single = aggregate(std::vector<IterationStats>{one});
    REQUIRE(single.has_value());
    CHECK(single->mean_acc_union == 1.0);
    CHECK(single->std_acc_union == 0.0);
    CHECK(single->count == 1);

    IterationStats half = iteration_accuracy({1}, {}, {1, 2});
    const auto two = aggregate(std::vector<IterationStats>{one, half});
    REQUIRE(two.has_value());
    CHECK(two->mean_acc_union == 0.75);
    CHECK(two->min_acc_union == 0.5);
    CHECK(two->mean_acc_2 == 0.5);

    const auto excluded = aggregate(std::vector<IterationStats>{iteration_accuracy({}, {}, {})});
    CHECK_FALSE(excluded.has_value());
    CHECK_FALSE(aggregate(std::vector<IterationStats>{}).has_value());
}

TEST_CASE("aggregation of shards equals aggregation of the concatenation")
{
    Rng rng(9);
    std::vector<IterationStats> all;
    for (int i = 0; i < 3000; ++i) {
        IterationStats s;
        s.included = rng.uniform() < 0.95;
        s.acc_1 = rng.uniform();
        s.acc_2 = rng.uniform();
        s.acc_union = std::max(s.acc_1, s.acc_2);
        all.push_back(s);
    }
    AccuracyAccumulator a;
    AccuracyAccumulator b;
    AccuracyAccumulator c;
    for (std::size_t i = 0; i < all.size(); ++i) {
        (i < 1000 ? a : i < 2200 ? b : c).add(all[i]);
    }
    a.merge(b);
    a.merge(c);
    const auto whole = aggregate(all);
    const auto merged = a.summary();
    REQUIRE(whole);
    REQUIRE(merged);
    CHECK(whole->count == merged->count);
    CHECK(std::abs(whole->mean_acc_union - merged->mean_acc_union) <= 1e-12);
    CHECK(std::abs(whole->mean_acc_single - merged->mean_acc_single) <= 1e-12);
    CHECK(std::abs(whole->std_acc_union - merged->std_acc_union) <= 1e-12);
    CHECK(whole->min_acc_union == merged->min_acc_union);
}

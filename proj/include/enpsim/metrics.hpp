#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "enpsim/mobility.hpp"
#include "enpsim/protocol_engine.hpp"
#include "enpsim/radio_channel.hpp"
#include "enpsim/types.hpp"

namespace enpsim {

/// Sorted, duplicate-free list of VRNs.
using VrnSet = std::vector<Vrn>;

VrnSet make_vrn_set(std::vector<Vrn> vrns);
VrnSet vrns_of(std::span<const RecordEntry> records);

/// Vehicles within nominal range of at least one of `recorders` at the
/// start of at least one probe or slot of the epoch.
VrnSet ground_truth(std::span<const Point> recorders, const Fleet& fleet_at_start, const EpochSchedule& schedule,
                    const RoadGeometry& geometry, const RadioParams& radio);

/// Ground truth for every pair of the geometry in one pass.
std::vector<VrnSet> ground_truth_by_pair(const Fleet& fleet_at_start, const EpochSchedule& schedule,
                                         const RoadGeometry& geometry, const RadioParams& radio);

struct IterationStats {
    std::uint32_t pair_id = 0;
    std::uint32_t epoch = 0;
    std::size_t gt_count = 0;
    std::size_t detected_1 = 0;
    std::size_t detected_2 = 0;
    std::size_t union_count = 0;
    double acc_1 = 0.0;
    double acc_2 = 0.0;
    double acc_union = 0.0;
    /// False when GT is empty; such iterations stay out of every mean.
    bool included = false;
};

IterationStats iteration_accuracy(const VrnSet& records_1, const VrnSet& records_2, const VrnSet& gt,
                                  std::uint32_t pair_id = 0, std::uint32_t epoch = 0);

struct AccuracySummary {
    std::size_t count = 0;
    double mean_acc_union = 0.0;
    double std_acc_union = 0.0;  ///< sample std-dev, 0 for a single iteration
    double min_acc_union = 0.0;
    double mean_acc_1 = 0.0;
    double mean_acc_2 = 0.0;
    double mean_acc_single = 0.0;  ///< both recorders pooled
    double std_acc_single = 0.0;
    double min_acc_single = 0.0;
};

/// Streaming mean/variance over included iterations. Mergeable, so shards
/// aggregate to the same result as the concatenated list.
class AccuracyAccumulator {
public:
    void add(const IterationStats& stats);
    void merge(const AccuracyAccumulator& other);
    std::size_t count() const { return union_.n; }
    /// Absent when no iteration was included.
    std::optional<AccuracySummary> summary() const;

private:
    struct Moments {
        std::size_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
        double min = 1.0;

        void add(double x);
        void merge(const Moments& o);
        double sample_std() const;
    };

    Moments union_;
    Moments vr1_;
    Moments vr2_;
    Moments single_;
};

std::optional<AccuracySummary> aggregate(std::span<const IterationStats> stats);

}  // namespace enpsim

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "enpsim/config.hpp"
#include "enpsim/metrics.hpp"

namespace enpsim {

struct IterationRow {
    std::uint32_t replication = 0;
    IterationStats stats;
};

/// Violations of the exact per-iteration properties, tallied while running.
struct InvariantTally {
    std::uint64_t iterations = 0;
    std::uint64_t phantom_records = 0;    ///< record without a matching reply
    std::uint64_t outside_ground_truth = 0; ///< only counted with shadowing off
    std::uint64_t union_dominance = 0;
    std::uint64_t duplicate_records = 0;
    std::uint64_t multi_reply = 0;        ///< >1 reply by one ENP in one round
    std::uint64_t off_schedule = 0;       ///< reply not on a slot start
    std::uint64_t malformed = 0;

    bool clean() const
    {
        return phantom_records == 0 && outside_ground_truth == 0 && union_dominance == 0 && duplicate_records == 0 &&
               multi_reply == 0 && off_schedule == 0;
    }
    void merge(const InvariantTally& o);
};

struct ExperimentResult {
    std::uint32_t slot_count = 0;
    std::size_t v_n = 0;
    double v_min_kmh = 0.0;
    double v_max_kmh = 0.0;
    std::vector<IterationRow> iterations;  ///< sorted by replication, pair, epoch
    std::optional<AccuracySummary> summary;               ///< all pairs pooled
    std::vector<std::optional<AccuracySummary>> by_pair;  ///< index == pair_id
    std::vector<std::string> events;                      ///< filled when requested
    InvariantTally invariants;
};

struct RunOptions {
    bool record_events = false;
};

/// Warm-up epochs then measured epochs, per replication. Replication r
/// draws from a stream derived from (master_seed, r).
ExperimentResult run_experiment(const SimConfig& config, const RunOptions& options = {});

struct SpeedRange {
    double min_kmh = 30.0;
    double max_kmh = 90.0;
};

struct SweepCell {
    std::size_t v_n = 0;
    SpeedRange speeds;
    ExperimentResult result;
};

/// One experiment per (v_n, speed range) cell, each seeded from
/// (master_seed, cell index). Cells follow v_n_list-major order.
std::vector<SweepCell> sweep(const SimConfig& config, const std::vector<std::size_t>& v_n_list,
                             const std::vector<SpeedRange>& ranges);

void write_iterations_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const ExperimentResult& result);
void write_pair_summary_csv(std::ostream& out, const ExperimentResult& result);
void write_events(std::ostream& out, const ExperimentResult& result);

/// Writes iterations.csv, summary.csv, summary_by_pair.csv and, when events
/// were recorded, events.tsv. Throws std::runtime_error on I/O failure.
void write_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace enpsim

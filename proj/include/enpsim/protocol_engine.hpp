#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enpsim/mobility.hpp"
#include "enpsim/radio_channel.hpp"
#include "enpsim/rng.hpp"
#include "enpsim/slot_hash.hpp"
#include "enpsim/types.hpp"

namespace enpsim {

// ---------------------------------------------------------------------------
// Frames. Big-endian on the wire:
//   probe = [0x01, pair_id:2, epoch:4, round:1, S:1, hash_id:1, seed:4]  (14 B)
//   reply = [0x02, vrn:8, slot:1]                                        (10 B)
// ---------------------------------------------------------------------------

struct ProbeFrame {
    static constexpr std::size_t kSize = 14;

    std::uint16_t pair_id = 0;
    std::uint32_t epoch = 0;
    std::uint8_t round = 0;
    std::uint8_t slot_count = 0;
    std::uint8_t hash_id = 0;
    std::uint32_t seed = 0;

    HashParams hash_params() const;
    std::vector<std::uint8_t> encode() const;
    static std::optional<ProbeFrame> decode(std::span<const std::uint8_t> bytes);

    friend bool operator==(const ProbeFrame&, const ProbeFrame&) = default;
};

struct ReplyFrame {
    static constexpr std::size_t kSize = 10;

    Vrn vrn = 0;
    std::uint8_t slot = 0;

    std::vector<std::uint8_t> encode() const;
    static std::optional<ReplyFrame> decode(std::span<const std::uint8_t> bytes);

    friend bool operator==(const ReplyFrame&, const ReplyFrame&) = default;
};

Frame make_frame(const ProbeFrame& probe);
Frame make_frame(const ReplyFrame& reply);

// ---------------------------------------------------------------------------
// Epoch schedule: sync window, then back-to-back rounds of one probe and S
// reply slots. Every pair runs the same schedule.
// ---------------------------------------------------------------------------

struct TimingParams {
    TimeUs glossy_period_us = 512'000;
    TimeUs sync_window_us = 20'000;
    TimeUs probe_len_us = 2'000;
    TimeUs slot_len_us = 2'000;
    /// Half-width of a per-epoch uniform clock offset applied to the whole
    /// schedule after sync. Zero disables the draw.
    TimeUs sync_jitter_us = 0;
};

struct RoundSchedule {
    TimeUs probe_tx_time_us = 0;
    std::vector<TimeUs> slot_start_us;
};

struct EpochSchedule {
    std::uint32_t epoch = 0;
    TimeUs epoch_start_us = 0;
    TimeUs sync_window_us = 0;
    std::vector<RoundSchedule> rounds;

    std::size_t round_count() const { return rounds.size(); }
    std::size_t slot_count() const { return rounds.empty() ? 0 : rounds.front().slot_start_us.size(); }
    TimeUs round_length_us() const;
};

/// Rounds that fit: floor((period - sync) / (probe + S * slot)).
std::size_t rounds_per_epoch(const TimingParams& timing, std::uint32_t slot_count);

/// Throws std::invalid_argument on non-positive durations, S == 0, or when
/// no round fits in the period.
EpochSchedule build_epoch_schedule(const TimingParams& timing, std::uint32_t slot_count, std::uint32_t epoch_index);

// ---------------------------------------------------------------------------
// Node state machines.
// ---------------------------------------------------------------------------

struct PlannedReply {
    std::uint32_t slot = 0;
    TimeUs tx_time_us = 0;
};

struct EnpState {
    Vrn vrn = 0;
    std::optional<ProbeFrame> last_probe;
};

/// Stores the probe and plans this round's reply. No reply when the probe
/// names an unknown hash, an out-of-range round, or a slot count that
/// disagrees with the schedule.
std::optional<PlannedReply> enp_on_probe(EnpState& enp, const ProbeFrame& probe, const EpochSchedule& schedule);

struct VrState {
    std::uint32_t vr_id = 0;
    std::uint16_t pair_id = 0;
    Point position;
    std::map<Vrn, RecordEntry> records;  ///< this epoch only, one entry per VRN
    std::uint64_t malformed = 0;         ///< probes or garbage decoded in reply slots

    void begin_epoch() { records.clear(); }
};

/// Returns true when a new VRN was recorded.
bool vr_on_slot_outcome(VrState& vr, const ReceptionOutcome& outcome, std::uint32_t epoch, std::uint32_t round,
                        std::uint32_t slot);

// ---------------------------------------------------------------------------
// Epoch loop.
// ---------------------------------------------------------------------------

enum class EventKind : std::uint8_t {
    probe,
    reply,
    rx,
    coll,
};

struct Event {
    TimeUs time_us = 0;
    EventKind kind = EventKind::probe;
    std::uint32_t node_id = 0;
    std::uint16_t pair_id = 0;
    std::uint32_t epoch = 0;
    std::uint32_t round = 0;
    std::optional<std::uint32_t> slot;
    std::optional<Vrn> vrn;
};

/// ENP node ids start here; recorders use 0 .. vr_count-1.
inline constexpr std::uint32_t kEnpNodeBase = 1000;

/// Tab-separated: time_us, event, node_id, pair_id, epoch, round, slot, vrn
/// (missing fields are "-").
std::string format_event(const Event& e);

enum class ReseedPolicy : std::uint8_t {
    fixed,
    per_epoch,
    per_round,
};

/// Seed announced in the probe for (epoch, round) under the policy.
std::uint32_t probe_seed(std::uint32_t base_seed, ReseedPolicy policy, std::uint32_t epoch, std::uint32_t round);

/// What the probe's pair_id field carries. `pair` gives each pair its own
/// probe, so probes of neighbouring pairs contend under the capture rule.
/// `network` puts kNetworkPairId in every probe: all recorders then emit
/// one byte-identical frame and no ENP sees inter-pair probe collisions.
enum class ProbeScope : std::uint8_t {
    network,
    pair,
};

inline constexpr std::uint16_t kNetworkPairId = 0xFFFF;

struct World {
    RoadGeometry geometry;
    RadioParams radio;
    HashParams hash;
    ReseedPolicy reseed = ReseedPolicy::per_round;
    ProbeScope probe_scope = ProbeScope::network;
    TimingParams timing;
    Fleet fleet;                ///< positions at time_us
    TimeUs time_us = 0;
    std::vector<VrState> vrs;   ///< index == vr_id
    std::vector<EnpState> enps; ///< index == vehicle index
};

/// Recorders for every pair of the geometry, ENP states for every vehicle.
World make_world(const RoadGeometry& geometry, const RadioParams& radio, const HashParams& hash,
                 const TimingParams& timing, Fleet fleet);

struct ReplyTx {
    std::size_t vehicle = 0;
    Vrn vrn = 0;
    std::uint16_t pair_id = 0;  ///< pair whose probe was decoded
    std::uint32_t round = 0;
    std::uint32_t slot = 0;
    TimeUs tx_time_us = 0;
};

struct EpochResult {
    EpochSchedule schedule;
    Fleet fleet_at_start;                          ///< snapshot at schedule.epoch_start_us
    std::vector<std::vector<RecordEntry>> records; ///< per vr_id, sorted by vrn
    std::vector<ReplyTx> replies;
    std::uint64_t probes_decoded = 0;
    std::uint64_t malformed = 0;
};

/// Positions at absolute time t for a fleet snapshot taken at t0.
Fleet fleet_at(const Fleet& snapshot, TimeUs t0, TimeUs t, double ring_length_m);

/// Runs one epoch starting at epoch_index * period. The world's fleet is
/// first brought to the epoch start, and left at the next epoch start.
EpochResult run_epoch(World& world, std::uint32_t epoch_index, Rng& rng, std::vector<Event>* events = nullptr);

}  // namespace enpsim

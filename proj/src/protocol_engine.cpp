#include "enpsim/protocol_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace enpsim {

namespace {

template <typename T>
void put_be(std::vector<std::uint8_t>& out, T value)
{
    for (int shift = 8 * (static_cast<int>(sizeof(T)) - 1); shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

template <typename T>
T get_be(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value = static_cast<T>((value << 8) | bytes[offset + i]);
    }
    return value;
}

const char* event_name(EventKind kind)
{
    switch (kind) {
    case EventKind::probe:
        return "PROBE";
    case EventKind::reply:
        return "REPLY";
    case EventKind::rx:
        return "RX";
    case EventKind::coll:
        return "COLL";
    }
    return "?";
}

}  // namespace

HashParams ProbeFrame::hash_params() const
{
    HashParams p;
    p.hash_id = static_cast<HashId>(hash_id);
    p.seed = seed;
    p.slot_count = slot_count;
    return p;
}

std::vector<std::uint8_t> ProbeFrame::encode() const
{
    std::vector<std::uint8_t> out;
    out.reserve(kSize);
    out.push_back(static_cast<std::uint8_t>(FrameKind::probe));
    put_be(out, pair_id);
    put_be(out, epoch);
    out.push_back(round);
    out.push_back(slot_count);
    out.push_back(hash_id);
    put_be(out, seed);
    return out;
}

std::optional<ProbeFrame> ProbeFrame::decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != kSize || bytes[0] != static_cast<std::uint8_t>(FrameKind::probe)) {
        return std::nullopt;
    }
    ProbeFrame p;
    p.pair_id = get_be<std::uint16_t>(bytes, 1);
    p.epoch = get_be<std::uint32_t>(bytes, 3);
    p.round = bytes[7];
    p.slot_count = bytes[8];
    p.hash_id = bytes[9];
    p.seed = get_be<std::uint32_t>(bytes, 10);
    return p;
}

std::vector<std::uint8_t> ReplyFrame::encode() const
{
    std::vector<std::uint8_t> out;
    out.reserve(kSize);
    out.push_back(static_cast<std::uint8_t>(FrameKind::reply));
    put_be(out, vrn);
    out.push_back(slot);
    return out;
}

std::optional<ReplyFrame> ReplyFrame::decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != kSize || bytes[0] != static_cast<std::uint8_t>(FrameKind::reply)) {
        return std::nullopt;
    }
    ReplyFrame r;
    r.vrn = get_be<std::uint64_t>(bytes, 1);
    r.slot = bytes[9];
    return r;
}

Frame make_frame(const ProbeFrame& probe)
{
    return Frame{FrameKind::probe, probe.encode()};
}

Frame make_frame(const ReplyFrame& reply)
{
    return Frame{FrameKind::reply, reply.encode()};
}

TimeUs EpochSchedule::round_length_us() const
{
    if (rounds.size() < 2) {
        return 0;
    }
    return rounds[1].probe_tx_time_us - rounds[0].probe_tx_time_us;
}

std::size_t rounds_per_epoch(const TimingParams& timing, std::uint32_t slot_count)
{
    const TimeUs round_len = timing.probe_len_us + static_cast<TimeUs>(slot_count) * timing.slot_len_us;
    const TimeUs usable = timing.glossy_period_us - timing.sync_window_us;
    if (round_len <= 0 || usable <= 0) {
        return 0;
    }
    return static_cast<std::size_t>(usable / round_len);
}

EpochSchedule build_epoch_schedule(const TimingParams& timing, std::uint32_t slot_count, std::uint32_t epoch_index)
{
    if (timing.probe_len_us <= 0 || timing.slot_len_us <= 0) {
        throw std::invalid_argument("probe and slot lengths must be positive");
    }
    if (timing.sync_window_us < 0 || timing.glossy_period_us <= 0) {
        throw std::invalid_argument("sync window and period must be non-negative and positive");
    }
    if (slot_count == 0) {
        throw std::invalid_argument("slot_count must be >= 1");
    }
    const std::size_t n_rounds = rounds_per_epoch(timing, slot_count);
    if (n_rounds == 0) {
        throw std::invalid_argument("no round fits in the glossy period");
    }

    EpochSchedule s;
    s.epoch = epoch_index;
    s.epoch_start_us = static_cast<TimeUs>(epoch_index) * timing.glossy_period_us;
    s.sync_window_us = timing.sync_window_us;
    const TimeUs round_len = timing.probe_len_us + static_cast<TimeUs>(slot_count) * timing.slot_len_us;
    s.rounds.resize(n_rounds);
    for (std::size_t r = 0; r < n_rounds; ++r) {
        RoundSchedule& rs = s.rounds[r];
        rs.probe_tx_time_us = s.epoch_start_us + timing.sync_window_us + static_cast<TimeUs>(r) * round_len;
        rs.slot_start_us.resize(slot_count);
        for (std::uint32_t i = 0; i < slot_count; ++i) {
            rs.slot_start_us[i] = rs.probe_tx_time_us + timing.probe_len_us + static_cast<TimeUs>(i) * timing.slot_len_us;
        }
    }
    return s;
}

std::optional<PlannedReply> enp_on_probe(EnpState& enp, const ProbeFrame& probe, const EpochSchedule& schedule)
{
    enp.last_probe = probe;
    if (probe.round >= schedule.round_count() || probe.slot_count == 0 ||
        probe.slot_count != schedule.slot_count()) {
        return std::nullopt;
    }
    if (probe.hash_id != static_cast<std::uint8_t>(HashId::mid_square)) {
        return std::nullopt;
    }
    const std::uint32_t slot = hash_slot(enp.vrn, probe.hash_params());
    return PlannedReply{slot, schedule.rounds[probe.round].slot_start_us[slot]};
}

bool vr_on_slot_outcome(VrState& vr, const ReceptionOutcome& outcome, std::uint32_t epoch, std::uint32_t round,
                        std::uint32_t slot)
{
    if (outcome.verdict != Verdict::received) {
        return false;
    }
    const auto reply = ReplyFrame::decode(outcome.frame.bytes);
    if (outcome.frame.kind != FrameKind::reply || !reply) {
        ++vr.malformed;
        return false;
    }
    const auto [it, inserted] = vr.records.try_emplace(reply->vrn, RecordEntry{reply->vrn, vr.vr_id, epoch, round, slot});
    return inserted;
}

std::string format_event(const Event& e)
{
    char slot[16] = "-";
    char vrn[24] = "-";
    if (e.slot) {
        std::snprintf(slot, sizeof slot, "%u", *e.slot);
    }
    if (e.vrn) {
        std::snprintf(vrn, sizeof vrn, "%llu", static_cast<unsigned long long>(*e.vrn));
    }
    char line[160];
    std::snprintf(line, sizeof line, "%lld\t%s\t%u\t%u\t%u\t%u\t%s\t%s", static_cast<long long>(e.time_us),
                  event_name(e.kind), e.node_id, static_cast<unsigned>(e.pair_id), e.epoch, e.round, slot, vrn);
    return line;
}

std::uint32_t probe_seed(std::uint32_t base_seed, ReseedPolicy policy, std::uint32_t epoch, std::uint32_t round)
{
    switch (policy) {
    case ReseedPolicy::fixed:
        return base_seed;
    case ReseedPolicy::per_epoch:
        return static_cast<std::uint32_t>(derive_seed(base_seed, epoch));
    case ReseedPolicy::per_round:
        return static_cast<std::uint32_t>(derive_seed(base_seed, (static_cast<std::uint64_t>(epoch) << 8) | round));
    }
    return base_seed;
}

World make_world(const RoadGeometry& geometry, const RadioParams& radio, const HashParams& hash,
                 const TimingParams& timing, Fleet fleet)
{
    World w;
    w.geometry = geometry;
    w.radio = radio;
    w.hash = hash;
    w.timing = timing;
    w.fleet = std::move(fleet);
    w.vrs.resize(geometry.vr_count());
    const std::size_t sides = geometry.vr_offsets_y.size();
    for (std::size_t id = 0; id < w.vrs.size(); ++id) {
        w.vrs[id].vr_id = static_cast<std::uint32_t>(id);
        w.vrs[id].pair_id = static_cast<std::uint16_t>(id / sides);
        w.vrs[id].position = geometry.vr_position(id);
    }
    w.enps.resize(w.fleet.size());
    for (std::size_t i = 0; i < w.fleet.size(); ++i) {
        w.enps[i].vrn = w.fleet[i].vrn;
    }
    return w;
}

Fleet fleet_at(const Fleet& snapshot, TimeUs t0, TimeUs t, double ring_length_m)
{
    return advance(snapshot, static_cast<double>(t - t0) * 1e-6, ring_length_m);
}

EpochResult run_epoch(World& world, std::uint32_t epoch_index, Rng& rng, std::vector<Event>* events)
{
    EpochResult result;
    result.schedule = build_epoch_schedule(world.timing, world.hash.slot_count, epoch_index);
    EpochSchedule& schedule = result.schedule;

    const TimeUs t0 = schedule.epoch_start_us;
    if (world.time_us != t0) {
        advance_in_place(world.fleet, static_cast<double>(t0 - world.time_us) * 1e-6, world.geometry.ring_length_m);
        world.time_us = t0;
    }
    if (world.timing.sync_jitter_us > 0) {
        const auto span = static_cast<std::uint64_t>(2 * world.timing.sync_jitter_us + 1);
        const TimeUs offset = static_cast<TimeUs>(rng.below(span)) - world.timing.sync_jitter_us;
        for (RoundSchedule& rs : schedule.rounds) {
            rs.probe_tx_time_us += offset;
            for (TimeUs& t : rs.slot_start_us) {
                t += offset;
            }
        }
    }
    result.fleet_at_start = world.fleet;
    const Fleet& snapshot = result.fleet_at_start;

    for (VrState& vr : world.vrs) {
        vr.begin_epoch();
    }
    const std::uint64_t malformed_before = [&] {
        std::uint64_t m = 0;
        for (const VrState& vr : world.vrs) {
            m += vr.malformed;
        }
        return m;
    }();

    const RoadGeometry& geo = world.geometry;
    const double ring = geo.ring_length_m;
    const std::uint32_t slot_count = world.hash.slot_count;

    std::vector<Transmission> probe_tx;
    std::vector<std::vector<std::size_t>> by_slot(slot_count);
    std::vector<std::uint16_t> decoded_pair(snapshot.size(), 0);
    std::vector<Transmission> reply_tx;

    for (std::uint32_t r = 0; r < schedule.round_count(); ++r) {
        const RoundSchedule& rs = schedule.rounds[r];

        // Probe phase: every recorder transmits its pair's probe.
        probe_tx.clear();
        for (const VrState& vr : world.vrs) {
            ProbeFrame probe;
            probe.pair_id = world.probe_scope == ProbeScope::network ? kNetworkPairId : vr.pair_id;
            probe.epoch = epoch_index;
            probe.round = static_cast<std::uint8_t>(r);
            probe.slot_count = static_cast<std::uint8_t>(slot_count);
            probe.hash_id = static_cast<std::uint8_t>(world.hash.hash_id);
            probe.seed = probe_seed(world.hash.seed, world.reseed, epoch_index, r);
            probe_tx.push_back(Transmission{make_frame(probe), vr.position, world.radio.tx_power_dbm, rs.probe_tx_time_us});
            if (events) {
                events->push_back(Event{rs.probe_tx_time_us, EventKind::probe, vr.vr_id, vr.pair_id, epoch_index, r,
                                        std::nullopt, std::nullopt});
            }
        }

        for (auto& bucket : by_slot) {
            bucket.clear();
        }
        const Fleet at_probe = fleet_at(snapshot, t0, rs.probe_tx_time_us, ring);
        for (std::size_t i = 0; i < at_probe.size(); ++i) {
            EnpState& enp = world.enps[i];
            enp.last_probe.reset();
            const ReceptionOutcome heard =
                resolve_slot_reception(road_position(at_probe[i], geo), probe_tx, world.radio, rng);
            if (heard.verdict != Verdict::received) {
                continue;
            }
            const auto probe = ProbeFrame::decode(heard.frame.bytes);
            if (!probe) {
                continue;
            }
            ++result.probes_decoded;
            if (const auto plan = enp_on_probe(enp, *probe, schedule)) {
                by_slot[plan->slot].push_back(i);
                decoded_pair[i] = probe->pair_id;
            }
        }

        // Reply phase: each recorder resolves every occupied slot.
        for (std::uint32_t s = 0; s < slot_count; ++s) {
            const auto& senders = by_slot[s];
            if (senders.empty()) {
                continue;
            }
            const TimeUs ts = rs.slot_start_us[s];
            const double dt = static_cast<double>(ts - t0) * 1e-6;
            reply_tx.clear();
            for (std::size_t i : senders) {
                const Vehicle v = advance(snapshot[i], dt, ring);
                const ReplyFrame reply{v.vrn, static_cast<std::uint8_t>(s)};
                reply_tx.push_back(Transmission{make_frame(reply), road_position(v, geo), world.radio.tx_power_dbm, ts});
                result.replies.push_back(ReplyTx{i, v.vrn, decoded_pair[i], r, s, ts});
                if (events) {
                    events->push_back(Event{ts, EventKind::reply, kEnpNodeBase + static_cast<std::uint32_t>(i),
                                            decoded_pair[i], epoch_index, r, s, v.vrn});
                }
            }
            for (VrState& vr : world.vrs) {
                const ReceptionOutcome out = resolve_slot_reception(vr.position, reply_tx, world.radio, rng);
                if (events && out.verdict != Verdict::silence) {
                    std::optional<Vrn> vrn;
                    if (out.verdict == Verdict::received) {
                        if (const auto reply = ReplyFrame::decode(out.frame.bytes)) {
                            vrn = reply->vrn;
                        }
                    }
                    events->push_back(Event{ts, out.verdict == Verdict::received ? EventKind::rx : EventKind::coll,
                                            vr.vr_id, vr.pair_id, epoch_index, r, s, vrn});
                }
                vr_on_slot_outcome(vr, out, epoch_index, r, s);
            }
        }
    }

    result.records.resize(world.vrs.size());
    std::uint64_t malformed_after = 0;
    for (std::size_t id = 0; id < world.vrs.size(); ++id) {
        for (const auto& [vrn, entry] : world.vrs[id].records) {
            result.records[id].push_back(entry);
        }
        malformed_after += world.vrs[id].malformed;
    }
    result.malformed = malformed_after - malformed_before;

    const TimeUs next = t0 + world.timing.glossy_period_us;
    world.fleet = fleet_at(snapshot, t0, next, ring);
    world.time_us = next;
    return result;
}

}  // namespace enpsim

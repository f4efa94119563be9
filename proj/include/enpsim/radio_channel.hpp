#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "enpsim/rng.hpp"
#include "enpsim/types.hpp"

namespace enpsim {

/// Log-distance path loss with optional lognormal shadowing and a
/// power-margin capture rule. Reference distance d0 is 1 m.
struct RadioParams {
    double tx_power_dbm = 0.0;
    double pl0_db = 40.0;
    double exponent = 3.0;
    double sensitivity_dbm = -94.0;
    double capture_threshold_db = 3.0;
    double shadowing_sigma_db = 0.0;
};

enum class FrameKind : std::uint8_t {
    probe = 0x01,
    reply = 0x02,
};

struct Frame {
    FrameKind kind = FrameKind::probe;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const Frame&, const Frame&) = default;
};

struct Transmission {
    Frame frame;
    Point source;
    double tx_power_dbm = 0.0;
    TimeUs slot_time = 0;
};

enum class Verdict : std::uint8_t {
    received,
    collision,
    silence,
};

struct ReceptionOutcome {
    Verdict verdict = Verdict::silence;
    /// Index of the decoded transmission; meaningful only when received.
    std::size_t source = 0;
    /// Copy of the decoded frame; empty unless received.
    Frame frame;
};

double received_power_dbm(double distance_m, const RadioParams& params, double shadow_db = 0.0);

/// Distance at which the zero-shadowing received power equals sensitivity.
double comm_range_m(const RadioParams& params);

double distance(Point a, Point b);

/// Linear-domain sum of powers given in dBm; -inf for an empty input.
double sum_dbm(std::span<const double> powers_dbm);

/// Capture rule over received powers already in dBm. The returned
/// `source` indexes `powers_dbm`; `frame` is left empty.
ReceptionOutcome resolve_capture(std::span<const double> powers_dbm, const RadioParams& params);

/// Resolves one TDMA slot at one receiver. Transmissions with byte-identical
/// frames are treated as one synchronous emission whose power is the
/// strongest of its links; distinct frames contend under the capture rule.
/// One shadowing draw is taken per link, and none when sigma is zero.
ReceptionOutcome resolve_slot_reception(Point receiver, std::span<const Transmission> transmissions,
                                        const RadioParams& params, Rng& rng);

}  // namespace enpsim

#pragma once

#include <cstdint>

namespace enpsim {

/// Vehicle registration number as carried by an electronic number plate.
using Vrn = std::uint64_t;

/// Simulation time in microseconds.
using TimeUs = std::int64_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One VRN decoded by one recorder. Unique per (vrn, vr_id, epoch).
struct RecordEntry {
    Vrn vrn = 0;
    std::uint32_t vr_id = 0;
    std::uint32_t epoch = 0;
    std::uint32_t round = 0;
    std::uint32_t slot = 0;
};

}  // namespace enpsim

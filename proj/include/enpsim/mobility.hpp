#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "enpsim/rng.hpp"
#include "enpsim/slot_hash.hpp"
#include "enpsim/types.hpp"

namespace enpsim {

struct Vehicle {
    Vrn vrn = 0;
    double x = 0.0;  ///< ring coordinate, [0, ring_length)
    double y = 0.0;  ///< lateral offset within the roadway
    double speed_mps = 0.0;
};

using Fleet = std::vector<Vehicle>;

/// Closed ring road. The instrumented segment is centred on the ring half
/// opposite the wrap point: ring x = road x + segment_offset_m().
struct RoadGeometry {
    double segment_length_m = 200.0;
    double ring_length_m = 400.0;
    double road_width_m = 7.0;
    std::vector<double> vr_pair_xs{20.0, 60.0, 100.0, 140.0, 180.0};
    std::vector<double> vr_offsets_y{-2.0, 9.0};

    double segment_offset_m() const { return 0.5 * (ring_length_m - segment_length_m); }
    std::size_t pair_count() const { return vr_pair_xs.size(); }
    std::size_t vr_count() const { return vr_pair_xs.size() * vr_offsets_y.size(); }

    /// Recorder vr_id lives in pair vr_id / 2 on side vr_id % 2.
    Point vr_position(std::size_t vr_id) const;
};

/// Full spawn description used by the harness.
struct FleetParams {
    std::size_t v_n = 40;
    double v_min_kmh = 30.0;
    double v_max_kmh = 90.0;
    /// The first `two_wheelers` vehicles keep to the road edge
    /// (y in [0.5, 2.0]); the rest take y in [2.0, width - 0.5].
    /// Zero disables the classes and spreads y over [0.5, width - 0.5].
    std::size_t two_wheelers = 0;
    /// Speed forced to zero (oracle scenarios).
    bool stationary = false;
    /// Restrict initial placement to this road-coordinate interval.
    std::optional<double> spawn_road_x_min;
    std::optional<double> spawn_road_x_max;
    /// Redraw VRNs until all vehicles hash to pairwise-distinct slots.
    bool distinct_slots = false;
};

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

/// Uniform placement on the ring, uniform lateral offset in
/// [0.5, width - 0.5], uniform speed, distinct uniform 64-bit VRNs.
/// Throws std::invalid_argument unless 0 < v_min_kmh <= v_max_kmh.
Fleet spawn_fleet(std::size_t v_n, double v_min_kmh, double v_max_kmh, const RoadGeometry& geometry, Rng& rng);

Fleet spawn_fleet(const FleetParams& params, const RoadGeometry& geometry, const HashParams& hash, Rng& rng);

/// Constant-velocity step with wraparound on the ring.
Vehicle advance(const Vehicle& vehicle, double dt_s, double ring_length_m);
Fleet advance(const Fleet& fleet, double dt_s, double ring_length_m);
void advance_in_place(Fleet& fleet, double dt_s, double ring_length_m);

double road_x(const Vehicle& vehicle, const RoadGeometry& geometry);
Point road_position(const Vehicle& vehicle, const RoadGeometry& geometry);

double distance_to_vr(const Vehicle& vehicle, Point vr_position, const RoadGeometry& geometry);

}  // namespace enpsim

#include "enpsim/mobility.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "enpsim/radio_channel.hpp"

namespace enpsim {

Point RoadGeometry::vr_position(std::size_t vr_id) const
{
    const std::size_t sides = vr_offsets_y.size();
    return {vr_pair_xs.at(vr_id / sides), vr_offsets_y.at(vr_id % sides)};
}

namespace {

double wrap(double x, double ring)
{
    double r = std::fmod(x, ring);
    if (r < 0.0) {
        r += ring;
    }
    // fmod can round up to exactly ring for tiny negative inputs
    return r >= ring ? 0.0 : r;
}

Vrn draw_vrn(Rng& rng, std::unordered_set<Vrn>& used)
{
    for (;;) {
        const Vrn v = rng.next_u64();
        if (used.insert(v).second) {
            return v;
        }
    }
}

void check_speeds(double v_min_kmh, double v_max_kmh)
{
    if (!(v_min_kmh > 0.0)) {
        throw std::invalid_argument("v_min_kmh must be > 0");
    }
    if (!(v_min_kmh <= v_max_kmh)) {
        throw std::invalid_argument("v_min_kmh must not exceed v_max_kmh");
    }
}

}  // namespace

Fleet spawn_fleet(std::size_t v_n, double v_min_kmh, double v_max_kmh, const RoadGeometry& geometry, Rng& rng)
{
    FleetParams params;
    params.v_n = v_n;
    params.v_min_kmh = v_min_kmh;
    params.v_max_kmh = v_max_kmh;
    return spawn_fleet(params, geometry, HashParams{}, rng);
}

Fleet spawn_fleet(const FleetParams& params, const RoadGeometry& geometry, const HashParams& hash, Rng& rng)
{
    if (!params.stationary) {
        check_speeds(params.v_min_kmh, params.v_max_kmh);
    }
    if (params.distinct_slots && params.v_n > hash.slot_count) {
        throw std::invalid_argument("distinct_slots needs v_n <= slot_count");
    }

    const double ring = geometry.ring_length_m;
    const double offset = geometry.segment_offset_m();
    double x_lo = 0.0;
    double x_hi = ring;
    if (params.spawn_road_x_min || params.spawn_road_x_max) {
        x_lo = params.spawn_road_x_min.value_or(-offset) + offset;
        x_hi = params.spawn_road_x_max.value_or(ring - offset) + offset;
    }

    const double w = geometry.road_width_m;
    const double v_lo = kmh_to_mps(params.v_min_kmh);
    const double v_hi = kmh_to_mps(params.v_max_kmh);

    Fleet fleet;
    fleet.reserve(params.v_n);
    std::unordered_set<Vrn> used;
    std::vector<bool> slot_taken(hash.slot_count, false);

    for (std::size_t i = 0; i < params.v_n; ++i) {
        Vehicle v;
        if (params.distinct_slots) {
            for (;;) {
                const Vrn candidate = rng.next_u64();
                const std::uint32_t s = hash_slot(candidate, hash);
                if (!slot_taken[s] && used.insert(candidate).second) {
                    slot_taken[s] = true;
                    v.vrn = candidate;
                    break;
                }
            }
        } else {
            v.vrn = draw_vrn(rng, used);
        }
        v.x = wrap(rng.uniform(x_lo, x_hi), ring);
        if (params.two_wheelers == 0) {
            v.y = rng.uniform(0.5, w - 0.5);
        } else if (i < params.two_wheelers) {
            v.y = rng.uniform(0.5, 2.0);
        } else {
            v.y = rng.uniform(2.0, w - 0.5);
        }
        v.speed_mps = params.stationary ? 0.0 : rng.uniform(v_lo, v_hi);
        fleet.push_back(v);
    }
    return fleet;
}

Vehicle advance(const Vehicle& vehicle, double dt_s, double ring_length_m)
{
    Vehicle v = vehicle;
    v.x = wrap(v.x + v.speed_mps * dt_s, ring_length_m);
    return v;
}

void advance_in_place(Fleet& fleet, double dt_s, double ring_length_m)
{
    for (Vehicle& v : fleet) {
        v = advance(v, dt_s, ring_length_m);
    }
}

Fleet advance(const Fleet& fleet, double dt_s, double ring_length_m)
{
    Fleet out = fleet;
    advance_in_place(out, dt_s, ring_length_m);
    return out;
}

double road_x(const Vehicle& vehicle, const RoadGeometry& geometry)
{
    return vehicle.x - geometry.segment_offset_m();
}

Point road_position(const Vehicle& vehicle, const RoadGeometry& geometry)
{
    return {road_x(vehicle, geometry), vehicle.y};
}

double distance_to_vr(const Vehicle& vehicle, Point vr_position, const RoadGeometry& geometry)
{
    return distance(road_position(vehicle, geometry), vr_position);
}

}  // namespace enpsim

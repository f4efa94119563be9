#include "enpsim/radio_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace enpsim {

namespace {

constexpr double kReferenceDistanceM = 1.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double received_power_dbm(double distance_m, const RadioParams& params, double shadow_db)
{
    const double d = std::max(distance_m, kReferenceDistanceM);
    return params.tx_power_dbm - params.pl0_db - 10.0 * params.exponent * std::log10(d / kReferenceDistanceM) +
           shadow_db;
}

double comm_range_m(const RadioParams& params)
{
    const double budget = params.tx_power_dbm - params.pl0_db - params.sensitivity_dbm;
    return kReferenceDistanceM * std::pow(10.0, budget / (10.0 * params.exponent));
}

double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double sum_dbm(std::span<const double> powers_dbm)
{
    double mw = 0.0;
    for (double p : powers_dbm) {
        mw += std::pow(10.0, p / 10.0);
    }
    return mw > 0.0 ? 10.0 * std::log10(mw) : kNegInf;
}

ReceptionOutcome resolve_capture(std::span<const double> powers_dbm, const RadioParams& params)
{
    ReceptionOutcome out;
    if (powers_dbm.empty()) {
        return out;
    }

    std::size_t best = 0;
    bool tied = false;
    for (std::size_t i = 1; i < powers_dbm.size(); ++i) {
        if (powers_dbm[i] > powers_dbm[best]) {
            best = i;
            tied = false;
        } else if (powers_dbm[i] == powers_dbm[best]) {
            tied = true;
        }
    }

    const double strongest = powers_dbm[best];
    if (strongest < params.sensitivity_dbm) {
        return out;
    }
    out.source = best;
    if (tied) {
        out.verdict = Verdict::collision;
        return out;
    }

    double interference_mw = 0.0;
    for (std::size_t i = 0; i < powers_dbm.size(); ++i) {
        if (i != best) {
            interference_mw += std::pow(10.0, powers_dbm[i] / 10.0);
        }
    }
    if (interference_mw == 0.0) {
        out.verdict = Verdict::received;
        return out;
    }
    const double interference_dbm = 10.0 * std::log10(interference_mw);
    out.verdict = strongest - interference_dbm >= params.capture_threshold_db ? Verdict::received
                                                                              : Verdict::collision;
    return out;
}

ReceptionOutcome resolve_slot_reception(Point receiver, std::span<const Transmission> transmissions,
                                        const RadioParams& params, Rng& rng)
{
    // Group byte-identical frames: group_power[g] is the strongest link of
    // group g, group_head[g] the index of that link's transmission.
    std::vector<double> group_power;
    std::vector<std::size_t> group_head;
    group_power.reserve(transmissions.size());
    group_head.reserve(transmissions.size());

    for (std::size_t i = 0; i < transmissions.size(); ++i) {
        const Transmission& tx = transmissions[i];
        double shadow = 0.0;
        if (params.shadowing_sigma_db > 0.0) {
            shadow = params.shadowing_sigma_db * rng.normal();
        }
        RadioParams link = params;
        link.tx_power_dbm = tx.tx_power_dbm;
        const double p = received_power_dbm(distance(receiver, tx.source), link, shadow);

        std::size_t g = 0;
        for (; g < group_head.size(); ++g) {
            if (transmissions[group_head[g]].frame == tx.frame) {
                break;
            }
        }
        if (g == group_head.size()) {
            group_power.push_back(p);
            group_head.push_back(i);
        } else if (p > group_power[g]) {
            group_power[g] = p;
            group_head[g] = i;
        }
    }

    ReceptionOutcome out = resolve_capture(group_power, params);
    if (out.verdict != Verdict::silence) {
        out.source = group_head[out.source];
    }
    if (out.verdict == Verdict::received) {
        out.frame = transmissions[out.source].frame;
    }
    return out;
}

}  // namespace enpsim

#pragma once

#include <cstdint>
#include <random>

namespace enpsim {

/// SplitMix64 finalizer; used for deriving independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-mode derivation of a child seed from (parent, index).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0xA5A5A5A5A5A5A5A5ULL));
}

/// Seeded random stream. The std distributions are implementation-defined,
/// so the continuous draws are built directly on the engine output to keep
/// results identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0 (Lemire rejection, unbiased).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal deviate (Box-Muller, one value per call).
    double normal();

    Rng child(std::uint64_t index) { return Rng(derive_seed(engine_(), index)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace enpsim

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "enpsim/rng.hpp"
#include "enpsim/slot_hash.hpp"

using namespace enpsim;

namespace {

HashParams params(std::uint32_t slots, std::uint32_t seed = 0)
{
    return HashParams{HashId::mid_square, seed, slots};
}

// Fraction of ENPs whose slot is shared with at least one other ENP,
// pooled over `trials` random fleets of n VRNs.
double empirical_collision_fraction(std::uint32_t n, std::uint32_t slots, int trials, Rng& rng)
{
    std::vector<std::uint32_t> count(slots);
    std::vector<std::uint32_t> assigned(n);
    std::uint64_t shared = 0;
    for (int t = 0; t < trials; ++t) {
        std::fill(count.begin(), count.end(), 0u);
        for (std::uint32_t i = 0; i < n; ++i) {
            assigned[i] = mid_square_slot(rng.next_u64(), params(slots));
            ++count[assigned[i]];
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            shared += count[assigned[i]] > 1 ? 1 : 0;
        }
    }
    return static_cast<double>(shared) / (static_cast<double>(n) * trials);
}

}  // namespace

TEST_CASE("mid-square golden vectors")
{
    CHECK(mid_square_slot(0, params(17)) == 0);
    CHECK(mid_square_slot(1, params(71)) == 0);
    // 9876543210^2 = 97546105778997104100; bits 32..95 = 22711722594.
    CHECK(mid_square_slot(9876543210ULL, params(71)) == 58);

    // Further vectors from an arbitrary-precision squaring oracle.
    CHECK(mid_square_slot(1ULL << 32, params(17)) == 1);
    CHECK(mid_square_slot(1ULL << 32, params(71)) == 9);
    CHECK(mid_square_slot(0xFFFFFFFFFFFFFFFFULL, params(17)) == 16);
    CHECK(mid_square_slot(0xFFFFFFFFFFFFFFFFULL, params(71)) == 63);
    CHECK(mid_square_slot(0xFFFFFFFFFFFFFFFFULL, params(255)) == 254);
    CHECK(mid_square_slot(1, params(71, 0xDEADBEEF)) == 37);
    CHECK(mid_square_slot(123456789012345678ULL, params(71)) == 57);
    CHECK(mid_square_slot(123456789012345678ULL, params(255, 0xDEADBEEF)) == 4);
}

TEST_CASE("single slot maps everything to zero")
{
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        CHECK(mid_square_slot(rng.next_u64(), params(1)) == 0);
    }
}

TEST_CASE("hash_slot dispatches to mid-square")
{
    CHECK(hash_slot(9876543210ULL, params(71)) == mid_square_slot(9876543210ULL, params(71)));
    CHECK(hash_id_from_name("mid_square") == HashId::mid_square);
    CHECK_FALSE(hash_id_from_name("fnv").has_value());
}

TEST_CASE("range and determinism over random keys")
{
    Rng rng(11);
    for (std::uint32_t s : {1u, 2u, 17u, 71u, 255u}) {
        for (int i = 0; i < 20000; ++i) {
            const Vrn v = rng.next_u64();
            const auto seed = static_cast<std::uint32_t>(rng.next_u64());
            const std::uint32_t slot = mid_square_slot(v, params(s, seed));
            CHECK(slot < s);
            CHECK(slot == mid_square_slot(v, params(s, seed)));
        }
    }
}

TEST_CASE("seed sensitivity")
{
    Rng rng(7);
    int changed = 0;
    constexpr int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Vrn v = rng.next_u64();
        changed += mid_square_slot(v, params(71, 0)) != mid_square_slot(v, params(71, 0x9E3779B9)) ? 1 : 0;
    }
    CHECK(static_cast<double>(changed) / n >= 0.9);
}

TEST_CASE("bucket uniformity at S=71")
{
    Rng rng(2024);
    constexpr int n = 1'000'000;
    std::array<int, 71> buckets{};
    for (int i = 0; i < n; ++i) {
        ++buckets[mid_square_slot(rng.next_u64(), params(71))];
    }
    const double mean = static_cast<double>(n) / 71.0;
    for (int b : buckets) {
        CHECK(std::abs(b - mean) <= 0.05 * mean);
    }
}

TEST_CASE("expected_collision_fraction closed form")
{
    CHECK(expected_collision_fraction(1, 71) == 0.0);
    CHECK(expected_collision_fraction(2, 1) == 1.0);
    // Closed form 1 - (70/71)^39; a 10^6-trial Monte-Carlo gave 0.42505.
    CHECK(expected_collision_fraction(40, 71) == doctest::Approx(0.424894).epsilon(1e-5));
}

TEST_CASE("Monte-Carlo birthday oracle agrees with the closed form")
{
    // Uniform slot draws, independent of the hash under test.
    Rng rng(99);
    constexpr int trials = 200'000;
    int shared = 0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t mine = rng.below(71);
        bool hit = false;
        for (int j = 0; j < 39; ++j) {
            hit = (rng.below(71) == mine) || hit;
        }
        shared += hit ? 1 : 0;
    }
    CHECK(static_cast<double>(shared) / trials == doctest::Approx(expected_collision_fraction(40, 71)).epsilon(0.01));
}

TEST_CASE("empirical collision fraction of mid-square matches uniform hashing")
{
    Rng rng(5);
    for (auto [n, s] : {std::pair{10u, 17u}, std::pair{40u, 71u}, std::pair{50u, 71u}}) {
        CAPTURE(n);
        CAPTURE(s);
        const double empirical = empirical_collision_fraction(n, s, 20000, rng);
        CHECK(std::abs(empirical - expected_collision_fraction(n, s)) <= 0.01);
    }
}

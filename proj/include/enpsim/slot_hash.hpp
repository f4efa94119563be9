#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "enpsim/types.hpp"

namespace enpsim {

enum class HashId : std::uint8_t {
    mid_square = 0,
};

std::optional<HashId> hash_id_from_name(std::string_view name);
std::string_view hash_id_name(HashId id);

struct HashParams {
    HashId hash_id = HashId::mid_square;
    std::uint32_t seed = 0;
    std::uint32_t slot_count = 71;  ///< S, must be >= 1
};

/// Mid-square slot: square (vrn ^ seed) exactly in 128 bits, keep bits
/// 32..95 and fold mod S.
std::uint32_t mid_square_slot(Vrn vrn, const HashParams& params) noexcept;

/// Dispatches on params.hash_id.
std::uint32_t hash_slot(Vrn vrn, const HashParams& params) noexcept;

/// Probability that a given ENP shares its slot with at least one of the
/// other n-1 ENPs when keys land uniformly in S slots.
double expected_collision_fraction(std::uint32_t n, std::uint32_t slot_count) noexcept;

}  // namespace enpsim

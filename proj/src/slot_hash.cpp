#include "enpsim/slot_hash.hpp"

#include <cmath>

namespace enpsim {

std::optional<HashId> hash_id_from_name(std::string_view name)
{
    if (name == "mid_square" || name == "mid-square") {
        return HashId::mid_square;
    }
    return std::nullopt;
}

std::string_view hash_id_name(HashId id)
{
    switch (id) {
    case HashId::mid_square:
        return "mid_square";
    }
    return "unknown";
}

std::uint32_t mid_square_slot(Vrn vrn, const HashParams& params) noexcept
{
    __extension__ using u128 = unsigned __int128;
    const std::uint64_t x = vrn ^ static_cast<std::uint64_t>(params.seed);
    const u128 square = static_cast<u128>(x) * static_cast<u128>(x);
    const auto middle = static_cast<std::uint64_t>(square >> 32);
    return static_cast<std::uint32_t>(middle % params.slot_count);
}

std::uint32_t hash_slot(Vrn vrn, const HashParams& params) noexcept
{
    switch (params.hash_id) {
    case HashId::mid_square:
        return mid_square_slot(vrn, params);
    }
    return 0;
}

double expected_collision_fraction(std::uint32_t n, std::uint32_t slot_count) noexcept
{
    if (n <= 1) {
        return 0.0;
    }
    const double s = static_cast<double>(slot_count);
    return 1.0 - std::pow((s - 1.0) / s, static_cast<double>(n - 1));
}

}  // namespace enpsim

#include "enpsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace enpsim {

std::uint64_t Rng::below(std::uint64_t n)
{
    __extension__ using u128 = unsigned __int128;
    std::uint64_t x = engine_();
    u128 m = static_cast<u128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = engine_();
            m = static_cast<u128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal()
{
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace enpsim

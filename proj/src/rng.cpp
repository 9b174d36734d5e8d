#include "evifuse/rng.hpp"

#include <cmath>
#include <numbers>

namespace evifuse {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng CounterRng::split(std::uint64_t tag) const noexcept {
    return CounterRng(mix(key_ ^ mix(tag + kSplitSalt)), 0, 0);
}

std::uint64_t CounterRng::next_u64() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double CounterRng::uniform_open() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double CounterRng::normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t CounterRng::below(std::size_t n) noexcept {
    if (n == 0) {
        return 0;
    }
    const auto j = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return j < n ? j : n - 1;
}

}  // namespace evifuse

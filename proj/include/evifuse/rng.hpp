#pragma once

// Counter-based splittable generator with a fully specified output stream.
//
// State is a (key, counter) pair of 64-bit words. Seeding with s sets
// key = mix(s), counter = 0. The n-th raw output (n = 0, 1, ...) is
//
//     mix(key + (n + 1) * 0x9E3779B97F4A7C15)
//
// where mix is the SplitMix64 finalizer
//
//     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     z =  z ^ (z >> 31)
//
// with all arithmetic modulo 2^64. A child stream for a 64-bit tag is keyed
// by mix(key ^ mix(tag + 0xD1B54A32D192ED03)) and starts at counter 0; splitting
// does not advance the parent.
//
// Derived draws:
//   uniform()      = (raw >> 11) * 2^-53                      in [0, 1)
//   uniform_open() = ((raw >> 11) + 1) * 2^-53                in (0, 1]
//   normal()       = sqrt(-2 ln u1) * cos(2 pi u2), u1 = uniform_open(),
//                    u2 = uniform(), consuming exactly two raw outputs
//   below(n)       = floor(uniform() * n)
//
// Only these formulas are used for any random decision in the project, so
// another implementation that follows them reproduces every stream bit for bit
// (up to the platform's libm for log/cos/sqrt).

#include <cstddef>
#include <cstdint>
#include <span>

namespace evifuse {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(mix(seed)), counter_(0) {}

    static std::uint64_t mix(std::uint64_t z) noexcept;

    // Independent child stream identified by `tag`.
    CounterRng split(std::uint64_t tag) const noexcept;

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform_open() noexcept;
    double normal() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) noexcept;

    // Fisher-Yates, walking from the back: for i = n-1 .. 1 swap(i, below(i+1)).
    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    CounterRng(std::uint64_t key, std::uint64_t counter, int) noexcept : key_(key), counter_(counter) {}

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace evifuse

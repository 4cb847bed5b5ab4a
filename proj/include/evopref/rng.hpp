#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace evopref {

// SplitMix64 finalizer. Used both as the core generator step and for
// deriving independent stream seeds from (seed, tag, index...) tuples.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds an arbitrary tuple of 64-bit parts into one stream seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8a5cd789635d2dffULL;
    for (std::uint64_t p : parts)
        h = mix64(h ^ mix64(p));
    return h;
}

// Named sub-stream tags. Every random decision in the project draws from a
// stream derived from (run seed, tag, indices...), never from shared state,
// so results are independent of evaluation order and thread count.
namespace stream {
inline constexpr std::uint64_t init = 0x11;
inline constexpr std::uint64_t generation = 0x12;
inline constexpr std::uint64_t eval_noise = 0x13;
inline constexpr std::uint64_t tournament = 0x14;
inline constexpr std::uint64_t mutate = 0x15;
inline constexpr std::uint64_t crossover_gamma = 0x16;
inline constexpr std::uint64_t archive_partner = 0x17;
inline constexpr std::uint64_t variation_choice = 0x18;
inline constexpr std::uint64_t landscape_centers = 0x21;
inline constexpr std::uint64_t landscape_projection = 0x22;
inline constexpr std::uint64_t landscape_scores = 0x23;
inline constexpr std::uint64_t moead = 0x31;
inline constexpr std::uint64_t smsemoa = 0x32;
inline constexpr std::uint64_t cmaes = 0x33;
inline constexpr std::uint64_t random_search = 0x34;
inline constexpr std::uint64_t gradient = 0x35;
inline constexpr std::uint64_t tie_break = 0x36;
inline constexpr std::uint64_t genome_id = 0x41;
}  // namespace stream

// Small counter-based generator (SplitMix64 sequence). Explicitly seeded,
// copyable, no global state. Distribution code is hand-rolled so that
// streams are reproducible independent of the standard library version.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return mix64(state_++); }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inclusive range, rejection-sampled to avoid modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0)
            return static_cast<std::int64_t>(next_u64());  // full 64-bit range
        const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
        std::uint64_t x = next_u64();
        while (x >= limit)
            x = next_u64();
        return lo + static_cast<std::int64_t>(x % span);
    }

    // Standard normal via Box-Muller (cosine branch only, stateless).
    double gaussian() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

 private:
    std::uint64_t state_;
};

}  // namespace evopref

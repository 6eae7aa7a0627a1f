#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cyberdyn {

// SplitMix64 finalizer; the workhorse behind every counter-based draw.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash2(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ mix64(b));
}

inline constexpr std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return mix64(a ^ mix64(b ^ mix64(c)));
}

// Uniform double in [0, 1) from a 64-bit hash.
inline constexpr double u01(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Random-access uniform draw keyed by (seed, stream, counter).
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    return u01(hash3(seed, stream, counter));
}

// Sequential generator with a platform-independent draw sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return u01(next()); }

    // Draw in [0, n) via multiply-shift; bias is negligible for n << 2^64.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Hand-rolled Fisher-Yates so the permutation is identical on every platform.
inline void shuffle_span(std::span<int> v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        int tmp = v[i - 1];
        v[i - 1] = v[j];
        v[j] = tmp;
    }
}

inline std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    shuffle_span(p, rng);
    return p;
}

// Exactly floor(fraction*n) entries set to 1, chosen by seeded shuffle.
inline std::vector<std::uint8_t> indicator_sample(int n, double fraction, std::uint64_t seed) {
    std::vector<std::uint8_t> flag(static_cast<std::size_t>(n), 0);
    auto perm = seeded_permutation(n, seed);
    auto count = static_cast<std::size_t>(fraction * n);
    if (count > flag.size()) count = flag.size();
    for (std::size_t i = 0; i < count; ++i) flag[static_cast<std::size_t>(perm[i])] = 1;
    return flag;
}

}  // namespace cyberdyn

#pragma once

#include <uvtomo/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace uvtomo {

struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// SplitMix64 finalizer. Used to derive independent child seeds so that
/// parallel workers never share a generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr RngSeed derive_seed(RngSeed parent, std::uint64_t stream) noexcept {
    return RngSeed{splitmix64(splitmix64(parent.value) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))};
}

/// The repository-wide generator: 64-bit Mersenne Twister (std::mt19937_64)
/// seeded through SplitMix64. Uniform and Gaussian variates are produced
/// by the explicit transforms below rather than <random> distributions,
/// whose output is implementation-defined; this keeps streams bit-identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(splitmix64(seed.value)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw InvalidArgument("Rng::below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            __extension__ using u128 = unsigned __int128;
            const u128 m = static_cast<u128>(engine_()) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    template <class It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1), first + static_cast<std::ptrdiff_t>(j));
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// n i.i.d. Uniform[lo, hi) draws, sorted ascending. Ties (probability
/// ~n^2 / 2^53) are redrawn so the result is strictly increasing.
inline std::vector<double> sample_sorted_uniform(std::size_t n, double lo, double hi, RngSeed seed) {
    if (n == 0) throw InvalidArgument("sample_sorted_uniform: n must be at least 1");
    if (!(lo < hi)) throw InvalidArgument("sample_sorted_uniform: requires lo < hi");
    Rng rng(seed);
    std::vector<double> t(n);
    for (;;) {
        for (auto& v : t) {
            v = rng.uniform(lo, hi);
            if (v >= hi) v = std::nextafter(hi, lo);
        }
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) == t.end()) return t;
    }
}

} // namespace uvtomo

#pragma once

// Orderings of projections: greedy nearest-neighbour recovery, synthetic
// shuffle / shift corruption, and the (delta_bar, N_delta_bar) goodness
// measure of a bijection.
//
// Positions and images are 1-based throughout, matching the serialized
// form (a JSON integer array). Row indices passed to nn_order are 0-based.

#include <uvtomo/error.hpp>
#include <uvtomo/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace uvtomo::ordering {

/// A bijection h on {1..N}; map()[i-1] = h(i). With anchor_fixed, h(1) = 1
/// and perturbations never touch position 1.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> map, bool anchor_fixed = false)
        : map_(std::move(map)), anchor_fixed_(anchor_fixed) {
        if (map_.empty()) throw InvalidArgument("Permutation: empty map");
        std::vector<char> seen(map_.size() + 1, 0);
        for (int v : map_) {
            if (v < 1 || static_cast<std::size_t>(v) > map_.size() || seen[static_cast<std::size_t>(v)])
                throw InvalidArgument("Permutation: map is not a bijection of {1..N}");
            seen[static_cast<std::size_t>(v)] = 1;
        }
        if (anchor_fixed_ && map_.front() != 1) throw InvalidArgument("Permutation: anchor requires h(1) = 1");
    }

    static Permutation identity(std::size_t n, bool anchor_fixed = true) {
        std::vector<int> m(n);
        std::iota(m.begin(), m.end(), 1);
        return Permutation(std::move(m), anchor_fixed);
    }

    std::size_t size() const noexcept { return map_.size(); }
    bool anchor_fixed() const noexcept { return anchor_fixed_; }
    std::span<const int> map() const noexcept { return map_; }

    /// h(i), 1-based.
    int operator()(std::size_t i) const { return map_[i - 1]; }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> map_;
    bool anchor_fixed_ = false;
};

struct OrderingQuality {
    int delta_bar = 0;
    std::size_t n_delta = 0;
};

/// n_delta = #{ i : |i - h(i)| > delta_bar }.
inline OrderingQuality measure_goodness(const Permutation& perm, int delta_bar) {
    if (delta_bar < 0) throw InvalidArgument("measure_goodness: delta_bar must be non-negative");
    std::size_t count = 0;
    const auto m = perm.map();
    for (std::size_t i = 0; i < m.size(); ++i)
        if (std::abs(static_cast<long long>(i + 1) - m[i]) > delta_bar) ++count;
    return {delta_bar, count};
}

/// Greedy nearest-neighbour chain over row vectors of a row-major matrix.
/// out[1] = start_row + 1; each step moves to the closest unvisited row in
/// Euclidean distance, ties going to the lowest row index.
inline Permutation nn_order(std::span<const double> rows, std::size_t dim, std::size_t start_row) {
    if (dim == 0 || rows.empty()) throw InvalidArgument("nn_order: empty input");
    if (rows.size() % dim != 0) throw InvalidArgument("nn_order: vectors must share one length");
    const std::size_t n = rows.size() / dim;
    if (start_row >= n) throw InvalidArgument("nn_order: start index out of range");

    std::vector<int> out;
    out.reserve(n);
    // Unvisited rows kept in ascending order so the strict '<' below breaks
    // ties toward the lowest index.
    std::vector<std::size_t> pending;
    pending.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r)
        if (r != start_row) pending.push_back(r);

    std::size_t current = start_row;
    out.push_back(static_cast<int>(current + 1));
    while (!pending.empty()) {
        const double* a = rows.data() + current * dim;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_pos = 0;
        for (std::size_t p = 0; p < pending.size(); ++p) {
            const double* b = rows.data() + pending[p] * dim;
            double d2 = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = a[c] - b[c];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                best_pos = p;
            }
        }
        current = pending[best_pos];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));
        out.push_back(static_cast<int>(current + 1));
    }
    return Permutation(std::move(out), start_row == 0);
}

namespace detail {

inline std::size_t first_movable(const Permutation& p) { return p.anchor_fixed() ? 2 : 1; }

} // namespace detail

/// Re-permutes the images at `subset_size` uniformly chosen positions among
/// themselves (uniformly at random; some may stay in place).
inline Permutation perturb_shuffle(const Permutation& perm, std::size_t subset_size, RngSeed seed) {
    const std::size_t lo = detail::first_movable(perm);
    const std::size_t eligible = perm.size() + 1 - lo;
    if (subset_size > eligible) throw InvalidArgument("perturb_shuffle: subset larger than the movable positions");
    if (subset_size < 2) return perm;

    Rng rng(seed);
    std::vector<std::size_t> positions(eligible);
    std::iota(positions.begin(), positions.end(), lo);
    for (std::size_t i = 0; i < subset_size; ++i) {
        const auto j = i + rng.below(eligible - i);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(subset_size);

    std::vector<int> map(perm.map().begin(), perm.map().end());
    std::vector<int> images;
    images.reserve(subset_size);
    for (auto p : positions) images.push_back(map[p - 1]);
    rng.shuffle(images.begin(), images.end());
    for (std::size_t i = 0; i < subset_size; ++i) map[positions[i] - 1] = images[i];
    return Permutation(std::move(map), perm.anchor_fixed());
}

/// Removes the images at positions [block_start, block_start + block_len)
/// and reinserts them so the block begins at position `insert_at` of the
/// result. Everything between shifts over by block_len.
inline Permutation perturb_shift(const Permutation& perm, std::size_t block_start, std::size_t block_len,
                                 std::size_t insert_at) {
    const std::size_t n = perm.size();
    const std::size_t lo = detail::first_movable(perm);
    if (block_len == 0) throw InvalidArgument("perturb_shift: empty block");
    if (block_start < lo || block_start + block_len - 1 > n)
        throw InvalidArgument("perturb_shift: block outside the movable range");
    if (insert_at < lo || insert_at + block_len - 1 > n)
        throw InvalidArgument("perturb_shift: insertion point outside the movable range");
    if (insert_at == block_start) return perm;

    std::vector<int> map(perm.map().begin(), perm.map().end());
    const auto first = map.begin() + static_cast<std::ptrdiff_t>(block_start - 1);
    const auto len = static_cast<std::ptrdiff_t>(block_len);
    if (insert_at < block_start) {
        std::rotate(map.begin() + static_cast<std::ptrdiff_t>(insert_at - 1), first, first + len);
    } else {
        std::rotate(first, first + len, map.begin() + static_cast<std::ptrdiff_t>(insert_at - 1) + len);
    }
    return Permutation(std::move(map), perm.anchor_fixed());
}

/// Synthetic good(delta_bar, n_delta) bijection with position 1 anchored.
///
/// Built in two stages. First, ceil(ln n) block shifts confined to disjoint
/// windows, each with block length and shift distance at most delta_bar, so
/// every displacement they cause stays within delta_bar. Second, n_delta
/// untouched positions are cyclically rotated among themselves with every
/// step longer than delta_bar, or for n_delta = 1 one element makes a single
/// long move. The measured n_delta is therefore exact.
inline Permutation synth_good_map(std::size_t n, int delta_bar, std::size_t n_delta, RngSeed seed) {
    if (n == 0) throw InvalidArgument("synth_good_map: n must be positive");
    if (delta_bar < 0) throw InvalidArgument("synth_good_map: delta_bar must be non-negative");
    if (n_delta > n - 1) throw InvalidArgument("synth_good_map: n_delta exceeds the movable positions");

    Rng rng(seed);
    auto perm = Permutation::identity(n, true);

    // A single violation is one long move: a length-1 block jumps
    // delta_bar + 1 places, pushing the elements in between over by one. Its
    // segment is reserved before the local shifts are placed.
    std::size_t long_move = 0;
    const std::size_t run = static_cast<std::size_t>(delta_bar) + 2;
    if (n_delta == 1) {
        if (delta_bar < 1) throw InvalidArgument("synth_good_map: a single violation needs delta_bar >= 1");
        if (run > n - 1) throw InvalidArgument("synth_good_map: infeasible parameters");
        long_move = 2 + rng.below(n - run);
    }
    const auto overlaps_long_move = [&](std::size_t lo, std::size_t hi) {
        return long_move != 0 && lo < long_move + run && long_move < hi;
    };

    // Stage 1: local shifts.
    if (delta_bar > 0 && n >= 3) {
        const auto count = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
        const std::size_t window = (n - 1) / count;
        const std::size_t cap = std::min<std::size_t>(static_cast<std::size_t>(delta_bar), window / 2);
        if (cap >= 1) {
            for (std::size_t w = 0; w < count; ++w) {
                const std::size_t w_lo = 2 + w * window; // window covers [w_lo, w_lo + window)
                const std::size_t len = 1 + rng.below(cap);
                const std::size_t dist = 1 + rng.below(cap);
                const std::size_t span = len + dist;
                const std::size_t origin = w_lo + rng.below(window - span + 1);
                const bool right = rng.below(2) == 0;
                if (overlaps_long_move(origin, origin + span)) continue;
                // Move the block right (start at origin) or left (start at origin + dist).
                if (right)
                    perm = perturb_shift(perm, origin, len, origin + dist);
                else
                    perm = perturb_shift(perm, origin + dist, len, origin);
            }
        }
    }

    if (n_delta == 0) return perm;
    if (n_delta == 1) return perturb_shift(perm, long_move, 1, long_move + run - 1);

    std::vector<std::size_t> untouched;
    for (std::size_t i = 2; i <= n; ++i)
        if (perm(i) == static_cast<int>(i)) untouched.push_back(i);
    if (untouched.size() < n_delta) throw InvalidArgument("synth_good_map: infeasible parameters");

    std::vector<int> map(perm.map().begin(), perm.map().end());
    const auto far = [&](std::size_t a, std::size_t b) {
        return std::abs(static_cast<long long>(a) - static_cast<long long>(b)) > delta_bar;
    };

    // Stage 2: far rotation among n_delta untouched positions.
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::vector<std::size_t> pick = untouched;
        for (std::size_t i = 0; i < n_delta; ++i) std::swap(pick[i], pick[i + rng.below(pick.size() - i)]);
        pick.resize(n_delta);
        std::sort(pick.begin(), pick.end());
        const std::size_t r = n_delta / 2;
        bool ok = true;
        for (std::size_t j = 0; j < n_delta && ok; ++j) ok = far(pick[j], pick[(j + r) % n_delta]);
        if (!ok) continue;
        for (std::size_t j = 0; j < n_delta; ++j) map[pick[j] - 1] = static_cast<int>(pick[(j + r) % n_delta]);
        return Permutation(std::move(map), true);
    }
    throw InvalidArgument("synth_good_map: infeasible parameters");
}

/// Pearson correlation of h(i) with i; negative values indicate a globally
/// reversed ordering.
inline double order_correlation(const Permutation& perm) {
    const auto n = static_cast<double>(perm.size());
    if (perm.size() < 2) return 1.0;
    const double mean = 0.5 * (n + 1.0);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const double x = static_cast<double>(i + 1) - mean;
        const double y = static_cast<double>(perm.map()[i]) - mean;
        sxy += x * y;
        sxx += x * x;
    }
    return sxy / sxx;
}

inline bool is_reversed(const Permutation& perm) { return order_correlation(perm) < 0.0; }

/// Keeps position 1 and reverses positions 2..N.
inline Permutation reverse_after_anchor(const Permutation& perm) {
    std::vector<int> map(perm.map().begin(), perm.map().end());
    std::reverse(map.begin() + 1, map.end());
    return Permutation(std::move(map), perm.anchor_fixed());
}

/// (a then b): result(i) = a(b(i)). Used to express a recovered order in
/// terms of the ground-truth order.
inline Permutation compose(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw InvalidArgument("compose: size mismatch");
    std::vector<int> map(a.size());
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = a.map()[static_cast<std::size_t>(b.map()[i] - 1)];
    return Permutation(std::move(map), a.anchor_fixed() && b.anchor_fixed());
}

inline Permutation inverse(const Permutation& p) {
    std::vector<int> map(p.size());
    for (std::size_t i = 0; i < map.size(); ++i) map[static_cast<std::size_t>(p.map()[i] - 1)] = static_cast<int>(i + 1);
    return Permutation(std::move(map), p.anchor_fixed());
}

inline void write_permutation(const std::filesystem::path& path, const Permutation& p) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << nlohmann::json(std::vector<int>(p.map().begin(), p.map().end())).dump() << '\n';
}

inline Permutation read_permutation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<int> map;
    try {
        map = nlohmann::json::parse(in).get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": expected a JSON integer array: " + e.what());
    }
    try {
        const bool anchored = !map.empty() && map.front() == 1;
        return Permutation(std::move(map), anchored);
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace uvtomo::ordering

#pragma once

// Per-frequency Fourier-ring estimation. For a fixed radius nu the values
// FR(nu, theta) over all projections are samples of a 2 pi-periodic ring
// signal. Projections are placed in the given order and the i-th one
// (1-based) is assigned the angle 2 pi (i - 1) / N; each ring is then
// handed to the QBL estimator with the anchored index convention.

#include <uvtomo/error.hpp>
#include <uvtomo/fourier_series.hpp>
#include <uvtomo/ordering.hpp>
#include <uvtomo/qbl.hpp>
#include <uvtomo/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace uvtomo::tomo {

/// Decay rate of Fourier-ring coefficients beyond their QBL threshold.
inline constexpr double ring_gamma = 0.765;

struct ReconstructionConfig {
    std::optional<double> nu0;            // empty: auto_nu0 at nu0_energy_fraction
    double nu0_energy_fraction = 0.999;
    std::optional<int> k0;                // empty: ceil(ln N / ring_gamma)
    bool cap_ring_k0 = true;              // per-ring cap ceil(2 pi nu r0 / gamma) + margin
    int ring_k0_margin = 2;
    std::optional<std::size_t> spokes;    // M; empty: auto
    std::size_t oversample = 2;
    std::size_t grid = 128;
    std::optional<double> pixel_size;     // empty: grid spans [-r0, r0]

    void validate() const {
        if (nu0 && !(*nu0 > 0.0)) throw InvalidArgument("ReconstructionConfig: nu0 must be positive");
        if (!(nu0_energy_fraction > 0.0 && nu0_energy_fraction <= 1.0))
            throw InvalidArgument("ReconstructionConfig: energy fraction must be in (0, 1]");
        if (k0 && *k0 < 0) throw InvalidArgument("ReconstructionConfig: k0 must be non-negative");
        if (oversample < 1) throw InvalidArgument("ReconstructionConfig: oversample must be >= 1");
        if (grid < 2) throw InvalidArgument("ReconstructionConfig: grid must be >= 2");
        if (pixel_size && !(*pixel_size > 0.0)) throw InvalidArgument("ReconstructionConfig: pixel_size must be positive");
        if (ring_k0_margin < 0) throw InvalidArgument("ReconstructionConfig: ring margin must be non-negative");
    }
};

/// One 2 pi-periodic Fourier series per ring; ring r has radius r * freq_spacing.
struct RingCoeffs {
    std::vector<FourierSeries> rings;
    double freq_spacing = 0.0;
    double nu0 = 0.0;
    int k0 = 0; // global bound; every ring has k0() <= this
    double support_radius = 0.0;

    double nu(std::size_t r) const noexcept { return static_cast<double>(r) * freq_spacing; }
};

/// Global k0 for N projections under the config policy.
inline int global_k0(std::size_t n, const ReconstructionConfig& cfg) {
    if (n < 2) throw InvalidArgument("reconstruction needs at least 2 projections");
    if (cfg.k0) return *cfg.k0;
    return qbl::choose_k0(n, ring_gamma);
}

/// Per-ring bandwidth: ceil(2 pi nu r0 / gamma) + margin, never above the global k0.
inline int ring_k0(double nu, double r0, int global, const ReconstructionConfig& cfg) {
    if (!cfg.cap_ring_k0) return global;
    const double threshold = std::ceil(2.0 * std::numbers::pi * nu * r0 / ring_gamma) + cfg.ring_k0_margin;
    return threshold >= global ? global : static_cast<int>(threshold);
}

inline std::size_t ring_count(const ProjectionSpectra& sp, double nu0) {
    const auto r = static_cast<std::size_t>(std::floor(nu0 / sp.freq_spacing + 1e-9));
    return std::min(r, sp.max_nonneg_bin()) + 1;
}

/// Ring coefficients from projections placed in `order` (order(i) is the
/// 1-based spectra row at position i).
inline RingCoeffs reconstruct_rings(const ProjectionSpectra& sp, const ordering::Permutation& order,
                                    const ReconstructionConfig& cfg) {
    cfg.validate();
    const std::size_t n = sp.num_projections;
    if (order.size() != n) throw InvalidArgument("reconstruct_rings: order size does not match projection count");
    const int k0 = global_k0(n, cfg);
    if (n < static_cast<std::size_t>(2 * k0 + 1))
        throw DomainError("reconstruct_rings: N=" + std::to_string(n) + " too small for k0=" + std::to_string(k0));

    RingCoeffs out;
    out.freq_spacing = sp.freq_spacing;
    out.nu0 = cfg.nu0 ? *cfg.nu0 : auto_nu0(sp, cfg.nu0_energy_fraction);
    out.k0 = k0;
    out.support_radius = sp.support_radius;
    const std::size_t rings = ring_count(sp, out.nu0);
    out.rings.reserve(rings);

    std::vector<cplx> values(n);
    for (std::size_t r = 0; r < rings; ++r) {
        for (std::size_t i = 0; i < n; ++i) values[i] = sp.at(static_cast<std::size_t>(order.map()[i] - 1), r);
        const int kr = ring_k0(out.nu(r), sp.support_radius, k0, cfg);
        out.rings.push_back(
            qbl::estimate_coeffs(qbl::OrderedSampleSet(values, 2.0 * std::numbers::pi), kr, /*first_index=*/0));
    }
    return out;
}

/// Ring coefficients when the true angles are known: trapezoid quadrature
/// over the sorted angles, each sample weighted by half the gap to its two
/// neighbours (cyclically).
inline RingCoeffs reconstruct_rings_known_angles(const ProjectionSpectra& sp, std::span<const double> angles,
                                                 const ReconstructionConfig& cfg) {
    cfg.validate();
    const std::size_t n = sp.num_projections;
    if (angles.size() != n) throw InvalidArgument("reconstruct_rings_known_angles: one angle per projection");
    const int k0 = global_k0(n, cfg);
    if (n < static_cast<std::size_t>(2 * k0 + 1)) throw DomainError("reconstruct_rings_known_angles: N too small for k0");

    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::fmod(std::fmod(angles[i], two_pi) + two_pi, two_pi);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return theta[a] < theta[b]; });
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = i == 0 ? theta[idx[n - 1]] - two_pi : theta[idx[i - 1]];
        const double next = i + 1 == n ? theta[idx[0]] + two_pi : theta[idx[i + 1]];
        weight[i] = 0.5 * (next - prev) / two_pi;
    }

    RingCoeffs out;
    out.freq_spacing = sp.freq_spacing;
    out.nu0 = cfg.nu0 ? *cfg.nu0 : auto_nu0(sp, cfg.nu0_energy_fraction);
    out.k0 = k0;
    out.support_radius = sp.support_radius;
    const std::size_t rings = ring_count(sp, out.nu0);
    for (std::size_t r = 0; r < rings; ++r) {
        const int kr = ring_k0(out.nu(r), sp.support_radius, k0, cfg);
        FourierSeries fs(kr, two_pi);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t p = idx[i];
            const cplx v = sp.at(p, r) * weight[i];
            for (int k = -kr; k <= kr; ++k) fs[k] += v * std::polar(1.0, -k * theta[p]);
        }
        out.rings.push_back(std::move(fs));
    }
    return out;
}

} // namespace uvtomo::tomo

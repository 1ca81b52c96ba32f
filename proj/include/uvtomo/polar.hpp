#pragma once

// Polar spectrum assembly and direct inverse Fourier synthesis from polar
// samples.

#include <uvtomo/error.hpp>
#include <uvtomo/fourier_series.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/rings.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace uvtomo::tomo {

/// Spectrum samples on (ring r) x (spoke m), ring radius r * freq_spacing,
/// spoke angle 2 pi m / M.
struct PolarSpectrum {
    std::size_t num_rings = 0;
    std::size_t spokes = 0; // M
    double freq_spacing = 0.0;
    double nu0 = 0.0;
    double support_radius = 0.0;
    std::vector<cplx> values; // ring-major

    cplx at(std::size_t r, std::size_t m) const { return values[r * spokes + m]; }
    double nu(std::size_t r) const noexcept { return static_cast<double>(r) * freq_spacing; }
    double theta(std::size_t m) const noexcept {
        return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(spokes);
    }
};

/// Makes a ring consistent with a real image: the value at theta + pi becomes
/// the conjugate of the value at theta. On coefficients this is
/// a_k <- (a_k + (-1)^k conj(a_-k)) / 2. Applying it twice changes nothing.
inline FourierSeries hermitian_symmetrize(const FourierSeries& ring) {
    FourierSeries out(ring.k0(), ring.period());
    for (int k = -ring.k0(); k <= ring.k0(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out[k] = 0.5 * (ring[k] + sign * std::conj(ring[-k]));
    }
    return out;
}

/// Spokes needed so that the angular quadrature in inverse_polar_ft is exact
/// for the reconstructed bandwidth: at least 2 k0 + 1 and above
/// k0 + 2 pi nu0 r0 with some slack; always even.
inline std::size_t auto_spokes(int k0, double nu0, double support_radius) {
    const double need = std::max(2.0 * k0 + 1.0, k0 + 2.0 * std::numbers::pi * nu0 * support_radius + 8.0);
    auto m = static_cast<std::size_t>(std::ceil(need));
    if (m % 2 == 1) ++m;
    return std::max<std::size_t>(m, 4 * static_cast<std::size_t>(k0));
}

/// values[r][m] = sum_k a'_k(nu_r) exp(j k 2 pi m / M), with a' the
/// Hermitian-symmetrized ring coefficients. The zero-frequency ring is a
/// single point shared by every angle; it keeps only the real part of a_0.
inline PolarSpectrum evaluate_polar(const RingCoeffs& rings, std::size_t spokes) {
    int kmax = 0;
    for (const auto& r : rings.rings) kmax = std::max(kmax, r.k0());
    if (spokes < static_cast<std::size_t>(2 * kmax + 1))
        throw InvalidArgument("evaluate_polar: need at least 2*k0+1 spokes");
    PolarSpectrum ps;
    ps.num_rings = rings.rings.size();
    ps.spokes = spokes;
    ps.freq_spacing = rings.freq_spacing;
    ps.nu0 = rings.nu0;
    ps.support_radius = rings.support_radius;
    ps.values.assign(ps.num_rings * spokes, cplx{});

    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(spokes);
    for (std::size_t r = 0; r < ps.num_rings; ++r) {
        cplx* row = ps.values.data() + r * spokes;
        if (r == 0) {
            std::fill(row, row + spokes, cplx(rings.rings[0][0].real(), 0.0));
            continue;
        }
        const FourierSeries sym = hermitian_symmetrize(rings.rings[r]);
        for (std::size_t m = 0; m < spokes; ++m) {
            const double th = dtheta * static_cast<double>(m);
            cplx acc{};
            for (int k = -sym.k0(); k <= sym.k0(); ++k) acc += sym[k] * std::polar(1.0, k * th);
            row[m] = acc;
        }
    }
    return ps;
}

/// Quadrature weight of one polar sample on ring r: the area of the ring's
/// annulus cell (clipped to the disc of radius nu0) divided by M. The
/// zero-frequency ring owns the disc of radius freq_spacing / 2.
inline double polar_weight(const PolarSpectrum& ps, std::size_t r) {
    const double dnu = ps.freq_spacing;
    const double inner = r == 0 ? 0.0 : (static_cast<double>(r) - 0.5) * dnu;
    double outer = (static_cast<double>(r) + 0.5) * dnu;
    if (r + 1 == ps.num_rings && r > 0) outer = std::min(outer, std::max(ps.nu0, ps.nu(r)));
    return std::numbers::pi * (outer * outer - inner * inner) / static_cast<double>(ps.spokes);
}

struct InverseOptions {
    std::size_t grid = 128;
    std::optional<double> pixel_size; // empty: grid spans [-r0, r0]
    bool mask_to_support = true;
};

/// f(x, y) = Re sum_{r, m} w_r V[r][m] exp(j 2 pi nu_r (x cos theta_m + y sin theta_m))
/// evaluated at the pixel centres of a grid x grid image, then zeroed beyond
/// the support radius. The exponential factors separately in x and y, so
/// each spoke costs O(grid) exponentials plus O(grid^2) multiply-adds.
inline Image2D inverse_polar_ft(const PolarSpectrum& ps, const InverseOptions& opt) {
    if (opt.grid < 2) throw InvalidArgument("inverse_polar_ft: grid must be >= 2");
    const double px = opt.pixel_size ? *opt.pixel_size : 2.0 * ps.support_radius / static_cast<double>(opt.grid);
    if (!(px > 0.0)) throw InvalidArgument("inverse_polar_ft: pixel size must be positive");
    const std::size_t g = opt.grid;
    Image2D geom(g, g, px);
    std::vector<double> coord(g);
    for (std::size_t j = 0; j < g; ++j) coord[j] = geom.x_of(j);

    std::vector<double> acc(g * g, 0.0);
    std::vector<cplx> ex(g), ey(g);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t r = 0; r < ps.num_rings; ++r) {
        const double w = polar_weight(ps, r);
        const double nu = ps.nu(r);
        // The zero ring is the same point on every spoke.
        const std::size_t spokes = r == 0 ? 1 : ps.spokes;
        const double wr = r == 0 ? w * static_cast<double>(ps.spokes) : w;
        for (std::size_t m = 0; m < spokes; ++m) {
            const cplx v = wr * ps.at(r, m);
            if (v == cplx{}) continue;
            const double c = std::cos(ps.theta(m)), s = std::sin(ps.theta(m));
            for (std::size_t j = 0; j < g; ++j) {
                ex[j] = std::polar(1.0, two_pi * nu * coord[j] * c);
                ey[j] = v * std::polar(1.0, two_pi * nu * coord[j] * s);
            }
            for (std::size_t i = 0; i < g; ++i) {
                const double ar = ey[i].real(), ai = ey[i].imag();
                double* row = acc.data() + i * g;
                for (std::size_t j = 0; j < g; ++j) row[j] += ar * ex[j].real() - ai * ex[j].imag();
            }
        }
    }
    Image2D out(g, g, px, std::move(acc));
    return opt.mask_to_support ? out.masked(ps.support_radius) : out;
}

} // namespace uvtomo::tomo

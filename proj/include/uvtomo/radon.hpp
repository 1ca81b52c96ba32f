#pragma once

#include <uvtomo/error.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/rng.hpp>
#include <uvtomo/sinogram.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace uvtomo::tomo {

namespace detail {

/// Bilinear interpolation of the pixel grid at physical (x, y); zero outside.
inline double bilinear(const Image2D& img, double x, double y) {
    const double cx = x / img.pixel_size() + 0.5 * static_cast<double>(img.width() - 1);
    const double cy = y / img.pixel_size() + 0.5 * static_cast<double>(img.height() - 1);
    const double fx = std::floor(cx), fy = std::floor(cy);
    const long j0 = static_cast<long>(fx), i0 = static_cast<long>(fy);
    const double tx = cx - fx, ty = cy - fy;
    const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
    auto at = [&](long i, long j) {
        return (i < 0 || j < 0 || i >= h || j >= w) ? 0.0
                                                     : img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    return (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0, j0 + 1)) +
           ty * ((1 - tx) * at(i0 + 1, j0) + tx * at(i0 + 1, j0 + 1));
}

} // namespace detail

/// Half-width of the offset axis used for an image: its support radius plus
/// 1.5 pixels, enough to contain the bilinear footprint of every non-zero
/// pixel.
inline double radon_extent(const Image2D& img) { return img.support_radius() + 1.5 * img.pixel_size(); }

/// Line integrals R(rho, theta) = integral of f along x cos(theta) + y sin(theta) = rho.
///
/// The image is treated as its bilinear interpolant; each line is sampled
/// with step pixel_size / 2 (trapezoid rule). `bins` offsets are spread
/// uniformly over [-radon_extent, radon_extent]. Row p of the result holds
/// the projection at angles[p]; the angles are stored on the sinogram.
inline Sinogram radon(const Image2D& img, std::span<const double> angles, std::size_t bins) {
    if (angles.empty()) throw InvalidArgument("radon: no angles");
    if (bins < 2) throw InvalidArgument("radon: need at least 2 bins");
    const double extent = radon_extent(img);
    const double drho = 2.0 * extent / static_cast<double>(bins - 1);
    const double ds = 0.5 * img.pixel_size();
    std::vector<double> data(angles.size() * bins, 0.0);
    for (std::size_t p = 0; p < angles.size(); ++p) {
        const double c = std::cos(angles[p]), s = std::sin(angles[p]);
        for (std::size_t b = 0; b < bins; ++b) {
            const double rho = (static_cast<double>(b) - 0.5 * static_cast<double>(bins - 1)) * drho;
            const double half = extent * extent - rho * rho;
            if (half <= 0.0) continue;
            const auto steps = static_cast<long>(std::ceil(std::sqrt(half) / ds));
            double acc = 0.0;
            for (long q = -steps; q <= steps; ++q) {
                const double t = static_cast<double>(q) * ds;
                acc += detail::bilinear(img, rho * c - t * s, rho * s + t * c);
            }
            data[p * bins + b] = acc * ds;
        }
    }
    Sinogram out(angles.size(), bins, drho, std::move(data));
    out.set_support_radius(std::min(extent, std::max(img.support_radius(), drho)));
    out.set_angles(std::vector<double>(angles.begin(), angles.end()));
    return out;
}

/// theta_1 = 0 and N-1 sorted Uniform(0, 2 pi) draws: the anchored angle set.
inline std::vector<double> draw_anchored_angles(std::size_t n, RngSeed seed) {
    if (n == 0) throw InvalidArgument("draw_anchored_angles: n must be positive");
    std::vector<double> out{0.0};
    if (n == 1) return out;
    auto rest = sample_sorted_uniform(n - 1, 0.0, 2.0 * std::numbers::pi, seed);
    for (double& t : rest)
        if (t == 0.0) t = std::nextafter(0.0, 1.0);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

/// Mean of |value| over every bin of every projection.
inline double mean_abs(const Sinogram& s) {
    double acc = 0.0;
    for (double v : s.data()) acc += std::abs(v);
    return acc / static_cast<double>(s.data().size());
}

/// Adds i.i.d. N(0, sigma^2) to every bin, sigma = sigma_rel * mean |noiseless value|.
inline Sinogram add_projection_noise(const Sinogram& s, double sigma_rel, RngSeed seed) {
    if (!(sigma_rel >= 0.0)) throw InvalidArgument("add_projection_noise: sigma_rel must be non-negative");
    if (sigma_rel == 0.0) return s;
    const double sigma = sigma_rel * mean_abs(s);
    std::vector<double> data(s.data().begin(), s.data().end());
    Rng rng(seed);
    for (double& v : data) v += sigma * rng.normal();
    Sinogram out(s.num_projections(), s.num_bins(), s.bin_spacing(), std::move(data));
    if (s.has_support_radius()) out.set_support_radius(s.support_radius());
    if (s.angles()) out.set_angles(*s.angles());
    return out;
}

/// max over projections of | sum_rho R * drho - sum f * px^2 | / | sum f * px^2 |.
inline double mass_conservation_residual(const Image2D& img, const Sinogram& s) {
    const double mass = img.sum() * img.pixel_size() * img.pixel_size();
    double worst = 0.0;
    for (std::size_t p = 0; p < s.num_projections(); ++p) {
        double acc = 0.0;
        for (double v : s.row(p)) acc += v;
        worst = std::max(worst, std::abs(acc * s.bin_spacing() - mass));
    }
    return mass == 0.0 ? worst : worst / std::abs(mass);
}

} // namespace uvtomo::tomo

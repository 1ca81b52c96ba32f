#pragma once

// Reference spectra of pixel images and the checks built on them: Fourier
// slice agreement, exact ring coefficients, disc truncation and the Sobolev
// tail statistics.

#include <uvtomo/error.hpp>
#include <uvtomo/fft.hpp>
#include <uvtomo/fourier_series.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/radon.hpp>
#include <uvtomo/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace uvtomo::tomo {

/// Continuous Fourier transform of the pixel image treated as point masses
/// of weight f * px^2 at the pixel centres:
///   FT(u, v) = px^2 sum_{i,j} f_ij exp(-j 2 pi (u x_j + v y_i)).
inline cplx ft_at(const Image2D& img, double u, double v) {
    const double two_pi = 2.0 * std::numbers::pi;
    cplx total{};
    std::vector<cplx> ex(img.width());
    for (std::size_t j = 0; j < img.width(); ++j) ex[j] = std::polar(1.0, -two_pi * u * img.x_of(j));
    for (std::size_t i = 0; i < img.height(); ++i) {
        cplx row{};
        for (std::size_t j = 0; j < img.width(); ++j) {
            const double f = img(i, j);
            if (f != 0.0) row += f * ex[j];
        }
        total += row * std::polar(1.0, -two_pi * v * img.y_of(i));
    }
    return total * img.pixel_size() * img.pixel_size();
}

/// Angular Fourier coefficients of the ring FT(nu cos t, nu sin t), computed
/// from `samples` equispaced evaluations of ft_at (period 2 pi).
inline FourierSeries exact_ring_coeffs(const Image2D& img, double nu, int k0, std::size_t samples) {
    if (samples < static_cast<std::size_t>(2 * k0 + 1)) throw InvalidArgument("exact_ring_coeffs: too few samples");
    std::vector<cplx> values(samples);
    for (std::size_t m = 0; m < samples; ++m) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(samples);
        values[m] = ft_at(img, nu * std::cos(t), nu * std::sin(t));
    }
    return analyze_uniform(values, k0, 2.0 * std::numbers::pi);
}

struct SliceCheck {
    double angle = 0.0;
    double relative_l2 = 0.0;
};

/// Compares each projection spectrum with the 2D transform of the image along
/// the same direction, over the non-negative frequency bins up to the pixel
/// Nyquist limit 1 / (2 px). Returns one relative L2 error per angle.
inline std::vector<SliceCheck> fourier_slice_check(const Image2D& img, std::span<const double> angles, std::size_t bins,
                                                   std::size_t oversample = 2) {
    const Sinogram s = radon(img, angles, bins);
    const ProjectionSpectra sp = project_spectra(s, oversample);
    const double nyquist = 0.5 / img.pixel_size();
    std::vector<SliceCheck> out;
    out.reserve(angles.size());
    for (std::size_t p = 0; p < angles.size(); ++p) {
        const double c = std::cos(angles[p]), sn = std::sin(angles[p]);
        double num = 0.0, den = 0.0;
        for (std::size_t f = 0; f <= sp.max_nonneg_bin(); ++f) {
            const double nu = sp.nu(f);
            if (nu > nyquist) break;
            const cplx ref = ft_at(img, nu * c, nu * sn);
            num += std::norm(sp.at(p, f) - ref);
            den += std::norm(ref);
        }
        out.push_back({angles[p], den > 0.0 ? std::sqrt(num / den) : std::sqrt(num)});
    }
    return out;
}

/// The image with every 2D DFT component of radius > nu0 removed. Bin (k, l)
/// has frequency (signed(l) / (W px), signed(k) / (H px)).
inline Image2D disc_truncate(const Image2D& img, double nu0) {
    const std::size_t h = img.height(), w = img.width();
    auto spec = fft::dft2(img.pixels(), h, w);
    const double du = 1.0 / (static_cast<double>(w) * img.pixel_size());
    const double dv = 1.0 / (static_cast<double>(h) * img.pixel_size());
    for (std::size_t k = 0; k < h; ++k) {
        const double v = static_cast<double>(fft::signed_bin(k, h)) * dv;
        for (std::size_t l = 0; l < w; ++l) {
            const double u = static_cast<double>(fft::signed_bin(l, w)) * du;
            if (u * u + v * v > nu0 * nu0) spec[k * w + l] = 0.0;
        }
    }
    fft::Plan(h, w, fft::Direction::backward).execute(spec);
    std::vector<double> pix(h * w);
    const double scale = 1.0 / static_cast<double>(h * w);
    for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = spec[i].real() * scale;
    return Image2D(w, h, img.pixel_size(), std::move(pix));
}

struct SobolevStats {
    double alpha = 0.0;
    double norm_alpha_sq = 0.0;                        // (1/2pi) sum (1+|nu|^2)^alpha |FT|^2 du dv
    std::vector<std::pair<double, double>> tail_energy; // (nu0, e_f(nu0))
    std::vector<double> bound;                          // nu0^(-2 alpha) * norm_alpha_sq, same order

    std::size_t violations() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < tail_energy.size(); ++i)
            if (tail_energy[i].second > bound[i]) ++n;
        return n;
    }
};

/// Discrete Sobolev statistics from the 2D DFT, with FT = px^2 * DFT on the
/// grid of spacing 1 / (W px) by 1 / (H px).
inline SobolevStats sobolev_tail(const Image2D& img, double alpha, std::span<const double> nu0_list) {
    if (!(alpha >= 0.0)) throw InvalidArgument("sobolev_tail: alpha must be non-negative");
    const std::size_t h = img.height(), w = img.width();
    const auto spec = fft::dft2(img.pixels(), h, w);
    const double px2 = img.pixel_size() * img.pixel_size();
    const double du = 1.0 / (static_cast<double>(w) * img.pixel_size());
    const double dv = 1.0 / (static_cast<double>(h) * img.pixel_size());
    const double cell = du * dv / (2.0 * std::numbers::pi);

    SobolevStats out;
    out.alpha = alpha;
    std::vector<double> tails(nu0_list.size(), 0.0);
    for (std::size_t k = 0; k < h; ++k) {
        const double v = static_cast<double>(fft::signed_bin(k, h)) * dv;
        for (std::size_t l = 0; l < w; ++l) {
            const double u = static_cast<double>(fft::signed_bin(l, w)) * du;
            const double r2 = u * u + v * v;
            const double e = std::norm(spec[k * w + l] * px2) * cell;
            out.norm_alpha_sq += std::pow(1.0 + r2, alpha) * e;
            for (std::size_t q = 0; q < nu0_list.size(); ++q)
                if (r2 > nu0_list[q] * nu0_list[q]) tails[q] += e;
        }
    }
    for (std::size_t q = 0; q < nu0_list.size(); ++q) {
        if (!(nu0_list[q] > 0.0)) throw InvalidArgument("sobolev_tail: nu0 must be positive");
        out.tail_energy.emplace_back(nu0_list[q], tails[q]);
        out.bound.push_back(std::pow(nu0_list[q], -2.0 * alpha) * out.norm_alpha_sq);
    }
    return out;
}

} // namespace uvtomo::tomo

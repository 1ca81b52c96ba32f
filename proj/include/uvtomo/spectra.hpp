#pragma once

#include <uvtomo/error.hpp>
#include <uvtomo/fft.hpp>
#include <uvtomo/sinogram.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace uvtomo::tomo {

using cplx = std::complex<double>;

/// Zero-padded DFT of every projection, one row per projection, bins in
/// FFT order (bin f holds frequency signed_bin(f, F) * freq_spacing).
struct ProjectionSpectra {
    std::size_t num_projections = 0;
    std::size_t num_freqs = 0; // F = oversample * B
    std::size_t oversample = 1;
    double freq_spacing = 0.0; // 1 / (F * bin_spacing)
    double support_radius = 0.0;
    std::vector<cplx> data;

    std::span<const cplx> row(std::size_t p) const { return {data.data() + p * num_freqs, num_freqs}; }
    cplx at(std::size_t p, std::size_t f) const { return data[p * num_freqs + f]; }
    double nu(std::size_t f) const { return static_cast<double>(fft::signed_bin(f, num_freqs)) * freq_spacing; }
    /// Index of the largest non-negative frequency bin.
    std::size_t max_nonneg_bin() const noexcept { return (num_freqs - 1) / 2; }
};

/// FR(nu) = sum_b R_b exp(-j 2 pi nu rho_b) * bin_spacing, evaluated at
/// nu_f = f / (F * bin_spacing) through an F-point FFT of the zero-padded
/// row. The phase is referenced to rho = 0 (the centre bin), not bin 0.
inline ProjectionSpectra project_spectra(const Sinogram& s, std::size_t oversample) {
    if (oversample < 1) throw InvalidArgument("project_spectra: oversample must be >= 1");
    const std::size_t b = s.num_bins();
    const std::size_t f = oversample * b;
    ProjectionSpectra out;
    out.num_projections = s.num_projections();
    out.num_freqs = f;
    out.oversample = oversample;
    out.freq_spacing = 1.0 / (static_cast<double>(f) * s.bin_spacing());
    out.support_radius = s.support_radius();
    out.data.assign(out.num_projections * f, cplx{});

    // rho_b = (b - c) * drho with c = (B - 1) / 2, so the reference shift is
    // a factor exp(+j 2 pi f_signed c / F) per frequency bin.
    const double c = 0.5 * static_cast<double>(b - 1);
    std::vector<cplx> shift(f);
    for (std::size_t k = 0; k < f; ++k) {
        const double fs = static_cast<double>(fft::signed_bin(k, f));
        shift[k] = s.bin_spacing() * std::polar(1.0, 2.0 * std::numbers::pi * fs * c / static_cast<double>(f));
    }

    fft::Plan plan(f, fft::Direction::forward);
    std::vector<cplx> buf(f);
    for (std::size_t p = 0; p < out.num_projections; ++p) {
        std::fill(buf.begin(), buf.end(), cplx{});
        const auto r = s.row(p);
        for (std::size_t i = 0; i < b; ++i) buf[i] = r[i];
        plan.execute(buf);
        cplx* dst = out.data.data() + p * f;
        for (std::size_t k = 0; k < f; ++k) dst[k] = buf[k] * shift[k];
    }
    // For even F the Nyquist bin stands for both +F/2 and -F/2; averaging the
    // two reference shifts keeps it real, as conjugate symmetry requires.
    if (f % 2 == 0) {
        const double phi = std::numbers::pi * c;
        for (std::size_t p = 0; p < out.num_projections; ++p) {
            auto& v = out.data[p * f + f / 2];
            v = v / shift[f / 2] * (s.bin_spacing() * std::cos(phi));
        }
    }
    return out;
}

/// Smallest ring radius nu0 (a multiple of freq_spacing) enclosing `fraction`
/// of the image spectral energy estimated from the projections. By the
/// Fourier slice theorem the 2D energy inside radius nu is
/// (1/2) * integral over theta of integral_{|n| < nu} |FR(n, theta)|^2 |n| dn,
/// so ring r carries mean_p |FR_p(nu_r)|^2 times its annulus weight.
inline double auto_nu0(const ProjectionSpectra& sp, double fraction = 0.999) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("auto_nu0: fraction must be in (0, 1]");
    const std::size_t rmax = sp.max_nonneg_bin();
    std::vector<double> ring(rmax + 1, 0.0);
    for (std::size_t r = 0; r <= rmax; ++r) {
        double acc = 0.0;
        for (std::size_t p = 0; p < sp.num_projections; ++p) acc += std::norm(sp.at(p, r));
        const double weight = r == 0 ? 0.125 : static_cast<double>(r);
        ring[r] = weight * acc / static_cast<double>(sp.num_projections);
    }
    double total = 0.0;
    for (double e : ring) total += e;
    if (total <= 0.0) return sp.freq_spacing;
    double cum = 0.0;
    for (std::size_t r = 0; r <= rmax; ++r) {
        cum += ring[r];
        if (cum >= fraction * total) return std::max<double>(1.0, static_cast<double>(r)) * sp.freq_spacing;
    }
    return static_cast<double>(rmax) * sp.freq_spacing;
}

} // namespace uvtomo::tomo

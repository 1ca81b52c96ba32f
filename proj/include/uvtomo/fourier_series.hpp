#pragma once

#include <uvtomo/error.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace uvtomo {

using cplx = std::complex<double>;

/// A periodic function given by a callable. `eval` must satisfy
/// eval(t) == eval(t + period).
struct PeriodicSignal {
    double period = 1.0;
    std::function<cplx(double)> eval;
};

/// Truncated Fourier series  sum_{|k| <= k0} c_k exp(j 2 pi k t / period).
/// Coefficients are stored contiguously for k = -k0 .. k0; index 0 of the
/// series sits at offset k0 in the array.
class FourierSeries {
public:
    FourierSeries() = default;

    FourierSeries(int k0, double period) : k0_(k0), period_(period) {
        detail::require(k0 >= 0, "FourierSeries: k0 must be non-negative");
        detail::require(period > 0.0, "FourierSeries: period must be positive");
        coeffs_.resize(static_cast<std::size_t>(2 * k0 + 1));
    }

    FourierSeries(int k0, double period, std::vector<cplx> coeffs) : FourierSeries(k0, period) {
        detail::require(coeffs.size() == coeffs_.size(), "FourierSeries: need 2*k0+1 coefficients");
        coeffs_ = std::move(coeffs);
    }

    int k0() const noexcept { return k0_; }
    double period() const noexcept { return period_; }
    std::span<const cplx> coeffs() const noexcept { return coeffs_; }
    std::span<cplx> coeffs() noexcept { return coeffs_; }

    bool contains(int k) const noexcept { return k >= -k0_ && k <= k0_; }

    cplx& operator[](int k) { return coeffs_[static_cast<std::size_t>(k + k0_)]; }
    const cplx& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k + k0_)]; }

    /// Coefficient k, or zero outside the stored band.
    cplx at_or_zero(int k) const noexcept { return contains(k) ? (*this)[k] : cplx{}; }

    double energy() const noexcept {
        double e = 0.0;
        for (const auto& c : coeffs_) e += std::norm(c);
        return e;
    }

private:
    int k0_ = 0;
    double period_ = 1.0;
    std::vector<cplx> coeffs_ = std::vector<cplx>(1);
};

inline cplx synthesize(const FourierSeries& fs, double t) {
    const double w = 2.0 * std::numbers::pi * t / fs.period();
    cplx acc{};
    for (int k = -fs.k0(); k <= fs.k0(); ++k) acc += fs[k] * std::polar(1.0, w * k);
    return acc;
}

/// Fourier coefficients from M uniform samples s_m = g(m * period / M).
/// Exact for series with bandwidth k0 whenever M >= 2*k0 + 1.
inline FourierSeries analyze_uniform(std::span<const cplx> samples, int k0, double period) {
    const auto m = samples.size();
    if (m < static_cast<std::size_t>(2 * k0 + 1))
        throw DomainError("analyze_uniform: need at least 2*k0+1 samples");
    FourierSeries fs(k0, period);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(m);
    for (int k = -k0; k <= k0; ++k) {
        cplx acc{};
        for (std::size_t i = 0; i < m; ++i) {
            // reduce k*i mod m before scaling to keep the phase argument small
            const auto ki = static_cast<long long>(k) * static_cast<long long>(i) % static_cast<long long>(m);
            acc += samples[i] * std::polar(1.0, step * static_cast<double>(ki));
        }
        fs[k] = acc / static_cast<double>(m);
    }
    return fs;
}

inline std::vector<cplx> sample_uniform(const PeriodicSignal& g, std::size_t m) {
    std::vector<cplx> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = g.eval(g.period * static_cast<double>(i) / static_cast<double>(m));
    return out;
}

/// L2 distance over one period, normalised so that Parseval reads
/// ||f - g||^2 = sum_k |f_k - g_k|^2. Missing coefficients count as zero.
inline double l2_distance_periodic(const FourierSeries& f, const FourierSeries& g) {
    if (f.period() != g.period()) throw InvalidArgument("l2_distance_periodic: period mismatch");
    const int kmax = std::max(f.k0(), g.k0());
    double acc = 0.0;
    for (int k = -kmax; k <= kmax; ++k) acc += std::norm(f.at_or_zero(k) - g.at_or_zero(k));
    return std::sqrt(acc);
}

} // namespace uvtomo

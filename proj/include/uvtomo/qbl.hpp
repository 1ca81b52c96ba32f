#pragma once

// Reconstruction of quasi-bandlimited (QBL) periodic signals from samples
// taken at unknown, uniformly distributed locations. The samples arrive in
// a claimed order (possibly wrong) and possibly with additive noise; the
// estimator assigns the i-th sample to location i*period/N and takes a
// Riemann-sum Fourier coefficient.

#include <uvtomo/error.hpp>
#include <uvtomo/fourier_series.hpp>
#include <uvtomo/rng.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uvtomo::qbl {

/// |a_k| <= d * exp(-gamma |k|) for all |k| >= k1.
struct QblParams {
    int k1 = 0;
    double gamma = 1.0;
    double d = 1.0;

    void validate() const {
        if (k1 < 0) throw InvalidArgument("QblParams: k1 must be non-negative");
        if (!(gamma > 0.0)) throw InvalidArgument("QblParams: gamma must be positive");
        if (!(d >= 0.0)) throw InvalidArgument("QblParams: d must be non-negative");
    }
};

/// Sample values in claimed order. Assumed locations are Uniform[0, period).
struct OrderedSampleSet {
    std::vector<cplx> values;
    double period = 1.0;

    OrderedSampleSet() = default;
    OrderedSampleSet(std::vector<cplx> v, double p) : values(std::move(v)), period(p) { validate(); }

    std::size_t size() const noexcept { return values.size(); }

    void validate() const {
        if (values.empty()) throw InvalidArgument("OrderedSampleSet: no samples");
        if (!(period > 0.0)) throw InvalidArgument("OrderedSampleSet: period must be positive");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw InvalidArgument("OrderedSampleSet: non-finite sample");
    }
};

/// Zero-mean i.i.d. Gaussian noise with standard deviation sigma.
struct NoiseSpec {
    double sigma = 0.0;
};

using WarningSink = std::function<void(std::string_view)>;

/// Largest k0 for which the N-point estimator does not alias.
constexpr int max_alias_free_k0(std::size_t n) noexcept { return n == 0 ? 0 : static_cast<int>((n - 1) / 2); }

/// k0 = ceil(ln N / gamma), clamped to floor((N-1)/2).
inline int choose_k0(std::size_t n, double gamma) {
    if (n < 2) throw InvalidArgument("choose_k0: need at least 2 samples");
    if (!(gamma > 0.0)) throw InvalidArgument("choose_k0: gamma must be positive");
    const double raw = std::ceil(std::log(static_cast<double>(n)) / gamma);
    const int cap = max_alias_free_k0(n);
    return raw > cap ? cap : static_cast<int>(raw);
}

/// abar_k = (1/N) sum_i values[i] exp(-j 2 pi k (i + first_index) / N), |k| <= k0.
///
/// `first_index` selects the location of the first sample: 1 places it at
/// period/N, 0 places it at the origin (the anchored convention used for
/// Fourier rings). The two differ by a per-coefficient phase only.
inline FourierSeries estimate_coeffs(const OrderedSampleSet& samples, int k0, int first_index = 1) {
    samples.validate();
    const auto n = samples.size();
    if (k0 < 0) throw InvalidArgument("estimate_coeffs: k0 must be non-negative");
    if (k0 > max_alias_free_k0(n))
        throw DomainError("estimate_coeffs: k0=" + std::to_string(k0) + " aliases with N=" + std::to_string(n));
    FourierSeries fs(k0, samples.period);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    const auto nn = static_cast<long long>(n);
    for (int k = -k0; k <= k0; ++k) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) {
            const long long phase = (static_cast<long long>(k) * (static_cast<long long>(i) + first_index)) % nn;
            acc += samples.values[i] * std::polar(1.0, step * static_cast<double>(phase));
        }
        fs[k] = acc / static_cast<double>(n);
    }
    return fs;
}

/// True when N > exp(gamma * k1), the regime where the error bound applies.
inline bool meets_sample_threshold(std::size_t n, const QblParams& qbl) {
    return std::log(static_cast<double>(n)) > qbl.gamma * qbl.k1;
}

/// Full estimator: k0 = choose_k0(N, gamma), then estimate_coeffs. Covers
/// the noiseless / perfectly ordered cases as special inputs. Below the
/// sample threshold a warning is emitted and the estimate is still returned.
inline FourierSeries reconstruct_p3(const OrderedSampleSet& samples, const QblParams& qbl,
                                    const WarningSink& warn = {}) {
    qbl.validate();
    if (samples.values.empty()) throw InvalidArgument("reconstruct_p3: no samples");
    const auto n = samples.size();
    if (warn && !meets_sample_threshold(n, qbl))
        warn("reconstruct_p3: N=" + std::to_string(n) + " does not exceed exp(gamma*k1); bound not guaranteed");
    if (n < 2) return estimate_coeffs(samples, 0);
    return estimate_coeffs(samples, choose_k0(n, qbl.gamma));
}

/// Upper bound 2 d^2 exp(-2 gamma k0) / (1 - exp(-2 gamma)) on the energy
/// sum_{|k| > k0} |a_k|^2 of a QBL signal.
inline double bandlimit_tail_energy(const QblParams& qbl, int k0) {
    qbl.validate();
    if (k0 < qbl.k1) throw DomainError("bandlimit_tail_energy: k0 below k1");
    return 2.0 * qbl.d * qbl.d * std::exp(-2.0 * qbl.gamma * k0) / (1.0 - std::exp(-2.0 * qbl.gamma));
}

/// values[i] + eps_i with eps_i ~ N(0, sigma^2) i.i.d., real-valued.
inline OrderedSampleSet add_sample_noise(const OrderedSampleSet& samples, NoiseSpec spec, RngSeed seed) {
    if (!(spec.sigma >= 0.0)) throw InvalidArgument("add_sample_noise: sigma must be non-negative");
    OrderedSampleSet out = samples;
    if (spec.sigma == 0.0) return out;
    Rng rng(seed);
    for (auto& v : out.values) v += spec.sigma * rng.normal();
    return out;
}

/// Test signal with a_k = d * exp(-gamma |k|) for |k| <= kmax.
inline FourierSeries exponential_decay_series(const QblParams& qbl, int kmax, double period = 1.0) {
    FourierSeries fs(kmax, period);
    for (int k = -kmax; k <= kmax; ++k) fs[k] = qbl.d * std::exp(-qbl.gamma * std::abs(k));
    return fs;
}

/// Samples g(t_{map[i]}) for sorted locations t and a 1-based map; an empty
/// map means the identity order.
inline OrderedSampleSet observe(const FourierSeries& g, std::span<const double> locations,
                                std::span<const int> map = {}) {
    if (locations.empty()) throw InvalidArgument("observe: no locations");
    if (!map.empty() && map.size() != locations.size()) throw InvalidArgument("observe: map size mismatch");
    std::vector<cplx> v(locations.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t src = map.empty() ? i : static_cast<std::size_t>(map[i] - 1);
        v[i] = synthesize(g, locations[src]);
    }
    return OrderedSampleSet(std::move(v), g.period());
}

} // namespace uvtomo::qbl

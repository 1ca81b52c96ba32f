#include <uvtomo/diagnostics.hpp>
#include <uvtomo/phantom.hpp>
#include <uvtomo/reconstruct.hpp>
#include <uvtomo/rings.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace uvtomo;
using namespace uvtomo::tomo;

namespace {

ProjectionSpectra spectra_of(const Image2D& f, std::size_t n, std::uint64_t seed, std::size_t bins) {
    return project_spectra(radon(f, draw_anchored_angles(n, RngSeed{seed}), bins), 2);
}

} // namespace

TEST(RingK0, CapAndGlobal) {
    ReconstructionConfig cfg;
    EXPECT_EQ(global_k0(10000, cfg), 13);
    cfg.k0 = 4;
    EXPECT_EQ(global_k0(10000, cfg), 4);
    EXPECT_THROW(global_k0(1, cfg), InvalidArgument);

    ReconstructionConfig c2;
    EXPECT_EQ(ring_k0(0.0, 1.0, 13, c2), 2);
    EXPECT_EQ(ring_k0(0.5, 0.9, 13, c2), static_cast<int>(std::ceil(2 * std::numbers::pi * 0.5 * 0.9 / 0.765)) + 2);
    EXPECT_EQ(ring_k0(10.0, 0.9, 13, c2), 13);
    c2.cap_ring_k0 = false;
    EXPECT_EQ(ring_k0(0.0, 1.0, 13, c2), 13);
}

TEST(Rings, PerRingBandwidthNeverExceedsGlobal) {
    const auto f = phantom::default_phantom(64);
    const auto sp = spectra_of(f, 300, 1, 64);
    const auto rings = reconstruct_rings(sp, ordering::Permutation::identity(300), {});
    ASSERT_FALSE(rings.rings.empty());
    EXPECT_EQ(rings.k0, qbl::choose_k0(300, ring_gamma));
    for (const auto& r : rings.rings) {
        EXPECT_LE(r.k0(), rings.k0);
        EXPECT_DOUBLE_EQ(r.period(), 2 * std::numbers::pi);
    }
    EXPECT_EQ(rings.rings.front().k0(), 2);
    EXPECT_LE(rings.nu(rings.rings.size() - 1), rings.nu0 + 1e-12);
}

TEST(Rings, TooFewProjections) {
    const auto f = phantom::default_phantom(32);
    const auto sp = spectra_of(f, 9, 1, 32);
    ReconstructionConfig cfg;
    cfg.k0 = 5;
    EXPECT_THROW(reconstruct_rings(sp, ordering::Permutation::identity(9), cfg), DomainError);
    EXPECT_THROW(reconstruct_rings(sp, ordering::Permutation::identity(8), ReconstructionConfig{}), InvalidArgument);
}

TEST(Rings, CentredBlobHasOnlyDcHarmonic) {
    const auto f = phantom::gaussian_mixture(128, 2.0, {{0.0, 0.0, 0.15, 1.0}}, 0.9);
    const std::size_t n = 400;
    const auto sp = spectra_of(f, n, 3, 128);
    const auto rings = reconstruct_rings(sp, ordering::Permutation::identity(n), {});
    double peak = 0.0;
    for (const auto& r : rings.rings) peak = std::max(peak, std::abs(r[0]));
    for (std::size_t ri = 0; ri < rings.rings.size(); ++ri) {
        const auto& r = rings.rings[ri];
        cplx mean{};
        for (std::size_t p = 0; p < n; ++p) mean += sp.at(p, ri);
        EXPECT_NEAR(std::abs(r[0] - mean / static_cast<double>(n)), 0.0, 1e-12 * peak);
        for (int k = 1; k <= r.k0(); ++k) {
            EXPECT_LE(std::abs(r[k]), 2e-3 * peak) << "ring " << ri << " k " << k;
            EXPECT_LE(std::abs(r[-k]), 2e-3 * peak) << "ring " << ri << " k " << -k;
        }
    }
}

// Offset blobs give non-trivial harmonics, and the estimated ring series
// converge to the ring of the image's 2D transform as N grows.
TEST(Rings, OffsetBlobConvergesToExactRing) {
    const auto f = phantom::default_phantom(128);
    ReconstructionConfig cfg;
    cfg.cap_ring_k0 = false;
    const std::vector<std::size_t> ns{500, 1000, 2000, 4000, 8000};
    const std::vector<std::size_t> probe{2, 4, 6};
    const std::size_t trials = 3;

    const auto sp0 = spectra_of(f, 500, 1, 128);
    std::vector<FourierSeries> exact;
    for (auto r : probe) exact.push_back(exact_ring_coeffs(f, static_cast<double>(r) * sp0.freq_spacing, 30, 128));
    bool has_harmonics = false;
    for (const auto& e : exact) has_harmonics |= std::abs(e[1]) > 0.1 * std::abs(e[0]);
    EXPECT_TRUE(has_harmonics);

    std::vector<double> xs, ys;
    for (auto n : ns) {
        double acc = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto sp = spectra_of(f, n, 100 * n + t, 128);
            ASSERT_DOUBLE_EQ(sp.freq_spacing, sp0.freq_spacing);
            const auto rings = reconstruct_rings(sp, ordering::Permutation::identity(n), cfg);
            for (std::size_t q = 0; q < probe.size(); ++q) {
                const double d = l2_distance_periodic(rings.rings[probe[q]], exact[q]);
                acc += d * d / exact[q].energy();
            }
        }
        xs.push_back(static_cast<double>(n));
        ys.push_back(acc / static_cast<double>(trials * probe.size()));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]) / xs.size();
        my += std::log(ys[i]) / ys.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
        sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    }
    EXPECT_LE(sxy / sxx, -0.5);
}

// Reversing positions 2..N maps the assigned angle theta to -theta, so the
// ring series come out reflected: a_k -> a_-k.
TEST(Rings, ReversedOrderReflectsCoefficients) {
    const auto f = phantom::default_phantom(64);
    const std::size_t n = 301;
    const auto sp = spectra_of(f, n, 5, 64);
    const auto id = ordering::Permutation::identity(n);
    const auto fwd = reconstruct_rings(sp, id, {});
    const auto rev = reconstruct_rings(sp, ordering::reverse_after_anchor(id), {});
    ASSERT_EQ(fwd.rings.size(), rev.rings.size());
    for (std::size_t r = 0; r < fwd.rings.size(); ++r) {
        const double scale = std::sqrt(fwd.rings[r].energy()) + 1e-300;
        for (int k = -fwd.rings[r].k0(); k <= fwd.rings[r].k0(); ++k)
            ASSERT_LE(std::abs(rev.rings[r][k] - fwd.rings[r][-k]), 1e-12 * scale);
    }
}

TEST(Rings, KnownAnglesBeatAssignedAngles) {
    const auto f = phantom::default_phantom(128);
    for (std::size_t n : {500u, 2000u}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto angles = draw_anchored_angles(n, RngSeed{seed + 10 * n});
            const auto s = radon(f, angles, 128);
            ReconstructionConfig cfg;
            cfg.grid = f.width();
            cfg.pixel_size = f.pixel_size();
            cfg.nu0 = auto_nu0(project_spectra(s, cfg.oversample));
            const auto known = reconstruct_known_angles(s, cfg, angles);
            const auto unknown = reconstruct_detailed(s, cfg, ordering::Permutation::identity(n));
            const auto err = [&](const Image2D& g) {
                double acc = 0;
                for (std::size_t i = 0; i < g.pixels().size(); ++i) acc += std::pow(g.pixels()[i] - f.pixels()[i], 2);
                return acc / f.squared_norm();
            };
            EXPECT_LE(err(known.image), err(unknown.image)) << "N=" << n << " seed=" << seed;
        }
    }
}

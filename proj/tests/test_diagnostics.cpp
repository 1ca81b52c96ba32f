#include <uvtomo/diagnostics.hpp>
#include <uvtomo/phantom.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace uvtomo;
using namespace uvtomo::tomo;

TEST(FtAt, DcIsMass) {
    const auto f = phantom::default_phantom(64);
    EXPECT_NEAR(std::abs(ft_at(f, 0, 0) - f.sum() * f.pixel_size() * f.pixel_size()), 0.0, 1e-12);
}

// Transform of a single point mass at (x, y): px^2 exp(-j 2 pi (u x + v y)).
TEST(FtAt, PointMassPhase) {
    std::vector<double> pix(16 * 16, 0.0);
    pix[3 * 16 + 11] = 1.0;
    const Image2D img(16, 16, 0.1, pix);
    const double x = img.x_of(11), y = img.y_of(3);
    for (double u : {0.0, 0.7, -2.1})
        for (double v : {0.3, -1.0}) {
            const cplx expect = 0.01 * std::polar(1.0, -2 * std::numbers::pi * (u * x + v * y));
            EXPECT_NEAR(std::abs(ft_at(img, u, v) - expect), 0.0, 1e-15);
        }
}

TEST(ExactRing, CentredBlobIsRotationInvariant) {
    const auto f = phantom::gaussian_mixture(128, 2.0, {{0.0, 0.0, 0.15, 1.0}}, 0.9);
    for (double nu : {0.5, 1.0, 2.0}) {
        const auto ring = exact_ring_coeffs(f, nu, 8, 64);
        for (int k = 1; k <= 8; ++k) {
            EXPECT_LE(std::abs(ring[k]), 1e-6 * std::abs(ring[0]));
            EXPECT_LE(std::abs(ring[-k]), 1e-6 * std::abs(ring[0]));
        }
    }
    EXPECT_THROW(exact_ring_coeffs(f, 1.0, 8, 16), InvalidArgument);
}

TEST(DiscTruncate, LimitsAndIdempotence) {
    const auto f = phantom::default_phantom(64);
    const auto all = disc_truncate(f, 1e6);
    for (std::size_t i = 0; i < f.pixels().size(); ++i) ASSERT_NEAR(all.pixels()[i], f.pixels()[i], 1e-12);

    const auto dc = disc_truncate(f, 1e-6);
    const double mean = f.sum() / static_cast<double>(f.pixels().size());
    for (double v : dc.pixels()) ASSERT_NEAR(v, mean, 1e-12);

    const auto once = disc_truncate(f, 3.0);
    const auto twice = disc_truncate(once, 3.0);
    for (std::size_t i = 0; i < f.pixels().size(); ++i) ASSERT_NEAR(once.pixels()[i], twice.pixels()[i], 1e-12);
}

TEST(Sobolev, ParsevalAtAlphaZero) {
    const auto f = phantom::default_phantom(128);
    const std::vector<double> list{1.0};
    const auto st = sobolev_tail(f, 0.0, list);
    const double spatial = f.squared_norm() * f.pixel_size() * f.pixel_size() / (2 * std::numbers::pi);
    EXPECT_NEAR(st.norm_alpha_sq / spatial, 1.0, 1e-6);
}

TEST(Sobolev, TailIsMonotone) {
    const auto f = phantom::default_phantom(128);
    std::vector<double> list;
    for (double nu = 0.25; nu <= 20.0; nu += 0.25) list.push_back(nu);
    const auto st = sobolev_tail(f, 1.0, list);
    for (std::size_t i = 1; i < st.tail_energy.size(); ++i)
        EXPECT_LE(st.tail_energy[i].second, st.tail_energy[i - 1].second);
}

TEST(Sobolev, TailBoundHolds) {
    const auto f = phantom::default_phantom(128);
    const std::vector<double> list{0.5, 1.0, 2.0, 4.0, 8.0};
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto st = sobolev_tail(f, alpha, list);
        EXPECT_EQ(st.violations(), 0u) << "alpha=" << alpha;
        ASSERT_EQ(st.bound.size(), list.size());
        EXPECT_DOUBLE_EQ(st.bound[1], st.norm_alpha_sq);
    }
}

TEST(Sobolev, Errors) {
    const auto f = phantom::default_phantom(32);
    const std::vector<double> ok{1.0}, bad{0.0};
    EXPECT_THROW(sobolev_tail(f, -0.5, ok), InvalidArgument);
    EXPECT_THROW(sobolev_tail(f, 1.0, bad), InvalidArgument);
}

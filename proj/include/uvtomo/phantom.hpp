#pragma once

#include <uvtomo/image.hpp>

#include <cmath>
#include <vector>

namespace uvtomo::phantom {

struct GaussianBlob {
    double x = 0.0;
    double y = 0.0;
    double sigma = 0.1;
    double amplitude = 1.0;
};

/// Sum of Gaussian blobs sampled at pixel centres on a grid x grid image
/// covering [-fov/2, fov/2]^2, hard-clipped to zero beyond `clip_radius`.
inline Image2D gaussian_mixture(std::size_t grid, double fov, const std::vector<GaussianBlob>& blobs,
                                double clip_radius) {
    const double px = fov / static_cast<double>(grid);
    Image2D geom(grid, grid, px);
    std::vector<double> pix(grid * grid, 0.0);
    for (std::size_t i = 0; i < grid; ++i) {
        const double y = geom.y_of(i);
        for (std::size_t j = 0; j < grid; ++j) {
            const double x = geom.x_of(j);
            if (std::hypot(x, y) > clip_radius) continue;
            double v = 0.0;
            for (const auto& b : blobs) {
                const double dx = x - b.x, dy = y - b.y;
                v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
            }
            pix[i * grid + j] = v;
        }
    }
    return Image2D(grid, grid, px, std::move(pix));
}

/// The default asymmetric test object: four off-centre blobs inside a
/// support of radius 0.9 on the field of view [-1, 1]^2.
inline std::vector<GaussianBlob> default_blobs() {
    return {
        {0.29, 0.10, 0.15, 1.00},
        {-0.23, 0.29, 0.13, 0.70},
        {-0.10, -0.33, 0.14, 0.80},
        {0.36, -0.29, 0.13, 0.45},
    };
}

inline constexpr double default_fov = 2.0;
inline constexpr double default_clip_radius = 0.9;

inline Image2D default_phantom(std::size_t grid = 128) {
    return gaussian_mixture(grid, default_fov, default_blobs(), default_clip_radius);
}

/// Uniform disc of the given radius, anti-aliased by averaging
/// `supersample`^2 sub-pixel samples per pixel.
inline Image2D disc(std::size_t grid, double fov, double radius, double value = 1.0, int supersample = 8) {
    const double px = fov / static_cast<double>(grid);
    Image2D geom(grid, grid, px);
    std::vector<double> pix(grid * grid, 0.0);
    const double inv = 1.0 / static_cast<double>(supersample);
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            int inside = 0;
            for (int a = 0; a < supersample; ++a) {
                const double y = geom.y_of(i) + ((a + 0.5) * inv - 0.5) * px;
                for (int b = 0; b < supersample; ++b) {
                    const double x = geom.x_of(j) + ((b + 0.5) * inv - 0.5) * px;
                    if (x * x + y * y <= radius * radius) ++inside;
                }
            }
            pix[i * grid + j] = value * inside * inv * inv;
        }
    }
    return Image2D(grid, grid, px, std::move(pix));
}

} // namespace uvtomo::phantom

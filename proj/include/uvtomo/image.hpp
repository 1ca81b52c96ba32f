#pragma once

#include <uvtomo/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace uvtomo {

/// Real image on a square-pixel grid, row-major (height x width).
///
/// Pixel (row i, col j) has its centre at physical coordinates
///   x = (j - (width - 1) / 2) * pixel_size,  y = (i - (height - 1) / 2) * pixel_size,
/// so the origin is the grid centre. support_radius() is the largest centre
/// distance of a non-zero pixel; every pixel further out is exactly zero.
class Image2D {
public:
    Image2D() = default;

    Image2D(std::size_t width, std::size_t height, double pixel_size)
        : Image2D(width, height, pixel_size, std::vector<double>(width * height, 0.0)) {}

    Image2D(std::size_t width, std::size_t height, double pixel_size, std::vector<double> pixels)
        : width_(width), height_(height), pixel_size_(pixel_size), pixels_(std::move(pixels)) {
        detail::require(width > 0 && height > 0, "Image2D: empty grid");
        detail::require(pixel_size > 0.0 && std::isfinite(pixel_size), "Image2D: pixel_size must be positive");
        detail::require(pixels_.size() == width * height, "Image2D: pixel count does not match width*height");
        for (double v : pixels_)
            if (!std::isfinite(v)) throw InvalidArgument("Image2D: non-finite pixel");
        refresh();
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    double pixel_size() const noexcept { return pixel_size_; }
    double support_radius() const noexcept { return support_radius_; }
    double max_abs() const noexcept { return max_abs_; }

    std::span<const double> pixels() const noexcept { return pixels_; }

    double operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }

    double x_of(std::size_t col) const noexcept {
        return (static_cast<double>(col) - 0.5 * static_cast<double>(width_ - 1)) * pixel_size_;
    }
    double y_of(std::size_t row) const noexcept {
        return (static_cast<double>(row) - 0.5 * static_cast<double>(height_ - 1)) * pixel_size_;
    }

    double sum() const noexcept {
        double s = 0.0;
        for (double v : pixels_) s += v;
        return s;
    }

    double squared_norm() const noexcept {
        double s = 0.0;
        for (double v : pixels_) s += v * v;
        return s;
    }

    /// Zero every pixel whose centre lies further than `radius` from the origin.
    Image2D masked(double radius) const {
        std::vector<double> out = pixels_;
        for (std::size_t i = 0; i < height_; ++i)
            for (std::size_t j = 0; j < width_; ++j)
                if (std::hypot(x_of(j), y_of(i)) > radius) out[i * width_ + j] = 0.0;
        return Image2D(width_, height_, pixel_size_, std::move(out));
    }

    friend bool operator==(const Image2D&, const Image2D&) = default;

private:
    void refresh() {
        max_abs_ = 0.0;
        support_radius_ = 0.0;
        for (std::size_t i = 0; i < height_; ++i) {
            for (std::size_t j = 0; j < width_; ++j) {
                const double v = pixels_[i * width_ + j];
                if (v == 0.0) continue;
                max_abs_ = std::max(max_abs_, std::abs(v));
                support_radius_ = std::max(support_radius_, std::hypot(x_of(j), y_of(i)));
            }
        }
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double pixel_size_ = 1.0;
    std::vector<double> pixels_;
    double support_radius_ = 0.0;
    double max_abs_ = 0.0;
};

} // namespace uvtomo

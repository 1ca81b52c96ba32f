#pragma once

#include <uvtomo/error.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace uvtomo {

/// N projections x B offset bins, projection-major. Bin b sits at
/// rho_b = (b - (B - 1) / 2) * bin_spacing, so the bins are symmetric
/// about rho = 0.
class Sinogram {
public:
    Sinogram() = default;

    Sinogram(std::size_t num_projections, std::size_t num_bins, double bin_spacing, std::vector<double> data)
        : n_(num_projections), bins_(num_bins), bin_spacing_(bin_spacing), data_(std::move(data)) {
        detail::require(num_bins >= 2, "Sinogram: need at least 2 bins");
        detail::require(bin_spacing > 0.0 && std::isfinite(bin_spacing), "Sinogram: bin_spacing must be positive");
        detail::require(data_.size() == n_ * bins_, "Sinogram: data size does not match N*B");
        for (double v : data_)
            if (!std::isfinite(v)) throw InvalidArgument("Sinogram: non-finite value");
    }

    std::size_t num_projections() const noexcept { return n_; }
    std::size_t num_bins() const noexcept { return bins_; }
    double bin_spacing() const noexcept { return bin_spacing_; }

    /// Half-width of the bin extent, (B - 1) / 2 * bin_spacing.
    double extent() const noexcept { return 0.5 * static_cast<double>(bins_ - 1) * bin_spacing_; }

    double rho(std::size_t bin) const noexcept {
        return (static_cast<double>(bin) - 0.5 * static_cast<double>(bins_ - 1)) * bin_spacing_;
    }

    std::span<const double> row(std::size_t p) const { return {data_.data() + p * bins_, bins_}; }
    std::span<double> row(std::size_t p) { return {data_.data() + p * bins_, bins_}; }
    std::span<const double> data() const noexcept { return data_; }

    /// Support radius of the imaged object; defaults to the bin extent.
    double support_radius() const noexcept { return support_radius_.value_or(extent()); }
    void set_support_radius(double r) {
        detail::require(r > 0.0 && r <= extent() + 1e-12, "Sinogram: support radius must lie inside the bin extent");
        support_radius_ = r;
    }
    bool has_support_radius() const noexcept { return support_radius_.has_value(); }

    /// Ground-truth angles (diagnostics only).
    const std::optional<std::vector<double>>& angles() const noexcept { return angles_; }
    void set_angles(std::vector<double> angles) {
        detail::require(angles.size() == n_, "Sinogram: one angle per projection");
        angles_ = std::move(angles);
    }

    friend bool operator==(const Sinogram&, const Sinogram&) = default;

private:
    std::size_t n_ = 0;
    std::size_t bins_ = 0;
    double bin_spacing_ = 1.0;
    std::vector<double> data_;
    std::optional<double> support_radius_;
    std::optional<std::vector<double>> angles_;
};

} // namespace uvtomo

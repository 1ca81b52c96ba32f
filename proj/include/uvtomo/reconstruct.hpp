#pragma once

// Reconstruction from projections at unknown angles: spectra of the
// projections, per-ring coefficient estimation in the supplied order, polar
// evaluation and direct inverse synthesis.

#include <uvtomo/error.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/ordering.hpp>
#include <uvtomo/polar.hpp>
#include <uvtomo/rings.hpp>
#include <uvtomo/sinogram.hpp>
#include <uvtomo/spectra.hpp>

#include <span>

namespace uvtomo::tomo {

struct Reconstruction {
    Image2D image;          // masked to the support radius
    Image2D unmasked;       // same synthesis before masking
    double nu0 = 0.0;
    int k0 = 0;
    std::size_t spokes = 0;
    std::size_t rings = 0;
};

namespace detail {

inline Reconstruction synthesize_image(const RingCoeffs& rings, const ReconstructionConfig& cfg) {
    const std::size_t m = cfg.spokes ? *cfg.spokes : auto_spokes(rings.k0, rings.nu0, rings.support_radius);
    const PolarSpectrum ps = evaluate_polar(rings, m);
    InverseOptions opt;
    opt.grid = cfg.grid;
    opt.pixel_size = cfg.pixel_size;
    opt.mask_to_support = false;
    Reconstruction out;
    out.unmasked = inverse_polar_ft(ps, opt);
    out.image = out.unmasked.masked(ps.support_radius);
    out.nu0 = rings.nu0;
    out.k0 = rings.k0;
    out.spokes = m;
    out.rings = rings.rings.size();
    return out;
}

} // namespace detail

/// Full pipeline with diagnostics. Row order(i) of the sinogram (1-based) is
/// taken to be the projection at angle 2 pi (i - 1) / N.
inline Reconstruction reconstruct_detailed(const Sinogram& s, const ReconstructionConfig& cfg,
                                           const ordering::Permutation& order) {
    cfg.validate();
    if (s.num_projections() < 2) throw InvalidArgument("reconstruct: need at least 2 projections");
    const ProjectionSpectra sp = project_spectra(s, cfg.oversample);
    return detail::synthesize_image(reconstruct_rings(sp, order, cfg), cfg);
}

inline Image2D reconstruct_unknown_angles(const Sinogram& s, const ReconstructionConfig& cfg,
                                          const ordering::Permutation& order) {
    return reconstruct_detailed(s, cfg, order).image;
}

/// Same pipeline with the ground-truth angles used in place of assigned ones.
inline Reconstruction reconstruct_known_angles(const Sinogram& s, const ReconstructionConfig& cfg,
                                               std::span<const double> angles) {
    cfg.validate();
    if (s.num_projections() < 2) throw InvalidArgument("reconstruct: need at least 2 projections");
    const ProjectionSpectra sp = project_spectra(s, cfg.oversample);
    return detail::synthesize_image(reconstruct_rings_known_angles(sp, angles, cfg), cfg);
}

} // namespace uvtomo::tomo

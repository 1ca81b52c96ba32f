#pragma once

#include <uvtomo/error.hpp>
#include <uvtomo/rng.hpp>
#include <uvtomo/fourier_series.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/sinogram.hpp>
#include <uvtomo/io.hpp>
#include <uvtomo/qbl.hpp>
#include <uvtomo/ordering.hpp>
#include <uvtomo/fft.hpp>
#include <uvtomo/phantom.hpp>
#include <uvtomo/radon.hpp>
#include <uvtomo/spectra.hpp>
#include <uvtomo/rings.hpp>
#include <uvtomo/polar.hpp>
#include <uvtomo/reconstruct.hpp>
#include <uvtomo/diagnostics.hpp>
#include <uvtomo/harness.hpp>

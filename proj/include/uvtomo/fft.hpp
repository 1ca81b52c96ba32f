#pragma once

// Thin RAII wrapper over FFTW3 complex transforms. Plans are created under a
// process-wide mutex (FFTW's planner is not re-entrant); execution through
// the new-array interface is thread-safe.

#include <uvtomo/error.hpp>

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <vector>

namespace uvtomo::fft {

using cplx = std::complex<double>;

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
} // namespace detail

/// Unnormalised DFT  X_k = sum_n x_n exp(-+ j 2 pi k n / N)  over a 1D or 2D
/// row-major array.
class Plan {
public:
    Plan(std::size_t n, Direction dir) : size_(n) {
        if (n == 0) throw InvalidArgument("fft::Plan: empty transform");
        std::vector<cplx> scratch(n);
        std::lock_guard lock(detail::planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), detail::as_fftw(scratch.data()), detail::as_fftw(scratch.data()),
                                 static_cast<int>(dir), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    Plan(std::size_t rows, std::size_t cols, Direction dir) : size_(rows * cols) {
        if (size_ == 0) throw InvalidArgument("fft::Plan: empty transform");
        std::vector<cplx> scratch(size_);
        std::lock_guard lock(detail::planner_mutex());
        plan_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), detail::as_fftw(scratch.data()),
                                 detail::as_fftw(scratch.data()), static_cast<int>(dir),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    ~Plan() {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(plan_);
    }

    /// In-place transform of `data` (length must match the plan).
    void execute(std::span<cplx> data) const {
        if (data.size() != size_) throw InvalidArgument("fft::Plan: size mismatch");
        fftw_execute_dft(plan_, detail::as_fftw(data.data()), detail::as_fftw(data.data()));
    }

private:
    std::size_t size_;
    fftw_plan plan_{};
};

inline std::vector<cplx> dft2(std::span<const double> image, std::size_t rows, std::size_t cols) {
    std::vector<cplx> buf(image.begin(), image.end());
    Plan(rows, cols, Direction::forward).execute(buf);
    return buf;
}

/// Signed frequency index of DFT bin `k` of length `n` (k < n/2 -> k, else k - n).
constexpr long signed_bin(std::size_t k, std::size_t n) noexcept {
    return 2 * k < n ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

} // namespace uvtomo::fft

#include "supertomo/precond.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "supertomo/error.hpp"

namespace supertomo {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Bins past the Nyquist index fold to negative frequencies: wrap(u) in (-n/2, n/2].
double signed_frequency(std::size_t u, std::size_t n) {
    const auto ui = static_cast<double>(u);
    const auto nd = static_cast<double>(n);
    const double wrapped = (2 * u > n) ? ui - nd : ui;
    return 2.0 * std::numbers::pi * wrapped / nd;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {
        if (ptr == nullptr) throw Error("Preconditioner: FFTW allocation failed");
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

}  // namespace

void PreconditionerSpec::validate() const {
    if (!(mu > 0.0)) throw Error("preconditioner: mu must be positive, got " + std::to_string(mu));
    if (!(rho > 0.0 && rho <= 1.0)) throw Error("preconditioner: rho must lie in (0,1], got " + std::to_string(rho));
    if (!(floor > 0.0)) throw Error("preconditioner: floor must be positive");
    if (grid_rows == 0 || grid_cols == 0) throw Error("preconditioner: empty grid");
}

double filter_value(double omega, const PreconditionerSpec& spec) {
    if (!(omega >= 0.0 && omega <= std::numbers::pi)) {
        throw Error("filter_value: omega " + std::to_string(omega) + " outside [0, pi]");
    }
    const double raw = (std::abs(omega) + spec.mu) * (spec.rho + (1.0 - spec.rho) * std::cos(omega));
    return std::max(spec.floor, raw);
}

double radial_frequency(std::size_t u, std::size_t v, std::size_t rows, std::size_t cols) {
    const double wr = signed_frequency(u, rows);
    const double wc = signed_frequency(v, cols);
    return std::min(std::numbers::pi, std::sqrt(wr * wr + wc * wc));
}

struct Preconditioner::Impl {
    std::size_t rows;
    std::size_t cols;
    Vector d;
    Vector sqrt_d;
    Vector inv_sqrt_d;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Impl(std::size_t r, std::size_t c, Vector diag) : rows(r), cols(c), d(std::move(diag)) {
        sqrt_d.resize(d.size());
        inv_sqrt_d.resize(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            sqrt_d[k] = std::sqrt(d[k]);
            inv_sqrt_d[k] = 1.0 / sqrt_d[k];
        }
        FftwBuffer scratch(rows * cols);
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), scratch.ptr, scratch.ptr,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), scratch.ptr, scratch.ptr,
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward == nullptr || backward == nullptr) throw Error("Preconditioner: FFTW planning failed");
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward != nullptr) fftw_destroy_plan(forward);
        if (backward != nullptr) fftw_destroy_plan(backward);
    }

    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;

    Vector filter(std::span<const double> x, const Vector& gain) const {
        const std::size_t n = rows * cols;
        if (x.size() != n) {
            throw Error("Preconditioner: image has " + std::to_string(x.size()) + " pixels, grid expects " +
                        std::to_string(n));
        }
        FftwBuffer buf(n);
        for (std::size_t k = 0; k < n; ++k) {
            buf.ptr[k][0] = x[k];
            buf.ptr[k][1] = 0.0;
        }
        fftw_execute_dft(forward, buf.ptr, buf.ptr);
        // Unnormalized FFTW transforms: fold 1/n into the gain.
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            buf.ptr[k][0] *= gain[k] * scale;
            buf.ptr[k][1] *= gain[k] * scale;
        }
        fftw_execute_dft(backward, buf.ptr, buf.ptr);
        Vector out(n);
        double re2 = 0.0;
        double im2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = buf.ptr[k][0];
            re2 += buf.ptr[k][0] * buf.ptr[k][0];
            im2 += buf.ptr[k][1] * buf.ptr[k][1];
        }
        // The filter is even in frequency, so a real input must give a real output.
        if (im2 > 1e-20 * re2 && im2 > 1e-200) {
            throw Error("Preconditioner: imaginary residue exceeds 1e-10 relative");
        }
        return out;
    }
};

Preconditioner::Preconditioner(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Preconditioner::Preconditioner(const PreconditionerSpec& spec) {
    spec.validate();
    Vector d(spec.grid_rows * spec.grid_cols);
    for (std::size_t u = 0; u < spec.grid_rows; ++u) {
        for (std::size_t v = 0; v < spec.grid_cols; ++v) {
            d[u * spec.grid_cols + v] = filter_value(radial_frequency(u, v, spec.grid_rows, spec.grid_cols), spec);
        }
    }
    impl_ = std::make_unique<Impl>(spec.grid_rows, spec.grid_cols, std::move(d));
}

Preconditioner Preconditioner::identity(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw Error("preconditioner: empty grid");
    return Preconditioner(std::make_unique<Impl>(rows, cols, Vector(rows * cols, 1.0)));
}

Preconditioner::Preconditioner(Preconditioner&&) noexcept = default;
Preconditioner& Preconditioner::operator=(Preconditioner&&) noexcept = default;
Preconditioner::~Preconditioner() = default;

Vector Preconditioner::apply_M(std::span<const double> x) const { return impl_->filter(x, impl_->d); }
Vector Preconditioner::apply_N(std::span<const double> x) const { return impl_->filter(x, impl_->sqrt_d); }
Vector Preconditioner::apply_N_inv_T(std::span<const double> x) const { return impl_->filter(x, impl_->inv_sqrt_d); }

std::size_t Preconditioner::rows() const { return impl_->rows; }
std::size_t Preconditioner::cols() const { return impl_->cols; }
const Vector& Preconditioner::diagonal() const { return impl_->d; }

}  // namespace supertomo

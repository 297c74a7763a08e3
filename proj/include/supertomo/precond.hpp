#pragma once

#include <cstddef>
#include <memory>

#include "supertomo/linops.hpp"

namespace supertomo {

struct PreconditionerSpec {
    double mu = 1e-3;
    double rho = 0.6;
    double floor = 1e-8;
    std::size_t grid_rows = 64;
    std::size_t grid_cols = 64;

    void validate() const;
};

/// Ramp filter with additive offset mu times a generalized Hamming window, clamped below
/// at spec.floor. omega must lie in [0, pi].
[[nodiscard]] double filter_value(double omega, const PreconditionerSpec& spec);

/// Radial frequency of DFT bin (u, v) on a rows x cols grid, clamped to pi.
[[nodiscard]] double radial_frequency(std::size_t u, std::size_t v, std::size_t rows, std::size_t cols);

/// Fourier-domain preconditioner M = F^-1 D F on images of a fixed grid, with its symmetric
/// square root N = F^-1 D^(1/2) F (so N^T = N, N^T N = M) and N^-T = F^-1 D^(-1/2) F.
///
/// The DFT is backed by FFTW. Plans are created once per instance under a process-wide lock
/// and executed with per-call buffers, so apply_* are safe to call concurrently.
class Preconditioner {
public:
    explicit Preconditioner(const PreconditionerSpec& spec);
    /// D = identity on the given grid (test hook).
    static Preconditioner identity(std::size_t rows, std::size_t cols);

    Preconditioner(Preconditioner&&) noexcept;
    Preconditioner& operator=(Preconditioner&&) noexcept;
    ~Preconditioner();

    [[nodiscard]] Vector apply_M(std::span<const double> x) const;
    [[nodiscard]] Vector apply_N(std::span<const double> x) const;
    [[nodiscard]] Vector apply_N_inv_T(std::span<const double> x) const;

    [[nodiscard]] std::size_t rows() const;
    [[nodiscard]] std::size_t cols() const;
    /// Filter samples D in DFT bin order (row-major, rows x cols).
    [[nodiscard]] const Vector& diagonal() const;

private:
    struct Impl;
    explicit Preconditioner(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

}  // namespace supertomo

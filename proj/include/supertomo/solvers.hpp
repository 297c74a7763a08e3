#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "supertomo/geometry.hpp"
#include "supertomo/linops.hpp"
#include "supertomo/metrics.hpp"
#include "supertomo/precond.hpp"
#include "supertomo/tv.hpp"

namespace supertomo {

using Operator = std::function<Vector(std::span<const double>)>;

/// A quadratic objective described by its gradient x -> A x - y and curvature p -> A p.
/// Least-squares models evaluate the gradient as R^T (R x - b) without forming A or y.
struct QuadraticModel {
    Operator gradient;
    Operator curvature;
};

[[nodiscard]] QuadraticModel least_squares_model(const SparseMatrix& r, std::span<const double> b);
/// The transformed system N A N^T x = N y with A = R^T R, y = R^T b (N symmetric).
[[nodiscard]] QuadraticModel transformed_model(const SparseMatrix& r, std::span<const double> b,
                                               const Preconditioner& n);

/// Iterate bundle of the conjugate-gradient family. h == A p after every completed step;
/// g holds the last gradient evaluated.
struct PcgState {
    Vector x;
    Vector p;
    Vector h;
    Vector g;
};

enum class StepStatus { Ok, Breakdown };

/// |p^T h| at or below this is treated as breakdown (A singular along p, or g = 0).
inline constexpr double kBreakdownThreshold = 1e-30;

/// First step from x0: g0 = A x0 - y, p0 = -M g0, h0 = A p0, x1 = x0 + alpha p0.
/// An empty preconditioner means the identity.
StepStatus pcg_init(PcgState& state, std::span<const double> x0, const QuadraticModel& model,
                    const Operator& precond = {});

/// One preconditioned CG update at state.x using the previous (p, h).
StepStatus u_pcg(PcgState& state, const QuadraticModel& model, const Operator& precond);

/// u_pcg with the identity preconditioner (same code path).
StepStatus u_cg(PcgState& state, const QuadraticModel& model);

/// u_pcg applied to the transformed system; equivalently u_cg on transformed_model.
StepStatus u_tpcg(PcgState& state, const QuadraticModel& transformed);

struct Problem {
    const SparseMatrix& r;
    std::span<const double> b;
    std::size_t rows;
    std::size_t cols;
};

enum class RunStatus { Terminated, MaxIter, Breakdown };

/// One record per while-test evaluation: record k describes the image x_{k-1/2}.
/// s_norm is the norm of the perturbation generated in that iteration (0 when none).
struct IterationRecord {
    std::size_t k = 0;
    double seconds = 0.0;
    double f = 0.0;
    double tv = 0.0;
    double se = 0.0;  // NaN without a phantom
    double s_norm = 0.0;
    std::uint64_t ell = 0;  // counter value passed to the perturbation in this iteration
};

struct RunResult {
    std::size_t k = 0;
    Image x_out;  // x_{k-1/2}, in the solver's own coordinates
    RunStatus status = RunStatus::MaxIter;
    std::vector<IterationRecord> trace;
};

/// Observed after the initialization (k = 0) and after every update step k: x_half is the
/// point the step was taken from, state holds (x_{k+1}, p_k, h_k).
struct CgSnapshot {
    std::size_t k;
    const Vector& x_half;
    const PcgState& state;
};

struct DriverOptions {
    double eps = 1e-12;
    std::size_t max_iter = 1000;
    const Image* phantom = nullptr;
    const EllipseMask* mask = nullptr;
    std::function<void(const CgSnapshot&)> observer;
};

/// Unperturbed CG on the normal equations; the while test uses f' = f / 2 against options.eps.
[[nodiscard]] RunResult cg(const Problem& problem, const Image& x0, const DriverOptions& options);
[[nodiscard]] RunResult pcg(const Problem& problem, const Image& x0, const Preconditioner& m,
                            const DriverOptions& options);
/// As pcg with the identity operator standing in for M (no FFT round trip).
[[nodiscard]] RunResult pcg_identity(const Problem& problem, const Image& x0, const DriverOptions& options);
/// Superiorized CG; while test f'(x) = ||R x - b||^2 / 2 > options.eps.
[[nodiscard]] RunResult sup_cg(const Problem& problem, const Image& x0, const SuperiorizationParams& params,
                               const DriverOptions& options);
/// Superiorized PCG; while test f(x) = ||R x - b||^2 > options.eps.
[[nodiscard]] RunResult sup_pcg(const Problem& problem, const Image& x0, const SuperiorizationParams& params,
                                const Preconditioner& m, const DriverOptions& options);
/// Superiorized transformed PCG from x0_hat (= N^-T x0). Returns x_hat_{k-1/2}; the trace
/// records f, TV and SE of N^T x_hat.
[[nodiscard]] RunResult sup_tpcg(const Problem& problem, const Image& x0_hat, const SuperiorizationParams& params,
                                 const Preconditioner& n, const DriverOptions& options);

/// CG on a general quadratic model with optional preconditioner/perturbation hooks; the
/// named drivers above are thin wrappers over it.
struct CgFamilySpec {
    QuadraticModel model;
    Operator precond;      // empty: identity
    Operator to_image;     // solver coordinates -> image; empty: identity
    Operator perturb_map;  // image-domain s -> solver coordinates; empty: identity
    std::optional<SuperiorizationParams> sup;
    double criterion_scale = 1.0;
};
[[nodiscard]] RunResult run_cg_family(const Problem& problem, const Image& x0, const CgFamilySpec& spec,
                                      const DriverOptions& options);

/// Parameters of the Bayesian ART: with use_prior, sweeps minimize
/// r^2 ||R x - b||^2 + ||x - mu_x||^2; without it they are plain relaxed Kaczmarz on R x = b.
struct ArtParams {
    std::optional<double> r = 5.0;  // empty disables the prior
    double lambda = 1e-2;
    Image mu_x;

    void validate() const;
};

/// x and the per-equation auxiliary u of the Bayesian ART (u stays zero without the prior).
struct ArtState {
    Image x;
    Vector u;
};

[[nodiscard]] ArtState art_start(const Image& x0, std::size_t n_measurements);

/// One full cycle over the equations in row order (angle-major, then ray).
void art_sweep(ArtState& state, const SparseMatrix& r, std::span<const double> b, const ArtParams& params);

[[nodiscard]] RunResult art(const Problem& problem, const Image& x0, const ArtParams& params,
                            const DriverOptions& options);
[[nodiscard]] RunResult sup_art(const Problem& problem, const Image& x0, const ArtParams& art_params,
                                const SuperiorizationParams& sup_params, const DriverOptions& options);

/// Uniform gray level estimated from the data: each angle's ray sum times the ray spacing
/// approximates the total image mass; averaged over angles and divided by the grid area.
[[nodiscard]] double estimate_gray_level(std::span<const double> b, const ScanGeometry& geom);

}  // namespace supertomo

#include "supertomo/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "supertomo/error.hpp"

namespace supertomo {

namespace {

using Clock = std::chrono::steady_clock;

Vector apply_or_copy(const Operator& op, std::span<const double> x) {
    return op ? op(x) : Vector(x.begin(), x.end());
}

// Evaluates the per-iteration trace quantities for an image-domain vector.
class TraceRecorder {
public:
    TraceRecorder(const Problem& problem, const DriverOptions& options)
        : problem_(problem), options_(options), start_(Clock::now()) {}

    IterationRecord record(std::size_t k, const Vector& image_vec) const {
        IterationRecord rec;
        rec.k = k;
        rec.f = residual_f(image_vec, problem_.r, problem_.b);
        const Image img(problem_.rows, problem_.cols, image_vec);
        rec.tv = tv_value(img);
        rec.se = (options_.phantom != nullptr && options_.mask != nullptr)
                     ? selective_error(img, *options_.phantom, *options_.mask)
                     : std::numeric_limits<double>::quiet_NaN();
        rec.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
        return rec;
    }

private:
    const Problem& problem_;
    const DriverOptions& options_;
    Clock::time_point start_;
};

void check_problem(const Problem& problem, const Image& x0) {
    if (problem.r.n_rows() != problem.b.size()) {
        throw Error("solver: R has " + std::to_string(problem.r.n_rows()) + " rows but data has " +
                    std::to_string(problem.b.size()) + " entries");
    }
    if (problem.r.n_cols() != problem.rows * problem.cols || x0.size() != problem.r.n_cols()) {
        throw Error("solver: image of " + std::to_string(x0.size()) + " pixels does not match R with " +
                    std::to_string(problem.r.n_cols()) + " columns");
    }
}

void check_options(const DriverOptions& options) {
    if (!(options.eps > 0.0)) throw Error("solver: eps must be positive");
    if (options.max_iter < 1) throw Error("solver: max_iter must be >= 1");
}

}  // namespace

QuadraticModel least_squares_model(const SparseMatrix& r, std::span<const double> b) {
    return {
        [&r, b](std::span<const double> x) { return rmatvec(r, subtract(matvec(r, x), b)); },
        [&r](std::span<const double> p) { return normal_op(r, p); },
    };
}

QuadraticModel transformed_model(const SparseMatrix& r, std::span<const double> b, const Preconditioner& n) {
    return {
        [&r, b, &n](std::span<const double> x) {
            return n.apply_N(rmatvec(r, subtract(matvec(r, n.apply_N(x)), b)));
        },
        [&r, &n](std::span<const double> p) { return n.apply_N(normal_op(r, n.apply_N(p))); },
    };
}

StepStatus pcg_init(PcgState& state, std::span<const double> x0, const QuadraticModel& model,
                    const Operator& precond) {
    state.x.assign(x0.begin(), x0.end());
    state.g = model.gradient(state.x);
    const Vector z = apply_or_copy(precond, state.g);
    state.p = scaled(-1.0, z);
    state.h = model.curvature(state.p);
    const double pth = dot(state.p, state.h);
    if (std::abs(pth) <= kBreakdownThreshold) return StepStatus::Breakdown;
    const double alpha = -dot(state.g, state.p) / pth;
    axpy(alpha, state.p, state.x);
    return StepStatus::Ok;
}

StepStatus u_pcg(PcgState& state, const QuadraticModel& model, const Operator& precond) {
    state.g = model.gradient(state.x);
    const Vector z = apply_or_copy(precond, state.g);
    const double beta = dot(z, state.h) / dot(state.p, state.h);
    for (std::size_t k = 0; k < state.p.size(); ++k) state.p[k] = -z[k] + beta * state.p[k];
    state.h = model.curvature(state.p);
    const double pth = dot(state.p, state.h);
    if (std::abs(pth) <= kBreakdownThreshold) return StepStatus::Breakdown;
    const double alpha = -dot(state.g, state.p) / pth;
    axpy(alpha, state.p, state.x);
    return StepStatus::Ok;
}

StepStatus u_cg(PcgState& state, const QuadraticModel& model) { return u_pcg(state, model, Operator{}); }

StepStatus u_tpcg(PcgState& state, const QuadraticModel& transformed) { return u_cg(state, transformed); }

RunResult run_cg_family(const Problem& problem, const Image& x0, const CgFamilySpec& spec,
                        const DriverOptions& options) {
    check_problem(problem, x0);
    check_options(options);
    if (spec.sup) spec.sup->validate();
    const TraceRecorder recorder(problem, options);
    const auto image_of = [&](const Vector& v) { return apply_or_copy(spec.to_image, v); };

    RunResult result;
    PcgState state;
    Vector x_half = x0.data;
    const StepStatus init = pcg_init(state, x0.data, spec.model, spec.precond);
    if (options.observer) options.observer({0, x_half, state});

    std::size_t k = 1;
    SuperiorizationState ell;
    bool broke_down = init == StepStatus::Breakdown;
    for (;;) {
        IterationRecord rec = recorder.record(k, image_of(x_half));
        rec.ell = ell.ell;
        result.trace.push_back(rec);
        if (spec.criterion_scale * rec.f <= options.eps) {
            result.status = RunStatus::Terminated;
            break;
        }
        if (broke_down) {
            result.status = RunStatus::Breakdown;
            break;
        }
        if (k >= options.max_iter) {
            result.status = RunStatus::MaxIter;
            break;
        }
        if (spec.sup) {
            const Image current(problem.rows, problem.cols, image_of(state.x));
            auto [s, next] = s_tv(current, ell, *spec.sup);
            result.trace.back().s_norm = norm(s);
            ell = next;
            x_half = add(state.x, apply_or_copy(spec.perturb_map, s));
        } else {
            x_half = state.x;
        }
        state.x = x_half;
        broke_down = u_pcg(state, spec.model, spec.precond) == StepStatus::Breakdown;
        if (options.observer) options.observer({k, x_half, state});
        ++k;
    }
    result.k = k;
    result.x_out = Image(problem.rows, problem.cols, std::move(x_half));
    return result;
}

RunResult cg(const Problem& problem, const Image& x0, const DriverOptions& options) {
    CgFamilySpec spec{least_squares_model(problem.r, problem.b), {}, {}, {}, std::nullopt, 0.5};
    return run_cg_family(problem, x0, spec, options);
}

RunResult pcg(const Problem& problem, const Image& x0, const Preconditioner& m, const DriverOptions& options) {
    CgFamilySpec spec{least_squares_model(problem.r, problem.b),
                      [&m](std::span<const double> g) { return m.apply_M(g); },
                      {},
                      {},
                      std::nullopt,
                      1.0};
    return run_cg_family(problem, x0, spec, options);
}

RunResult pcg_identity(const Problem& problem, const Image& x0, const DriverOptions& options) {
    CgFamilySpec spec{least_squares_model(problem.r, problem.b), {}, {}, {}, std::nullopt, 1.0};
    return run_cg_family(problem, x0, spec, options);
}

RunResult sup_cg(const Problem& problem, const Image& x0, const SuperiorizationParams& params,
                 const DriverOptions& options) {
    CgFamilySpec spec{least_squares_model(problem.r, problem.b), {}, {}, {}, params, 0.5};
    return run_cg_family(problem, x0, spec, options);
}

RunResult sup_pcg(const Problem& problem, const Image& x0, const SuperiorizationParams& params,
                  const Preconditioner& m, const DriverOptions& options) {
    CgFamilySpec spec{least_squares_model(problem.r, problem.b),
                      [&m](std::span<const double> g) { return m.apply_M(g); },
                      {},
                      {},
                      params,
                      1.0};
    return run_cg_family(problem, x0, spec, options);
}

RunResult sup_tpcg(const Problem& problem, const Image& x0_hat, const SuperiorizationParams& params,
                   const Preconditioner& n, const DriverOptions& options) {
    CgFamilySpec spec{transformed_model(problem.r, problem.b, n),
                      {},
                      [&n](std::span<const double> v) { return n.apply_N(v); },
                      [&n](std::span<const double> s) { return n.apply_N_inv_T(s); },
                      params,
                      1.0};
    return run_cg_family(problem, x0_hat, spec, options);
}

void ArtParams::validate() const {
    if (r && !(*r > 0.0)) throw Error("ART: r must be positive");
    if (!(lambda > 0.0 && lambda < 2.0)) throw Error("ART: lambda must lie in (0,2), got " + std::to_string(lambda));
}

ArtState art_start(const Image& x0, std::size_t n_measurements) { return {x0, Vector(n_measurements, 0.0)}; }

void art_sweep(ArtState& state, const SparseMatrix& r, std::span<const double> b, const ArtParams& params) {
    if (b.size() != r.n_rows() || state.u.size() != r.n_rows() || state.x.size() != r.n_cols()) {
        throw Error("art_sweep: dimension mismatch between R, data, and state");
    }
    auto& x = state.x.data;
    if (!params.r) {
        for (std::size_t i = 0; i < r.n_rows(); ++i) {
            const double nrm2 = r.row_norm2(i);
            if (nrm2 == 0.0) continue;
            const double step = params.lambda * (b[i] - r.row_dot(i, x)) / nrm2;
            r.add_scaled_row(i, step, x);
        }
        return;
    }
    // Kaczmarz on r R x + u = r b: the minimum-norm solution in (x - mu_x, u) minimizes
    // r^2 ||R x - b||^2 + ||x - mu_x||^2.
    const double snr = *params.r;
    for (std::size_t i = 0; i < r.n_rows(); ++i) {
        const double c = params.lambda * (snr * (b[i] - r.row_dot(i, x)) - state.u[i]) /
                         (1.0 + snr * snr * r.row_norm2(i));
        state.u[i] += c;
        r.add_scaled_row(i, snr * c, x);
    }
}

namespace {

RunResult run_art_family(const Problem& problem, const Image& x0, const ArtParams& art_params,
                         const std::optional<SuperiorizationParams>& sup, const DriverOptions& options) {
    check_problem(problem, x0);
    check_options(options);
    art_params.validate();
    if (art_params.r && art_params.mu_x.size() != x0.size()) throw Error("ART: prior image size mismatch");
    if (sup) sup->validate();
    const TraceRecorder recorder(problem, options);

    RunResult result;
    ArtState state = art_start(x0, problem.r.n_rows());
    Vector x_half = x0.data;
    art_sweep(state, problem.r, problem.b, art_params);

    std::size_t k = 1;
    SuperiorizationState ell;
    for (;;) {
        IterationRecord rec = recorder.record(k, x_half);
        rec.ell = ell.ell;
        result.trace.push_back(rec);
        if (rec.f <= options.eps) {
            result.status = RunStatus::Terminated;
            break;
        }
        if (k >= options.max_iter) {
            result.status = RunStatus::MaxIter;
            break;
        }
        if (sup) {
            auto [s, next] = s_tv(state.x, ell, *sup);
            result.trace.back().s_norm = norm(s);
            ell = next;
            axpy(1.0, s, state.x.data);
        }
        x_half = state.x.data;
        art_sweep(state, problem.r, problem.b, art_params);
        ++k;
    }
    result.k = k;
    result.x_out = Image(problem.rows, problem.cols, std::move(x_half));
    return result;
}

}  // namespace

RunResult art(const Problem& problem, const Image& x0, const ArtParams& params, const DriverOptions& options) {
    return run_art_family(problem, x0, params, std::nullopt, options);
}

RunResult sup_art(const Problem& problem, const Image& x0, const ArtParams& art_params,
                  const SuperiorizationParams& sup_params, const DriverOptions& options) {
    return run_art_family(problem, x0, art_params, sup_params, options);
}

double estimate_gray_level(std::span<const double> b, const ScanGeometry& geom) {
    if (b.size() != geom.n_measurements()) throw Error("estimate_gray_level: data length mismatch");
    double total = 0.0;
    for (double v : b) total += v;
    const double grid_area = static_cast<double>(geom.n_pixels()) * geom.pixel_size * geom.pixel_size;
    return total * geom.ray_spacing / (static_cast<double>(geom.n_angles) * grid_area);
}

}  // namespace supertomo

#include "supertomo/metrics.hpp"

#include <cmath>
#include <string>

#include "supertomo/error.hpp"
#include "supertomo/solvers.hpp"

namespace supertomo {

namespace {

void check_same_shape(const Image& x, const Image& phantom) {
    if (x.rows != phantom.rows || x.cols != phantom.cols) {
        throw Error("selective_error: image " + std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                    " vs phantom " + std::to_string(phantom.rows) + "x" + std::to_string(phantom.cols));
    }
}

}  // namespace

EllipseMask EllipseMask::centered(const ScanGeometry& geom, double semi_axis_h, double semi_axis_v) {
    EllipseMask mask{semi_axis_h, semi_axis_v, {}};
    for (std::size_t i = 0; i < geom.grid_rows; ++i) {
        const double y = geom.pixel_center_y(i) / semi_axis_v;
        for (std::size_t j = 0; j < geom.grid_cols; ++j) {
            const double x = geom.pixel_center_x(j) / semi_axis_h;
            if (x * x + y * y <= 1.0) mask.members.push_back(i * geom.grid_cols + j);
        }
    }
    return mask;
}

double residual_f(std::span<const double> x, const SparseMatrix& r, std::span<const double> b) {
    if (b.size() != r.n_rows()) {
        throw Error("residual_f: data has " + std::to_string(b.size()) + " entries, R has " +
                    std::to_string(r.n_rows()) + " rows");
    }
    return norm2(subtract(matvec(r, x), b));
}

double bayesian_objective(std::span<const double> x, const SparseMatrix& r, std::span<const double> b,
                          const ArtParams& params) {
    if (params.mu_x.size() != x.size()) throw Error("bayesian_objective: prior image size mismatch");
    if (!params.r) throw Error("bayesian objective: prior disabled (no r)");
    const double snr = *params.r;
    return snr * snr * residual_f(x, r, b) + norm2(subtract(x, params.mu_x.data));
}

Vector bayesian_gradient(std::span<const double> x, const SparseMatrix& r, std::span<const double> b,
                         const ArtParams& params) {
    if (params.mu_x.size() != x.size()) throw Error("bayesian_gradient: prior image size mismatch");
    if (!params.r) throw Error("bayesian objective: prior disabled (no r)");
    const double snr = *params.r;
    Vector g = rmatvec(r, subtract(matvec(r, x), b));
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * snr * snr * g[k] + 2.0 * (x[k] - params.mu_x.data[k]);
    return g;
}

double masked_error(const Image& x, const Image& phantom, const EllipseMask& mask) {
    check_same_shape(x, phantom);
    double acc = 0.0;
    for (auto k : mask.members) {
        const double d = x.data[k] - phantom.data[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double selective_error(const Image& x, const Image& phantom, const EllipseMask& mask) {
    check_same_shape(x, phantom);
    double ref = 0.0;
    for (auto k : mask.members) ref += phantom.data[k] * phantom.data[k];
    if (ref == 0.0) throw Error("selective_error: phantom is identically zero on the mask");
    return masked_error(x, phantom, mask) / std::sqrt(ref);
}

}  // namespace supertomo

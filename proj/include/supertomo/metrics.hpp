#pragma once

#include <cstddef>
#include <vector>

#include "supertomo/geometry.hpp"
#include "supertomo/linops.hpp"

namespace supertomo {

struct ArtParams;

/// Pixels whose centers lie inside a grid-centered axis-aligned ellipse.
struct EllipseMask {
    double semi_axis_h = 5.0;  // cm
    double semi_axis_v = 7.0;  // cm
    std::vector<std::size_t> members;

    static EllipseMask centered(const ScanGeometry& geom, double semi_axis_h = 5.0, double semi_axis_v = 7.0);
};

/// ||R x - b||^2
[[nodiscard]] double residual_f(std::span<const double> x, const SparseMatrix& r, std::span<const double> b);

/// r^2 ||R x - b||^2 + ||x - mu_X||^2
[[nodiscard]] double bayesian_objective(std::span<const double> x, const SparseMatrix& r, std::span<const double> b,
                                        const ArtParams& params);
/// Gradient of bayesian_objective.
[[nodiscard]] Vector bayesian_gradient(std::span<const double> x, const SparseMatrix& r, std::span<const double> b,
                                       const ArtParams& params);

/// sqrt of the squared error restricted to the mask, without the phantom-dependent constant.
[[nodiscard]] double masked_error(const Image& x, const Image& phantom, const EllipseMask& mask);

/// Selective error with C = 1 / ||phantom restricted to mask||, i.e. relative error on the mask.
[[nodiscard]] double selective_error(const Image& x, const Image& phantom, const EllipseMask& mask);

}  // namespace supertomo

#pragma once

// Shared generators and dense oracles for the test suites.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "supertomo/geometry.hpp"
#include "supertomo/linops.hpp"

namespace supertomo::testing {

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

/// Random sparse matrix with the given fill probability.
inline SparseMatrix random_sparse(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double fill) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    Vector dense(rows * cols, 0.0);
    for (auto& x : dense) {
        if (u(rng) < fill) x = val(rng);
    }
    return SparseMatrix::from_dense(rows, cols, dense);
}

inline Eigen::MatrixXd to_eigen(const SparseMatrix& a) {
    const Vector d = a.to_dense();
    Eigen::MatrixXd m(a.n_rows(), a.n_cols());
    for (std::size_t r = 0; r < a.n_rows(); ++r) {
        for (std::size_t c = 0; c < a.n_cols(); ++c) m(r, c) = d[r * a.n_cols() + c];
    }
    return m;
}

inline Eigen::VectorXd to_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

inline Vector from_eigen(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

/// Densifies a linear map by applying it to unit vectors.
template <typename Fn>
Eigen::MatrixXd densify(std::size_t n, Fn&& apply) {
    Eigen::MatrixXd m(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const Vector col = apply(e);
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
        e[j] = 0.0;
    }
    return m;
}

inline double rel_diff(const Vector& a, const Vector& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

/// Small square geometry covering a field of `n * pixel` cm with one ray per pixel column.
inline ScanGeometry small_geometry(std::size_t n, std::size_t n_angles, double pixel = 1.0) {
    ScanGeometry g;
    g.grid_rows = g.grid_cols = n;
    g.pixel_size = g.ray_spacing = pixel;
    g.n_angles = n_angles;
    g.n_rays = n + n / 2 + 1;
    return g;
}

}  // namespace supertomo::testing

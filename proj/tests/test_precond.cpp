#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "doctest.h"
#include "supertomo/error.hpp"
#include "supertomo/geometry.hpp"
#include "supertomo/precond.hpp"
#include "test_support.hpp"

using namespace supertomo;
using namespace supertomo::testing;

namespace {

PreconditionerSpec grid_spec(std::size_t rows, std::size_t cols, double mu = 1e-3, double rho = 0.6) {
    PreconditionerSpec s;
    s.mu = mu;
    s.rho = rho;
    s.grid_rows = rows;
    s.grid_cols = cols;
    return s;
}

}  // namespace

TEST_CASE("filter values") {
    CHECK(filter_value(0.0, grid_spec(4, 4, 1e-3, 0.6)) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(std::abs(filter_value(std::numbers::pi, grid_spec(4, 4, 1e-5, 1.0)) - (std::numbers::pi + 1e-5)) <= 1e-15);
    const auto s04 = grid_spec(4, 4, 1e-3, 0.4);
    CHECK(filter_value(std::numbers::pi, s04) == s04.floor);
    CHECK_THROWS_AS((void)filter_value(-0.1, s04), Error);
    CHECK_THROWS_AS((void)filter_value(3.2, s04), Error);
}

TEST_CASE("radial frequency map") {
    CHECK(radial_frequency(0, 0, 8, 8) == 0.0);
    CHECK(std::abs(radial_frequency(0, 1, 8, 8) - std::numbers::pi / 4) <= 1e-15);
    CHECK(std::abs(radial_frequency(0, 7, 8, 8) - std::numbers::pi / 4) <= 1e-15);  // wraps to -1
    CHECK(radial_frequency(4, 4, 8, 8) == std::numbers::pi);                         // clamped
}

TEST_CASE("preconditioner parameter validation") {
    CHECK_THROWS_AS(grid_spec(4, 4, 0.0, 0.6).validate(), Error);
    CHECK_THROWS_AS(grid_spec(4, 4, 1e-3, 0.0).validate(), Error);
    CHECK_THROWS_AS(grid_spec(4, 4, 1e-3, 1.5).validate(), Error);
    CHECK_THROWS_AS(grid_spec(0, 4).validate(), Error);
    CHECK_NOTHROW(grid_spec(4, 4, 1e-3, 1.0).validate());
}

TEST_CASE("every filter sample is at least the floor") {
    for (double rho : {0.4, 0.6, 0.8}) {
        const Preconditioner m(grid_spec(16, 12, 1e-5, rho));
        for (double d : m.diagonal()) CHECK(d >= 1e-8);
    }
}

TEST_CASE("M is symmetric and positive definite") {
    std::mt19937_64 rng(21);
    const Preconditioner m(grid_spec(16, 20));
    CHECK(m.apply_M(Vector(320, 0.0)) == Vector(320, 0.0));
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_vector(rng, 320);
        const auto y = random_vector(rng, 320);
        const Vector mx = m.apply_M(x);
        CHECK(std::abs(dot(mx, y) - dot(x, m.apply_M(y))) <= 1e-10 * norm(mx) * norm(y));
        CHECK(dot(mx, x) > 0.0);
    }
}

TEST_CASE("N is the symmetric square root and N^-T inverts it") {
    std::mt19937_64 rng(22);
    for (double rho : {0.4, 0.6, 1.0}) {
        const Preconditioner m(grid_spec(12, 16, 1e-4, rho));
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = random_vector(rng, 192);
            const auto y = random_vector(rng, 192);
            CHECK(rel_diff(m.apply_M(x), m.apply_N(m.apply_N(x))) <= 1e-10);
            CHECK(rel_diff(x, m.apply_N_inv_T(m.apply_N(x))) <= 1e-10);
            CHECK(rel_diff(x, m.apply_N(m.apply_N_inv_T(x))) <= 1e-10);
            const Vector nx = m.apply_N(x);
            CHECK(std::abs(dot(nx, y) - dot(x, m.apply_N(y))) <= 1e-10 * norm(nx) * norm(y));
        }
    }
}

TEST_CASE("identity override") {
    std::mt19937_64 rng(23);
    const auto id = Preconditioner::identity(6, 10);
    const auto x = random_vector(rng, 60);
    CHECK(rel_diff(x, id.apply_N(x)) <= 1e-15);
    CHECK(rel_diff(x, id.apply_M(x)) <= 1e-15);
    CHECK(rel_diff(x, id.apply_N_inv_T(x)) <= 1e-15);
}

TEST_CASE("M, N and N^-T are linear") {
    std::mt19937_64 rng(24);
    const Preconditioner m(grid_spec(10, 10));
    using Apply = Vector (Preconditioner::*)(std::span<const double>) const;
    for (Apply op : {&Preconditioner::apply_M, &Preconditioner::apply_N, &Preconditioner::apply_N_inv_T}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto x = random_vector(rng, 100);
            const auto y = random_vector(rng, 100);
            const double alpha = 1.7;
            const double beta = -0.3;
            Vector combo = scaled(alpha, x);
            axpy(beta, y, combo);
            Vector expected = scaled(alpha, (m.*op)(x));
            axpy(beta, (m.*op)(y), expected);
            CHECK(rel_diff(expected, (m.*op)(combo)) <= 1e-12);
        }
    }
}

TEST_CASE("M applied to a single Fourier mode scales it by the filter") {
    const std::size_t rows = 8;
    const std::size_t cols = 12;
    const auto spec = grid_spec(rows, cols, 1e-3, 0.8);
    const Preconditioner m(spec);
    for (auto [u, v] : {std::pair<std::size_t, std::size_t>{0, 0}, {1, 2}, {3, 5}, {4, 6}}) {
        Vector mode(rows * cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                mode[i * cols + j] = std::cos(2.0 * std::numbers::pi * (static_cast<double>(u * i) / rows +
                                                                      static_cast<double>(v * j) / cols));
            }
        }
        const double gain = filter_value(radial_frequency(u, v, rows, cols), spec);
        CHECK(rel_diff(scaled(gain, mode), m.apply_M(mode)) <= 1e-12);
    }
}

TEST_CASE("spectrum of MA equals spectrum of N A N^T") {
    const auto g = small_geometry(8, 10);
    const auto r = build_projection_matrix(g);
    const Preconditioner m(grid_spec(8, 8, 1e-3, 0.6));
    const std::size_t n = 64;
    const Eigen::MatrixXd a = densify(n, [&](const Vector& x) { return normal_op(r, x); });
    const Eigen::MatrixXd md = densify(n, [&](const Vector& x) { return m.apply_M(x); });
    const Eigen::MatrixXd nd = densify(n, [&](const Vector& x) { return m.apply_N(x); });
    const Eigen::MatrixXd ma = md * a;
    const Eigen::MatrixXd nan = nd * a * nd.transpose();

    Eigen::EigenSolver<Eigen::MatrixXd> general(ma, false);
    std::vector<double> lhs;
    for (Eigen::Index i = 0; i < general.eigenvalues().size(); ++i) {
        CHECK(std::abs(general.eigenvalues()[i].imag()) <= 1e-8 * nan.norm());
        lhs.push_back(general.eigenvalues()[i].real());
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(0.5 * (nan + nan.transpose()));
    std::vector<double> rhs(sym.eigenvalues().data(), sym.eigenvalues().data() + n);
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    const double scale = rhs.back();
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-8 * scale);
}

TEST_CASE("concurrent application gives identical results") {
    std::mt19937_64 rng(25);
    const Preconditioner m(grid_spec(32, 32));
    const auto x = random_vector(rng, 1024);
    const Vector expected = m.apply_M(x);
    std::vector<Vector> results(8);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < results.size(); ++t) {
        workers.emplace_back([&, t] {
            for (int rep = 0; rep < 20; ++rep) results[t] = m.apply_M(x);
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("shape mismatch is rejected") {
    const Preconditioner m(grid_spec(4, 4));
    CHECK_THROWS_AS((void)m.apply_M(Vector(15, 0.0)), Error);
    CHECK_THROWS_AS((void)m.apply_N(Vector(17, 0.0)), Error);
    CHECK_THROWS_AS((void)m.apply_N_inv_T(Vector(3, 0.0)), Error);
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "supertomo/error.hpp"
#include "supertomo/geometry.hpp"
#include "test_support.hpp"

using namespace supertomo;
using namespace supertomo::testing;

namespace {

ScanGeometry single_pixel() {
    ScanGeometry g;
    g.n_angles = 1;
    g.n_rays = 1;
    g.grid_rows = g.grid_cols = 1;
    g.pixel_size = g.ray_spacing = 1.0;
    return g;
}

std::vector<std::size_t> support(const SparseMatrix& r, std::size_t row) {
    return {r.col_idx().begin() + static_cast<std::ptrdiff_t>(r.row_ptr()[row]),
            r.col_idx().begin() + static_cast<std::ptrdiff_t>(r.row_ptr()[row + 1])};
}

double row_sum(const SparseMatrix& r, std::size_t row) {
    double s = 0.0;
    for (std::size_t k = r.row_ptr()[row]; k < r.row_ptr()[row + 1]; ++k) s += r.values()[k];
    return s;
}

}  // namespace

TEST_CASE("a single ray through a unit pixel has chord length 1") {
    const auto r = build_projection_matrix(single_pixel());
    REQUIRE(r.n_rows() == 1);
    REQUIRE(r.nnz() == 1);
    CHECK(std::abs(r.values()[0] - 1.0) <= 1e-12);
}

TEST_CASE("single-pixel chords match the analytic square intersection at every angle") {
    auto g = single_pixel();
    g.n_angles = 16;
    const auto r = build_projection_matrix(g);
    for (std::size_t a = 0; a < g.n_angles; ++a) {
        const double theta = std::numbers::pi * static_cast<double>(a) / 16.0;
        // A central line through a unit square has length 1 / max(|cos|, |sin|).
        const double expected = 1.0 / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
        CHECK(std::abs(row_sum(r, a) - expected) <= 1e-12);
    }
}

TEST_CASE("off-center single-pixel chords match the analytic value") {
    // Line x cos t + y sin t = s through [-1/2, 1/2]^2, chord computed by clipping the
    // parametrized line against the slab in each coordinate.
    auto chord = [](double theta, double s) {
        const double c = std::cos(theta);
        const double sn = std::sin(theta);
        double lo = -1e300;
        double hi = 1e300;
        const double px = s * c;
        const double py = s * sn;
        const double dx = -sn;
        const double dy = c;
        for (auto [p, d] : {std::pair{px, dx}, std::pair{py, dy}}) {
            if (std::abs(d) < 1e-15) {
                if (std::abs(p) > 0.5) return 0.0;
                continue;
            }
            double t0 = (-0.5 - p) / d;
            double t1 = (0.5 - p) / d;
            if (t0 > t1) std::swap(t0, t1);
            lo = std::max(lo, t0);
            hi = std::min(hi, t1);
        }
        return std::max(0.0, hi - lo);
    };
    ScanGeometry g = single_pixel();
    g.n_angles = 12;
    g.n_rays = 5;
    g.ray_spacing = 0.3;
    const auto r = build_projection_matrix(g);
    for (std::size_t a = 0; a < g.n_angles; ++a) {
        for (std::size_t ray = 0; ray < g.n_rays; ++ray) {
            const double expected = chord(g.angle(a), g.ray_offset(ray));
            CHECK(std::abs(row_sum(r, a * g.n_rays + ray) - expected) <= 1e-12);
        }
    }
}

TEST_CASE("rays outside the grid give zero rows") {
    auto g = single_pixel();
    g.n_rays = 3;
    g.ray_spacing = 2.0;  // offsets -2, 0, 2 against a half-width of 0.5
    const auto r = build_projection_matrix(g);
    CHECK(support(r, 0).empty());
    CHECK(support(r, 1).size() == 1);
    CHECK(support(r, 2).empty());
}

TEST_CASE("angle-0 rays cross one column and angle pi/2 rays one row") {
    const auto g = small_geometry(8, 2);  // angles 0 and pi/2
    const auto r = build_projection_matrix(g);
    std::size_t interior = 0;
    for (std::size_t ray = 0; ray < g.n_rays; ++ray) {
        const auto cols0 = support(r, ray);
        if (!cols0.empty()) {
            ++interior;
            CHECK(cols0.size() == 8);
            for (auto c : cols0) CHECK(c % 8 == cols0.front() % 8);
            CHECK(std::abs(row_sum(r, ray) - 8.0) <= 1e-12);
        }
        const auto cols1 = support(r, g.n_rays + ray);
        if (!cols1.empty()) {
            CHECK(cols1.size() == 8);
            for (auto c : cols1) CHECK(c / 8 == cols1.front() / 8);
            CHECK(std::abs(row_sum(r, g.n_rays + ray) - 8.0) <= 1e-12);
        }
    }
    CHECK(interior == 8);
}

TEST_CASE("desk geometry: row sums at angle 0 and ray weights bounded by the diagonal") {
    const auto g = ScanGeometry::desk_scale();
    const auto r = build_projection_matrix(g);
    CHECK(r.n_rows() == 8550);
    CHECK(r.n_cols() == 4096);
    std::size_t full = 0;
    for (std::size_t ray = 0; ray < g.n_rays; ++ray) {
        if (r.row_ptr()[ray + 1] > r.row_ptr()[ray]) {
            ++full;
            CHECK(std::abs(row_sum(r, ray) - 64.0 * g.pixel_size) <= 1e-12);
        }
    }
    CHECK(full == 64);
    const double diagonal = std::sqrt(2.0) * 64.0 * g.pixel_size;
    for (std::size_t row = 0; row < r.n_rows(); ++row) CHECK(row_sum(r, row) <= diagonal * (1.0 + 1e-12));
}

TEST_CASE("projection matrix of a pixelized disk is symmetric between 0 and pi/2") {
    const auto g = small_geometry(16, 2);
    const auto r = build_projection_matrix(g);
    const auto disk = generate_phantom({EllipseSpec{0, 0, 5.5, 5.5, 0, 1.0}}, g);
    const Vector p = matvec(r, disk.data);
    for (std::size_t ray = 0; ray < g.n_rays; ++ray) CHECK(std::abs(p[ray] - p[g.n_rays + ray]) <= 1e-12);
}

TEST_CASE("analytic projection of a centered disk is rotation invariant") {
    ScanGeometry g = ScanGeometry::desk_scale();
    g.n_angles = 180;
    const auto sino = analytic_projection({EllipseSpec{0, 0, 6.0, 6.0, 0.4, 0.2}}, g);
    for (std::size_t a = 1; a < g.n_angles; ++a) {
        for (std::size_t ray = 0; ray < g.n_rays; ++ray) {
            const double ref = sino.data[ray];
            const double v = sino.data[a * g.n_rays + ray];
            CHECK(std::abs(v - ref) <= 1e-8 * std::max(std::abs(ref), 1e-300));
        }
    }
}

TEST_CASE("ellipse chord length matches the closed form for a circle") {
    const EllipseSpec disk{0.5, -0.25, 2.0, 2.0, 0.0, 1.0};
    for (double theta : {0.0, 0.4, 1.3, 2.9}) {
        const double center_s = 0.5 * std::cos(theta) - 0.25 * std::sin(theta);
        for (double d : {0.0, 0.5, 1.9, 2.1}) {
            const double expected = d < 2.0 ? 2.0 * std::sqrt(4.0 - d * d) : 0.0;
            CHECK(std::abs(disk.chord_length(theta, center_s + d) - expected) <= 1e-12);
        }
    }
}

TEST_CASE("matrix projection converges toward the analytic projection") {
    // Not an exact identity: pixelization error shrinks with resolution.
    const std::vector<EllipseSpec> e{{0.0, 0.0, 6.0, 4.0, 0.3, 0.2}};
    double previous = 1e300;
    for (std::size_t n : {32, 64, 128}) {
        ScanGeometry g;
        g.grid_rows = g.grid_cols = n;
        g.pixel_size = g.ray_spacing = 18.27 / static_cast<double>(n);
        g.n_rays = n + n / 2 + 1;
        g.n_angles = 12;
        const auto r = build_projection_matrix(g);
        const Vector p = matvec(r, generate_phantom(e, g).data);
        const auto exact = analytic_projection(e, g);
        const double err = rel_diff(exact.data, p);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 0.02);
}

TEST_CASE("phantom generation examples") {
    const auto g = small_geometry(6, 4);
    CHECK(generate_phantom({}, g) == Image(6, 6, 0.0));

    const auto full = generate_phantom({EllipseSpec{0, 0, 100, 100, 0, 0.21}}, g);
    for (double v : full.data) CHECK(v == 0.21);

    const auto desk = ScanGeometry::desk_scale();
    const auto nested = generate_phantom({EllipseSpec{0, 0, 5.9, 7.9, 0, 0.416}, EllipseSpec{0, 0, 5.4, 7.4, 0, -0.206}}, desk);
    std::size_t ring = 0;
    for (std::size_t i = 0; i < desk.grid_rows; ++i) {
        for (std::size_t j = 0; j < desk.grid_cols; ++j) {
            const double x = desk.pixel_center_x(j);
            const double y = desk.pixel_center_y(i);
            const double v = nested.at(i, j);
            const bool inner = (x / 5.4) * (x / 5.4) + (y / 7.4) * (y / 7.4) <= 1.0;
            const bool outer = (x / 5.9) * (x / 5.9) + (y / 7.9) * (y / 7.9) <= 1.0;
            if (inner) {
                CHECK(std::abs(v - 0.21) <= 1e-15);
            } else if (outer) {
                CHECK(v == 0.416);
                ++ring;
            } else {
                CHECK(v == 0.0);
            }
        }
    }
    CHECK(ring > 0);
}

TEST_CASE("pixel centers: row 0 is the top of the grid") {
    const auto g = small_geometry(4, 1);
    CHECK(g.pixel_center_x(0) == -1.5);
    CHECK(g.pixel_center_y(0) == 1.5);
    const auto img = generate_phantom({EllipseSpec{0.0, 1.5, 0.4, 0.4, 0, 1.0}}, g);
    CHECK(img.at(0, 1) == 0.0);
    const auto top = generate_phantom({EllipseSpec{-1.5, 1.5, 0.4, 0.4, 0, 1.0}}, g);
    CHECK(top.at(0, 0) == 1.0);
    CHECK(top.at(3, 0) == 0.0);
}

TEST_CASE("invalid geometries are rejected") {
    ScanGeometry g = single_pixel();
    g.grid_rows = 0;
    CHECK_THROWS_AS((void)build_projection_matrix(g), Error);
    g = single_pixel();
    g.pixel_size = 0.0;
    CHECK_THROWS_AS((void)build_projection_matrix(g), Error);
}

TEST_CASE("noiseless simulation equals the forward projection") {
    const auto g = small_geometry(8, 6);
    const auto r = build_projection_matrix(g);
    const auto phantom = generate_phantom({EllipseSpec{0.5, 0.2, 2.5, 1.5, 0.7, 0.3}}, g);
    const auto sino = simulate_data(r, g, phantom, std::nullopt, 1);
    CHECK(sino.data == matvec(r, phantom.data));
    CHECK(simulate_data(r, g, Image(8, 8, 0.0), std::nullopt, 1).data == Vector(r.n_rows(), 0.0));
    CHECK_THROWS_AS((void)simulate_data(r, g, phantom, 0.0, 1), Error);
    CHECK_THROWS_AS((void)simulate_data(r, g, phantom, -3.0, 1), Error);
}

TEST_CASE("noisy simulation is reproducible for a fixed seed") {
    const auto g = ScanGeometry::desk_scale();
    const auto r = build_projection_matrix(g);
    const auto phantom = generate_phantom(default_phantom_ellipses(), g);
    const auto a = simulate_data(r, g, phantom, 1e6, 42);
    const auto b = simulate_data(r, g, phantom, 1e6, 42);
    const auto c = simulate_data(r, g, phantom, 1e6, 43);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
}

TEST_CASE("Poisson noise is unbiased to within Monte-Carlo error") {
    // One ray whose exact line integral is 1: a unit pixel of attenuation 1.
    const auto g = single_pixel();
    const auto r = build_projection_matrix(g);
    const Image phantom(1, 1, 1.0);
    constexpr int kDraws = 10000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int s = 0; s < kDraws; ++s) {
        const double v = simulate_data(r, g, phantom, 1e5, static_cast<std::uint64_t>(s)).data[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / kDraws;
    const double var = (sum2 - kDraws * mean * mean) / (kDraws - 1);
    const double stderr_mean = std::sqrt(var / kDraws);
    CHECK(std::abs(mean - 1.0) <= 3.0 * stderr_mean);
    // Delta-method variance of -ln(count/N) is 1 / (N e^-1).
    CHECK(std::abs(var * 1e5 * std::exp(-1.0) - 1.0) < 0.1);
}

TEST_CASE("Poisson sampler moments across both sampling regimes") {
    PoissonSampler sampler(123);
    for (double mean : {0.5, 3.0, 9.5, 10.0, 50.0, 1e4}) {
        constexpr int n = 40000;
        double sum = 0.0;
        double sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(sampler(mean));
            sum += k;
            sum2 += k * k;
        }
        const double m = sum / n;
        const double var = sum2 / n - m * m;
        CHECK(std::abs(m - mean) <= 4.0 * std::sqrt(mean / n));
        CHECK(std::abs(var / mean - 1.0) < 0.05);
    }
}

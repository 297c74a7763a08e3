#include "supertomo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "supertomo/error.hpp"

namespace supertomo {

namespace {

// Direction cosines below this magnitude are treated as exactly zero so that rays at
// 0 and pi/2 stay grid-aligned despite cos(pi/2) != 0 in floating point.
constexpr double kAxisSnap = 1e-14;

double snap(double v) { return std::abs(v) < kAxisSnap ? 0.0 : v; }

}  // namespace

double ScanGeometry::angle(std::size_t a) const {
    return std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
}

double ScanGeometry::ray_offset(std::size_t r) const {
    double s = (static_cast<double>(r) - 0.5 * static_cast<double>(n_rays - 1)) * ray_spacing;
    if ((n_rays + grid_cols) % 2 == 1) s += 0.5 * ray_spacing;
    return s;
}

double ScanGeometry::pixel_center_x(std::size_t j) const {
    return (static_cast<double>(j) + 0.5 - 0.5 * static_cast<double>(grid_cols)) * pixel_size;
}

double ScanGeometry::pixel_center_y(std::size_t i) const {
    return (0.5 * static_cast<double>(grid_rows) - static_cast<double>(i) - 0.5) * pixel_size;
}

void ScanGeometry::validate() const {
    if (grid_rows == 0 || grid_cols == 0 || !(pixel_size > 0.0)) {
        throw Error("ScanGeometry: grid has zero extent (rows=" + std::to_string(grid_rows) +
                    ", cols=" + std::to_string(grid_cols) + ", pixel_size=" + std::to_string(pixel_size) + ")");
    }
    if (n_angles == 0 || n_rays == 0) throw Error("ScanGeometry: n_angles and n_rays must be positive");
    if (!(ray_spacing > 0.0)) throw Error("ScanGeometry: ray_spacing must be positive");
}

bool EllipseSpec::contains(double x, double y) const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double dx = x - center_x;
    const double dy = y - center_y;
    const double u = (dx * c + dy * s) / semi_axis_a;
    const double v = (-dx * s + dy * c) / semi_axis_b;
    return u * u + v * v <= 1.0;
}

double EllipseSpec::chord_length(double theta, double s) const {
    // Rotate the ray into the ellipse frame, then intersect with the unit-circle image.
    const double phi = theta - rotation;
    const double s_local = s - center_x * std::cos(theta) - center_y * std::sin(theta);
    const double a2 = semi_axis_a * semi_axis_a * std::cos(phi) * std::cos(phi) +
                      semi_axis_b * semi_axis_b * std::sin(phi) * std::sin(phi);
    const double disc = a2 - s_local * s_local;
    if (disc <= 0.0) return 0.0;
    return 2.0 * semi_axis_a * semi_axis_b * std::sqrt(disc) / a2;
}

SparseMatrix build_projection_matrix(const ScanGeometry& geom) {
    geom.validate();
    const double ps = geom.pixel_size;
    const double xmin = -0.5 * static_cast<double>(geom.grid_cols) * ps;
    const double xmax = -xmin;
    const double ymax = 0.5 * static_cast<double>(geom.grid_rows) * ps;
    const double ymin = -ymax;

    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    Vector values;
    std::vector<double> ts;
    std::vector<std::pair<std::size_t, double>> entries;

    for (std::size_t a = 0; a < geom.n_angles; ++a) {
        const double theta = geom.angle(a);
        const double c = snap(std::cos(theta));
        const double sn = snap(std::sin(theta));
        const double dx = -sn;
        const double dy = c;
        for (std::size_t r = 0; r < geom.n_rays; ++r) {
            const double s = geom.ray_offset(r);
            const double x0 = s * c;
            const double y0 = s * sn;

            // Slab clipping of the line x0 + t*d against the grid box.
            double tmin = -std::numeric_limits<double>::infinity();
            double tmax = std::numeric_limits<double>::infinity();
            bool hits = true;
            if (dx == 0.0) {
                hits = x0 >= xmin && x0 < xmax;
            } else {
                const double t1 = (xmin - x0) / dx;
                const double t2 = (xmax - x0) / dx;
                tmin = std::max(tmin, std::min(t1, t2));
                tmax = std::min(tmax, std::max(t1, t2));
            }
            if (dy == 0.0) {
                hits = hits && y0 > ymin && y0 <= ymax;
            } else {
                const double t1 = (ymin - y0) / dy;
                const double t2 = (ymax - y0) / dy;
                tmin = std::max(tmin, std::min(t1, t2));
                tmax = std::min(tmax, std::max(t1, t2));
            }

            entries.clear();
            if (hits && tmax > tmin) {
                ts.clear();
                ts.push_back(tmin);
                ts.push_back(tmax);
                if (dx != 0.0) {
                    for (std::size_t k = 1; k < geom.grid_cols; ++k) {
                        const double t = (xmin + static_cast<double>(k) * ps - x0) / dx;
                        if (t > tmin && t < tmax) ts.push_back(t);
                    }
                }
                if (dy != 0.0) {
                    for (std::size_t k = 1; k < geom.grid_rows; ++k) {
                        const double t = (ymin + static_cast<double>(k) * ps - y0) / dy;
                        if (t > tmin && t < tmax) ts.push_back(t);
                    }
                }
                std::sort(ts.begin(), ts.end());
                for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                    const double len = ts[k + 1] - ts[k];
                    if (!(len > 1e-12 * ps)) continue;
                    const double tm = 0.5 * (ts[k] + ts[k + 1]);
                    const double xm = x0 + tm * dx;
                    const double ym = y0 + tm * dy;
                    const auto j = static_cast<long>(std::floor((xm - xmin) / ps));
                    const auto i = static_cast<long>(std::floor((ymax - ym) / ps));
                    if (j < 0 || i < 0 || j >= static_cast<long>(geom.grid_cols) ||
                        i >= static_cast<long>(geom.grid_rows)) {
                        continue;
                    }
                    entries.emplace_back(static_cast<std::size_t>(i) * geom.grid_cols + static_cast<std::size_t>(j), len);
                }
                std::sort(entries.begin(), entries.end(),
                          [](const auto& l, const auto& r) { return l.first < r.first; });
            }
            for (std::size_t k = 0; k < entries.size(); ++k) {
                if (!col_idx.empty() && values.size() > row_ptr.back() && col_idx.back() == entries[k].first) {
                    values.back() += entries[k].second;
                } else {
                    col_idx.push_back(entries[k].first);
                    values.push_back(entries[k].second);
                }
            }
            row_ptr.push_back(values.size());
        }
    }
    return {geom.n_measurements(), geom.n_pixels(), std::move(row_ptr), std::move(col_idx), std::move(values)};
}

Image generate_phantom(const std::vector<EllipseSpec>& ellipses, const ScanGeometry& geom) {
    geom.validate();
    Image img(geom.grid_rows, geom.grid_cols, 0.0);
    for (std::size_t i = 0; i < geom.grid_rows; ++i) {
        const double y = geom.pixel_center_y(i);
        for (std::size_t j = 0; j < geom.grid_cols; ++j) {
            const double x = geom.pixel_center_x(j);
            double v = 0.0;
            for (const auto& e : ellipses) {
                if (e.contains(x, y)) v += e.delta_value;
            }
            img.at(i, j) = v;
        }
    }
    return img;
}

Sinogram analytic_projection(const std::vector<EllipseSpec>& ellipses, const ScanGeometry& geom) {
    geom.validate();
    Sinogram out{Vector(geom.n_measurements(), 0.0), geom};
    for (std::size_t a = 0; a < geom.n_angles; ++a) {
        const double theta = geom.angle(a);
        for (std::size_t r = 0; r < geom.n_rays; ++r) {
            double acc = 0.0;
            for (const auto& e : ellipses) acc += e.delta_value * e.chord_length(theta, geom.ray_offset(r));
            out.data[a * geom.n_rays + r] = acc;
        }
    }
    return out;
}

std::vector<EllipseSpec> default_phantom_ellipses() {
    return {
        // skull: 0.416 ring, 0.21 interior
        {0.0, 0.0, 5.9, 7.9, 0.0, 0.416},
        {0.0, 0.0, 5.4, 7.4, 0.0, -0.206},
        // low-contrast inserts
        {-1.1, 1.0, 0.8, 2.0, 0.3, -0.005},
        {1.2, 1.2, 0.7, 1.6, -0.3, -0.005},
        {0.0, 3.6, 1.0, 1.0, 0.0, 0.004},
        {0.0, -3.6, 0.6, 0.6, 0.0, 0.006},
        {-2.1, -2.0, 0.5, 0.35, 0.6, 0.005},
        {2.2, -2.0, 0.4, 0.4, 0.0, -0.004},
        {0.0, 0.0, 0.35, 0.35, 0.0, 0.006},
    };
}

double PoissonSampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t PoissonSampler::operator()(double mean) {
    if (!(mean >= 0.0)) throw Error("PoissonSampler: mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

Sinogram simulate_data(const SparseMatrix& r, const ScanGeometry& geom, const Image& phantom,
                       std::optional<double> mean_photons, std::uint64_t seed) {
    if (r.n_rows() != geom.n_measurements() || r.n_cols() != phantom.size()) {
        throw Error("simulate_data: projection matrix " + std::to_string(r.n_rows()) + "x" +
                    std::to_string(r.n_cols()) + " does not match geometry/phantom");
    }
    Sinogram out{matvec(r, phantom.data), geom};
    if (!mean_photons) return out;
    if (!(*mean_photons > 0.0)) throw Error("simulate_data: mean_photons must be positive");
    PoissonSampler sampler(seed);
    for (auto& v : out.data) {
        const double expected = *mean_photons * std::exp(-v);
        const auto count = std::max<std::uint64_t>(1, sampler(expected));
        v = -std::log(static_cast<double>(count) / *mean_photons);
    }
    return out;
}

}  // namespace supertomo

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "supertomo/linops.hpp"

namespace supertomo {

/// Parallel-beam acquisition: n_angles equally spaced in [0, pi), n_rays parallel rays per
/// angle. The grid is centered at the origin, x to the right along columns, y upward with
/// row 0 at the top. Lengths are in cm.
struct ScanGeometry {
    std::size_t n_angles = 90;
    std::size_t n_rays = 95;
    double ray_spacing = 0.0752 * 243.0 / 64.0;
    double pixel_size = 0.0752 * 243.0 / 64.0;
    std::size_t grid_rows = 64;
    std::size_t grid_cols = 64;

    /// 64x64 grid, 90 angles, 95 rays, covering the same 18.27 cm field as a 243x243 grid
    /// of 0.0752 cm pixels.
    static ScanGeometry desk_scale() { return {}; }

    [[nodiscard]] std::size_t n_measurements() const { return n_angles * n_rays; }
    [[nodiscard]] std::size_t n_pixels() const { return grid_rows * grid_cols; }
    [[nodiscard]] double angle(std::size_t a) const;
    /// Signed detector offset of ray r. Rays are spaced ray_spacing apart about the grid
    /// center; when n_rays and grid_cols differ in parity the lattice is shifted by half a
    /// spacing so that angle-0 rays pass through pixel centers instead of pixel edges.
    [[nodiscard]] double ray_offset(std::size_t r) const;
    [[nodiscard]] double pixel_center_x(std::size_t j) const;
    [[nodiscard]] double pixel_center_y(std::size_t i) const;

    void validate() const;
    bool operator==(const ScanGeometry&) const = default;
};

struct EllipseSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_axis_a = 1.0;  // along the rotated x axis
    double semi_axis_b = 1.0;
    double rotation = 0.0;     // radians, counter-clockwise
    double delta_value = 0.0;  // additive attenuation, 1/cm

    [[nodiscard]] bool contains(double x, double y) const;
    /// Length of the chord cut by the line {x cos(theta) + y sin(theta) = s}.
    [[nodiscard]] double chord_length(double theta, double s) const;
};

struct Sinogram {
    Vector data;  // index = angle_index * n_rays + ray_index
    ScanGeometry geometry;
};

[[nodiscard]] SparseMatrix build_projection_matrix(const ScanGeometry& geom);

[[nodiscard]] Image generate_phantom(const std::vector<EllipseSpec>& ellipses, const ScanGeometry& geom);

/// Closed-form line integrals of an ellipse phantom over the scan geometry.
[[nodiscard]] Sinogram analytic_projection(const std::vector<EllipseSpec>& ellipses, const ScanGeometry& geom);

/// Head-like test object: a high-attenuation skull ring around 0.21 1/cm brain tissue with
/// low-contrast inserts, sized for the 18.27 cm field of the desk-scale geometry.
[[nodiscard]] std::vector<EllipseSpec> default_phantom_ellipses();

/// Portable Poisson sampler driven by std::mt19937_64 (whose output sequence is fixed by the
/// standard). Uses multiplication of uniforms for small means and Hormann's PTRS
/// transformed rejection for mean >= 10.
class PoissonSampler {
public:
    explicit PoissonSampler(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t operator()(double mean);
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    std::mt19937_64 engine_;
};

/// Noiseless data when mean_photons is empty; otherwise Poisson photon counts with the given
/// blank-scan mean, clamped to >= 1 and converted back to line integrals.
[[nodiscard]] Sinogram simulate_data(const SparseMatrix& r, const ScanGeometry& geom, const Image& phantom,
                                     std::optional<double> mean_photons, std::uint64_t seed);

}  // namespace supertomo

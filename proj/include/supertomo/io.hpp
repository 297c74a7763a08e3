#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "supertomo/geometry.hpp"
#include "supertomo/linops.hpp"
#include "supertomo/solvers.hpp"

namespace supertomo {

/// "SUPTOMO-VEC1": magic, u64 length, f64 payload, little-endian.
void save_vector(std::span<const double> v, const std::filesystem::path& path);
[[nodiscard]] Vector load_vector(const std::filesystem::path& path);

/// Text sidecar (path with extension .hdr) holding key=value metadata for a .vec file.
[[nodiscard]] std::filesystem::path header_path(const std::filesystem::path& vec_path);

void save_image(const Image& img, const ScanGeometry& geom, const std::filesystem::path& path);
/// Loads an image and the geometry stored in its header.
[[nodiscard]] Image load_image(const std::filesystem::path& path, ScanGeometry* geom = nullptr);

void save_sinogram(const Sinogram& sino, const std::filesystem::path& path);
[[nodiscard]] Sinogram load_sinogram(const std::filesystem::path& path);

/// Display window mapping attenuation to 8-bit gray: values <= lo are 0, >= hi are 255,
/// linear in between, rounded to nearest with halves rounded up.
struct DisplayWindow {
    double lo = 0.204;
    double hi = 0.21675;
    [[nodiscard]] std::uint8_t gray(double value) const;
};

/// Binary P5 PGM preview.
void save_pgm(const Image& img, const std::filesystem::path& path, DisplayWindow window = {});

/// One ellipse per line: center_x center_y a b rotation delta; '#' starts a comment.
[[nodiscard]] std::vector<EllipseSpec> parse_phantom_spec(std::istream& in);
[[nodiscard]] std::vector<EllipseSpec> read_phantom_spec(const std::filesystem::path& path);
void write_phantom_spec(const std::vector<EllipseSpec>& ellipses, std::ostream& out);

inline constexpr const char* kCurveSchema = "# supertomo-curve v1";
inline constexpr const char* kCurveHeader = "k,seconds,f,tv,se";

/// Writes the versioned curve CSV (one row per trace record). Doubles use 17 significant
/// digits so the file parses back exactly.
void write_curve_csv(const std::vector<IterationRecord>& trace, std::ostream& out);
[[nodiscard]] std::vector<IterationRecord> read_curve_csv(std::istream& in);

[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(const std::string& text);

}  // namespace supertomo

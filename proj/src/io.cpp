#include "supertomo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "binary_io.hpp"
#include "supertomo/error.hpp"

namespace supertomo {

namespace {

constexpr std::string_view kVecMagic = "SUPTOMO-VEC1";

using KeyValues = std::map<std::string, std::string>;

void write_geometry(std::ostream& os, const ScanGeometry& g) {
    os << "n_angles=" << g.n_angles << "\n"
       << "n_rays=" << g.n_rays << "\n"
       << "ray_spacing=" << format_double(g.ray_spacing) << "\n"
       << "pixel_size=" << format_double(g.pixel_size) << "\n"
       << "grid_rows=" << g.grid_rows << "\n"
       << "grid_cols=" << g.grid_cols << "\n";
}

KeyValues read_header(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open header " + path.string());
    KeyValues kv;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("malformed header line in " + path.string() + ": " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string& require(const KeyValues& kv, const std::string& key, const std::filesystem::path& path) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error("header " + path.string() + " lacks key " + key);
    return it->second;
}

std::size_t parse_size(const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw Error("not an unsigned integer: " + text);
    return v;
}

ScanGeometry geometry_from(const KeyValues& kv, const std::filesystem::path& path) {
    ScanGeometry g;
    g.n_angles = parse_size(require(kv, "n_angles", path));
    g.n_rays = parse_size(require(kv, "n_rays", path));
    g.ray_spacing = parse_double(require(kv, "ray_spacing", path));
    g.pixel_size = parse_double(require(kv, "pixel_size", path));
    g.grid_rows = parse_size(require(kv, "grid_rows", path));
    g.grid_cols = parse_size(require(kv, "grid_cols", path));
    g.validate();
    return g;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << text;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error("not a number: '" + text + "'");
    }
    if (used != text.size()) throw Error("not a number: '" + text + "'");
    return v;
}

void save_vector(std::span<const double> v, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    detail::write_magic(os, kVecMagic);
    detail::write_u64(os, v.size());
    for (double x : v) detail::write_f64(os, x);
    if (!os) throw Error("write failed: " + path.string());
}

Vector load_vector(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    detail::expect_magic(is, kVecMagic);
    const auto n = detail::read_u64(is, "length");
    Vector v(n);
    for (auto& x : v) x = detail::read_f64(is, "payload");
    return v;
}

std::filesystem::path header_path(const std::filesystem::path& vec_path) {
    auto p = vec_path;
    p.replace_extension(".hdr");
    return p;
}

void save_image(const Image& img, const ScanGeometry& geom, const std::filesystem::path& path) {
    if (img.rows != geom.grid_rows || img.cols != geom.grid_cols) throw Error("save_image: image/grid mismatch");
    save_vector(img.data, path);
    std::ostringstream hdr;
    hdr << "# supertomo image header v1\nkind=image\n";
    write_geometry(hdr, geom);
    write_text(header_path(path), hdr.str());
}

Image load_image(const std::filesystem::path& path, ScanGeometry* geom) {
    const auto hp = header_path(path);
    const KeyValues kv = read_header(hp);
    if (require(kv, "kind", hp) != "image") throw Error(hp.string() + " does not describe an image");
    const ScanGeometry g = geometry_from(kv, hp);
    if (geom != nullptr) *geom = g;
    return Image(g.grid_rows, g.grid_cols, load_vector(path));
}

void save_sinogram(const Sinogram& sino, const std::filesystem::path& path) {
    if (sino.data.size() != sino.geometry.n_measurements()) throw Error("save_sinogram: length/geometry mismatch");
    save_vector(sino.data, path);
    std::ostringstream hdr;
    hdr << "# supertomo sinogram header v1\nkind=sinogram\n";
    write_geometry(hdr, sino.geometry);
    write_text(header_path(path), hdr.str());
}

Sinogram load_sinogram(const std::filesystem::path& path) {
    const auto hp = header_path(path);
    const KeyValues kv = read_header(hp);
    if (require(kv, "kind", hp) != "sinogram") throw Error(hp.string() + " does not describe a sinogram");
    Sinogram s{load_vector(path), geometry_from(kv, hp)};
    if (s.data.size() != s.geometry.n_measurements()) throw Error(path.string() + ": length disagrees with header");
    return s;
}

std::uint8_t DisplayWindow::gray(double value) const {
    if (!(value > lo)) return 0;
    if (value >= hi) return 255;
    return static_cast<std::uint8_t>(std::floor((value - lo) / (hi - lo) * 255.0 + 0.5));
}

void save_pgm(const Image& img, const std::filesystem::path& path, DisplayWindow window) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    for (double v : img.data) os.put(static_cast<char>(window.gray(v)));
    if (!os) throw Error("write failed: " + path.string());
}

std::vector<EllipseSpec> parse_phantom_spec(std::istream& in) {
    std::vector<EllipseSpec> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> nums;
        std::string tok;
        while (ls >> tok) {
            try {
                nums.push_back(parse_double(tok));
            } catch (const Error&) {
                throw Error("phantom spec line " + std::to_string(line_no) + ": not a number '" + tok + "'");
            }
        }
        if (nums.empty()) continue;
        if (nums.size() != 6) {
            throw Error("phantom spec line " + std::to_string(line_no) + ": expected 6 numbers, found " +
                        std::to_string(nums.size()));
        }
        if (!(nums[2] > 0.0 && nums[3] > 0.0)) {
            throw Error("phantom spec line " + std::to_string(line_no) + ": semi-axes must be positive");
        }
        out.push_back({nums[0], nums[1], nums[2], nums[3], nums[4], nums[5]});
    }
    return out;
}

std::vector<EllipseSpec> read_phantom_spec(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open phantom spec " + path.string());
    return parse_phantom_spec(is);
}

void write_phantom_spec(const std::vector<EllipseSpec>& ellipses, std::ostream& out) {
    out << "# center_x center_y a b rotation delta\n";
    for (const auto& e : ellipses) {
        out << format_double(e.center_x) << " " << format_double(e.center_y) << " " << format_double(e.semi_axis_a)
            << " " << format_double(e.semi_axis_b) << " " << format_double(e.rotation) << " "
            << format_double(e.delta_value) << "\n";
    }
}

void write_curve_csv(const std::vector<IterationRecord>& trace, std::ostream& out) {
    out << kCurveSchema << "\n" << kCurveHeader << "\n";
    for (const auto& r : trace) {
        out << r.k << "," << format_double(r.seconds) << "," << format_double(r.f) << "," << format_double(r.tv) << ","
            << format_double(r.se) << "\n";
    }
}

std::vector<IterationRecord> read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCurveSchema) throw Error("curve CSV: missing schema line");
    if (!std::getline(in, line) || line != kCurveHeader) throw Error("curve CSV: unexpected header");
    std::vector<IterationRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw Error("curve CSV: expected 5 columns in '" + line + "'");
        IterationRecord r;
        r.k = parse_size(cells[0]);
        r.seconds = parse_double(cells[1]);
        r.f = parse_double(cells[2]);
        r.tv = parse_double(cells[3]);
        r.se = parse_double(cells[4]);
        out.push_back(r);
    }
    return out;
}

}  // namespace supertomo

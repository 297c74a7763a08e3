#include "supertomo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <limits>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "supertomo/error.hpp"
#include "supertomo/io.hpp"
#include "supertomo/metrics.hpp"

namespace supertomo {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kDataKeys = {"grid_rows", "grid_cols", "n_angles", "n_rays", "ray_spacing", "pixel_size",
                                         "phantom",   "mean_photons", "seed", "out",  "sinogram",    "truth"};
const std::set<std::string> kRunKeys = {"algorithm", "label", "eps", "max_iter", "x0"};
const std::set<std::string> kSupKeys = {"K", "a", "gamma"};
const std::set<std::string> kPrecondKeys = {"mu", "rho", "floor"};
const std::set<std::string> kArtKeys = {"r", "lambda"};

bool uses_sup(Algorithm a) {
    return a == Algorithm::SupCg || a == Algorithm::SupPcg || a == Algorithm::SupTpcg || a == Algorithm::SupArt;
}
bool uses_precond(Algorithm a) { return a == Algorithm::Pcg || a == Algorithm::SupPcg || a == Algorithm::SupTpcg; }
bool uses_art(Algorithm a) { return a == Algorithm::Art || a == Algorithm::SupArt; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const Error&) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': not a nonnegative integer: '" + value + "'");
    }
    return v;
}

void apply_algorithm_defaults(ExperimentConfig& c) {
    switch (c.algorithm) {
        case Algorithm::SupCg:
            c.sup = {40, 1.0 - 1e-5, 5e-2};
            break;
        case Algorithm::Pcg:
            c.mu = 1e-3;
            c.rho = 0.6;
            break;
        case Algorithm::SupPcg:
        case Algorithm::SupTpcg:
            c.sup = {40, 1.0 - 1e-5, 1e-2};
            c.mu = 1e-5;
            c.rho = 0.8;
            break;
        case Algorithm::Art:
            c.r = 5.0;
            c.lambda = 1e-2;
            break;
        case Algorithm::SupArt:
            c.sup = {10, 1.0 - 1e-5, 1e-2};
            c.r = 5.0;
            c.lambda = 5e-2;
            break;
        case Algorithm::Cg:
            break;
    }
}

ExperimentConfig config_from_input(const CommandInput& input, const Assignments& extra = {}) {
    Assignments kv;
    for (const auto& f : input.config_files) {
        auto more = read_assignments(f);
        kv.insert(kv.end(), more.begin(), more.end());
    }
    for (const auto& o : input.overrides) kv.push_back(parse_assignment(o));
    kv.insert(kv.end(), extra.begin(), extra.end());
    if (input.seed) kv.emplace_back("seed", std::to_string(*input.seed));
    if (input.out) kv.emplace_back("out", *input.out);
    return ExperimentConfig::from_assignments(kv);
}

Assignments input_assignments(const CommandInput& input) {
    Assignments kv;
    for (const auto& f : input.config_files) {
        auto more = read_assignments(f);
        kv.insert(kv.end(), more.begin(), more.end());
    }
    for (const auto& o : input.overrides) kv.push_back(parse_assignment(o));
    if (input.seed) kv.emplace_back("seed", std::to_string(*input.seed));
    if (input.out) kv.emplace_back("out", *input.out);
    return kv;
}

Image initial_image(const ExperimentConfig& c, const Sinogram& sino) {
    const auto& g = sino.geometry;
    if (c.x0 == "zero") return Image(g.grid_rows, g.grid_cols, 0.0);
    return Image(g.grid_rows, g.grid_cols, estimate_gray_level(sino.data, g));
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    return os;
}

std::string describe(const Assignments& set) {
    std::string out;
    for (const auto& [k, v] : set) {
        if (k == "algorithm") continue;
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Cg: return "cg";
        case Algorithm::Pcg: return "pcg";
        case Algorithm::SupCg: return "supcg";
        case Algorithm::SupPcg: return "suppcg";
        case Algorithm::SupTpcg: return "suptpcg";
        case Algorithm::Art: return "art";
        case Algorithm::SupArt: return "supart";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::Cg, Algorithm::Pcg, Algorithm::SupCg, Algorithm::SupPcg, Algorithm::SupTpcg,
                   Algorithm::Art, Algorithm::SupArt}) {
        if (algorithm_name(a) == name) return a;
    }
    throw ConfigError("config key 'algorithm': unknown algorithm '" + name + "'");
}

int exit_code_for(RunStatus status) {
    switch (status) {
        case RunStatus::Terminated: return kExitTerminated;
        case RunStatus::MaxIter: return kExitMaxIter;
        case RunStatus::Breakdown: return kExitBreakdown;
    }
    return kExitFailure;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
    auto key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + text + "'");
    return {key, trim(text.substr(eq + 1))};
}

Assignments parse_assignments(std::istream& in, const std::string& source) {
    Assignments kv;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        try {
            kv.push_back(parse_assignment(line));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return kv;
}

Assignments read_assignments(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    return parse_assignments(is, path.string());
}

ExperimentConfig ExperimentConfig::from_assignments(const Assignments& kv) {
    ExperimentConfig c;
    for (const auto& [k, v] : kv) {
        if (k == "algorithm") c.algorithm = parse_algorithm(v);
    }
    apply_algorithm_defaults(c);
    for (const auto& [k, v] : kv) {
        const bool known = kDataKeys.contains(k) || kRunKeys.contains(k) || kSupKeys.contains(k) ||
                           kPrecondKeys.contains(k) || kArtKeys.contains(k);
        if (!known) throw ConfigError("unknown config key '" + k + "'");
        if ((kSupKeys.contains(k) && !uses_sup(c.algorithm)) ||
            (kPrecondKeys.contains(k) && !uses_precond(c.algorithm)) ||
            (kArtKeys.contains(k) && !uses_art(c.algorithm))) {
            throw ConfigError("config key '" + k + "' is not a parameter of algorithm " + algorithm_name(c.algorithm));
        }
        if (k == "grid_rows") c.geometry.grid_rows = to_uint(k, v);
        else if (k == "grid_cols") c.geometry.grid_cols = to_uint(k, v);
        else if (k == "n_angles") c.geometry.n_angles = to_uint(k, v);
        else if (k == "n_rays") c.geometry.n_rays = to_uint(k, v);
        else if (k == "ray_spacing") c.geometry.ray_spacing = to_double(k, v);
        else if (k == "pixel_size") c.geometry.pixel_size = to_double(k, v);
        else if (k == "phantom") c.phantom = v;
        else if (k == "mean_photons") c.mean_photons = (v == "none") ? std::nullopt : std::optional(to_double(k, v));
        else if (k == "seed") c.seed = to_uint(k, v);
        else if (k == "out") c.out = v;
        else if (k == "sinogram") c.sinogram = v;
        else if (k == "truth") c.truth = v;
        else if (k == "label") c.label = v;
        else if (k == "eps") c.eps = to_double(k, v);
        else if (k == "max_iter") c.max_iter = to_uint(k, v);
        else if (k == "x0") c.x0 = v;
        else if (k == "K") c.sup.K = static_cast<int>(to_uint(k, v));
        else if (k == "a") c.sup.a = to_double(k, v);
        else if (k == "gamma") c.sup.gamma = to_double(k, v);
        else if (k == "mu") c.mu = to_double(k, v);
        else if (k == "rho") c.rho = to_double(k, v);
        else if (k == "floor") c.floor = to_double(k, v);
        else if (k == "r") c.r = to_double(k, v);
        else if (k == "lambda") c.lambda = to_double(k, v);
    }
    try {
        c.geometry.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (c.mean_photons && !(*c.mean_photons > 0.0)) throw ConfigError("config key 'mean_photons': must be positive");
    if (!(c.eps > 0.0)) throw ConfigError("config key 'eps': must be positive");
    if (c.max_iter < 1) throw ConfigError("config key 'max_iter': must be >= 1");
    if (c.x0 != "zero" && c.x0 != "gray") throw ConfigError("config key 'x0': expected zero|gray");
    try {
        if (uses_sup(c.algorithm)) c.sup.validate();
        if (uses_precond(c.algorithm)) c.precond_spec().validate();
        if (uses_art(c.algorithm)) ArtParams{c.r, c.lambda, {}}.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return c;
}

PreconditionerSpec ExperimentConfig::precond_spec() const {
    return {mu, rho, floor, geometry.grid_rows, geometry.grid_cols};
}

std::vector<EllipseSpec> phantom_ellipses(const ExperimentConfig& config) {
    return config.phantom.empty() ? default_phantom_ellipses() : read_phantom_spec(config.phantom);
}

Experiment simulate_experiment(const ExperimentConfig& config) {
    Experiment e{config.geometry, build_projection_matrix(config.geometry), {}, {}};
    e.phantom = generate_phantom(phantom_ellipses(config), config.geometry);
    e.sinogram = simulate_data(e.projector, config.geometry, e.phantom, config.mean_photons, config.seed);
    return e;
}

Reconstruction reconstruct(const ExperimentConfig& config, const SparseMatrix& projector, const Sinogram& sinogram,
                           const Image* phantom) {
    const auto& g = sinogram.geometry;
    if (projector.n_rows() != g.n_measurements() || projector.n_cols() != g.n_pixels()) {
        throw Error("reconstruct: projector does not match sinogram geometry");
    }
    const Problem problem{projector, sinogram.data, g.grid_rows, g.grid_cols};
    const EllipseMask mask = EllipseMask::centered(g);
    DriverOptions options;
    options.eps = config.eps;
    options.max_iter = config.max_iter;
    if (phantom != nullptr) {
        options.phantom = phantom;
        options.mask = &mask;
    }
    const Image x0 = initial_image(config, sinogram);
    const ArtParams art_params{config.r, config.lambda, Image(g.grid_rows, g.grid_cols, estimate_gray_level(sinogram.data, g))};

    Reconstruction out;
    switch (config.algorithm) {
        case Algorithm::Cg:
            out.run = cg(problem, x0, options);
            break;
        case Algorithm::Pcg:
            out.run = pcg(problem, x0, Preconditioner(config.precond_spec()), options);
            break;
        case Algorithm::SupCg:
            out.run = sup_cg(problem, x0, config.sup, options);
            break;
        case Algorithm::SupPcg:
            out.run = sup_pcg(problem, x0, config.sup, Preconditioner(config.precond_spec()), options);
            break;
        case Algorithm::SupTpcg: {
            const Preconditioner n(config.precond_spec());
            const Image x0_hat(g.grid_rows, g.grid_cols, n.apply_N_inv_T(x0.data));
            out.run = sup_tpcg(problem, x0_hat, config.sup, n, options);
            out.image = Image(g.grid_rows, g.grid_cols, n.apply_N(out.run.x_out.data));
            return out;
        }
        case Algorithm::Art:
            out.run = art(problem, x0, art_params, options);
            break;
        case Algorithm::SupArt:
            out.run = sup_art(problem, x0, art_params, config.sup, options);
            break;
    }
    out.image = out.run.x_out;
    return out;
}

CurveSummary summarize_curve(const std::vector<IterationRecord>& trace, std::size_t window) {
    CurveSummary s{0, std::numeric_limits<double>::infinity()};
    const std::size_t n = window == 0 ? trace.size() : std::min(window, trace.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (trace[i].se < s.min_se) {
            s.min_se = trace[i].se;
            s.argmin_k = trace[i].k;
        }
    }
    return s;
}

std::vector<Assignments> expand_grid_line(const std::string& line) {
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
        auto [key, value] = parse_assignment(tok);
        std::vector<std::string> values;
        std::istringstream vs(value);
        std::string v;
        while (std::getline(vs, v, ',')) {
            if (v.empty()) throw ConfigError("grid: empty value for key '" + key + "'");
            values.push_back(v);
        }
        if (values.empty()) throw ConfigError("grid: no values for key '" + key + "'");
        axes.emplace_back(key, std::move(values));
    }
    std::vector<Assignments> sets{Assignments{}};
    for (const auto& [key, values] : axes) {
        std::vector<Assignments> next;
        for (const auto& partial : sets) {
            for (const auto& v : values) {
                auto s = partial;
                s.emplace_back(key, v);
                next.push_back(std::move(s));
            }
        }
        sets = std::move(next);
    }
    return axes.empty() ? std::vector<Assignments>{} : sets;
}

std::vector<Assignments> read_grid(std::istream& in) {
    std::vector<Assignments> sets;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto more = expand_grid_line(line);
        sets.insert(sets.end(), more.begin(), more.end());
    }
    return sets;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("SUPTOMO_THREADS")) {
        unsigned v = 0;
        const std::string s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const Assignments& base_kv,
                                const std::vector<Assignments>& sets, unsigned threads) {
    if (sets.empty()) throw ConfigError("sweep: empty parameter grid");
    std::vector<ExperimentConfig> configs;
    for (const auto& set : sets) {
        Assignments kv = base_kv;
        kv.insert(kv.end(), set.begin(), set.end());
        auto c = ExperimentConfig::from_assignments(kv);
        c.max_iter = kSweepIterations;
        configs.push_back(std::move(c));
    }
    const Experiment exp = simulate_experiment(base);

    std::vector<SweepRow> rows(sets.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                const auto rec = reconstruct(configs[i], exp.projector, exp.sinogram, &exp.phantom);
                const auto summary = summarize_curve(rec.run.trace, kSweepIterations);
                rows[i] = {i, algorithm_name(configs[i].algorithm), describe(sets[i]), summary.min_se, summary.argmin_k};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& l, const SweepRow& r) { return l.min_se < r.min_se; });
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "# supertomo-sweep v1\n";
    out << "rank,index,algorithm,params,min_se,argmin_k\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << i + 1 << "," << r.index << "," << r.algorithm << "," << r.params << "," << format_double(r.min_se) << ","
            << r.argmin_k << "\n";
    }
}

void write_compare_csv(const std::vector<CompareCurve>& curves, std::ostream& out) {
    out << "# supertomo-compare v1\n";
    out << "algorithm," << kCurveHeader << "\n";
    for (const auto& c : curves) {
        for (const auto& r : c.trace) {
            out << c.algorithm << "," << r.k << "," << format_double(r.seconds) << "," << format_double(r.f) << ","
                << format_double(r.tv) << "," << format_double(r.se) << "\n";
        }
    }
    out << "# summary\n";
    out << "algorithm,argmin_k,min_se\n";
    for (const auto& c : curves) {
        const auto s = summarize_curve(c.trace);
        out << c.algorithm << "," << s.argmin_k << "," << format_double(s.min_se) << "\n";
    }
}

std::vector<CompareCurve> read_compare_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "# supertomo-compare v1") throw Error("compare CSV: missing schema line");
    if (!std::getline(in, line) || line != std::string("algorithm,") + kCurveHeader) {
        throw Error("compare CSV: unexpected header");
    }
    std::vector<CompareCurve> curves;
    while (std::getline(in, line) && line != "# summary") {
        const auto cells = split_csv(line);
        if (cells.size() != 6) throw Error("compare CSV: expected 6 columns in '" + line + "'");
        if (curves.empty() || curves.back().algorithm != cells[0] ||
            (!curves.back().trace.empty() && curves.back().trace.back().k >= std::stoull(cells[1]))) {
            curves.push_back({cells[0], {}});
        }
        IterationRecord r;
        r.k = static_cast<std::size_t>(std::stoull(cells[1]));
        r.seconds = parse_double(cells[2]);
        r.f = parse_double(cells[3]);
        r.tv = parse_double(cells[4]);
        r.se = parse_double(cells[5]);
        curves.back().trace.push_back(r);
    }
    return curves;
}

int cmd_phantom(const CommandInput& input, std::ostream& log) {
    return guarded(log, [&] {
        auto config = config_from_input(input);
        if (!input.phantom_spec.empty()) config.phantom = input.phantom_spec;
        const Image img = generate_phantom(phantom_ellipses(config), config.geometry);
        fs::create_directories(config.out);
        save_image(img, config.geometry, fs::path(config.out) / "phantom.vec");
        save_pgm(img, fs::path(config.out) / "phantom.pgm");
        log << "phantom " << img.rows << "x" << img.cols << " written to " << config.out << "\n";
        return static_cast<int>(kExitTerminated);
    });
}

int cmd_simulate(const CommandInput& input, std::ostream& log) {
    return guarded(log, [&] {
        const auto config = config_from_input(input);
        const Experiment e = simulate_experiment(config);
        fs::create_directories(config.out);
        save_image(e.phantom, e.geometry, fs::path(config.out) / "phantom.vec");
        save_pgm(e.phantom, fs::path(config.out) / "phantom.pgm");
        save_sinogram(e.sinogram, fs::path(config.out) / "sinogram.vec");
        log << "sinogram " << e.geometry.n_angles << "x" << e.geometry.n_rays << " ("
            << (config.mean_photons ? "Poisson, mean " + format_double(*config.mean_photons) : std::string("noiseless"))
            << ") written to " << config.out << "\n";
        return static_cast<int>(kExitTerminated);
    });
}

int cmd_reconstruct(const CommandInput& input, std::ostream& log) {
    return guarded(log, [&] {
        const auto config = config_from_input(input);
        const fs::path out(config.out);
        const fs::path sino_path = config.sinogram.empty() ? out / "sinogram.vec" : fs::path(config.sinogram);
        const Sinogram sino = load_sinogram(sino_path);
        std::optional<Image> truth;
        const fs::path truth_path = config.truth.empty() ? out / "phantom.vec" : fs::path(config.truth);
        if (!config.truth.empty() || fs::exists(truth_path)) truth = load_image(truth_path);
        const SparseMatrix projector = build_projection_matrix(sino.geometry);
        const auto rec = reconstruct(config, projector, sino, truth ? &*truth : nullptr);

        fs::create_directories(out);
        save_image(rec.image, sino.geometry, out / "reconstruction.vec");
        save_pgm(rec.image, out / "reconstruction.pgm");
        auto csv = open_out(out / "curve.csv");
        write_curve_csv(rec.run.trace, csv);

        const auto& last = rec.run.trace.back();
        log << config.display_label() << ": k=" << rec.run.k << " f=" << format_double(last.f)
            << " se=" << format_double(last.se);
        switch (rec.run.status) {
            case RunStatus::Terminated: log << " (terminated)\n"; break;
            case RunStatus::MaxIter: log << " (max_iter reached)\n"; break;
            case RunStatus::Breakdown: log << " (breakdown: p^T h vanished, residual " << format_double(last.f) << ")\n"; break;
        }
        return exit_code_for(rec.run.status);
    });
}

int cmd_sweep(const CommandInput& input, std::ostream& log) {
    return guarded(log, [&] {
        const Assignments base_kv = input_assignments(input);
        const auto base = ExperimentConfig::from_assignments(base_kv);
        std::ifstream grid(input.grid_file);
        if (!grid) throw ConfigError("cannot open grid file '" + input.grid_file + "'");
        const auto sets = read_grid(grid);
        const auto rows = run_sweep(base, base_kv, sets, worker_threads());
        fs::create_directories(base.out);
        auto csv = open_out(fs::path(base.out) / "sweep.csv");
        write_sweep_csv(rows, csv);
        log << "sweep: " << rows.size() << " parameter sets; best " << rows.front().algorithm << " "
            << rows.front().params << " min SE " << format_double(rows.front().min_se) << " at k="
            << rows.front().argmin_k << "\n";
        return static_cast<int>(kExitTerminated);
    });
}

int cmd_compare(const CommandInput& input, std::ostream& log) {
    return guarded(log, [&] {
        if (input.config_files.size() < 2) throw ConfigError("compare: need at least two --config files");
        std::vector<CompareCurve> curves;
        std::optional<Experiment> reference;
        std::string out_dir;
        for (const auto& file : input.config_files) {
            CommandInput single = input;
            single.config_files = {file};
            const auto config = config_from_input(single);
            if (out_dir.empty()) out_dir = config.out;
            Experiment e = simulate_experiment(config);
            if (reference && (e.phantom != reference->phantom || !(e.geometry == reference->geometry))) {
                throw ConfigError("compare: " + file + " uses a different phantom or geometry than " +
                                  input.config_files.front());
            }
            const auto rec = reconstruct(config, e.projector, e.sinogram, &e.phantom);
            curves.push_back({config.display_label(), rec.run.trace});
            if (!reference) reference = std::move(e);
        }
        fs::create_directories(out_dir);
        auto csv = open_out(fs::path(out_dir) / "compare.csv");
        write_compare_csv(curves, csv);
        for (const auto& c : curves) {
            const auto s = summarize_curve(c.trace);
            log << c.algorithm << ": min SE " << format_double(s.min_se) << " at k=" << s.argmin_k << "\n";
        }
        return static_cast<int>(kExitTerminated);
    });
}

}  // namespace supertomo

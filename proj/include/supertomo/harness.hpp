#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supertomo/geometry.hpp"
#include "supertomo/precond.hpp"
#include "supertomo/solvers.hpp"
#include "supertomo/tv.hpp"

namespace supertomo {

enum class Algorithm { Cg, Pcg, SupCg, SupPcg, SupTpcg, Art, SupArt };

[[nodiscard]] std::string algorithm_name(Algorithm a);
[[nodiscard]] Algorithm parse_algorithm(const std::string& name);

enum ExitCode : int {
    kExitTerminated = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitMaxIter = 3,
    kExitBreakdown = 4,
};

[[nodiscard]] int exit_code_for(RunStatus status);

/// Ordered key=value assignments; later entries override earlier ones.
using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Flat key=value text, one assignment per line, '#' comments.
[[nodiscard]] Assignments parse_assignments(std::istream& in, const std::string& source);
[[nodiscard]] Assignments read_assignments(const std::filesystem::path& path);
/// "key=value" from a --set flag.
[[nodiscard]] std::pair<std::string, std::string> parse_assignment(const std::string& text);

inline constexpr double kDefaultMeanPhotons = 1e6;
inline constexpr std::size_t kSweepIterations = 15;

struct ExperimentConfig {
    ScanGeometry geometry = ScanGeometry::desk_scale();
    std::string phantom;                      // ellipse spec file; empty selects the built-in phantom
    std::optional<double> mean_photons = kDefaultMeanPhotons;  // empty: noiseless data
    std::uint64_t seed = 1;

    Algorithm algorithm = Algorithm::SupPcg;
    std::string label;                        // defaults to the algorithm name
    SuperiorizationParams sup;
    double mu = 1e-5;
    double rho = 0.8;
    double floor = 1e-8;
    double r = 5.0;
    double lambda = 1e-2;
    double eps = 1e-12;
    std::size_t max_iter = 1000;
    std::string x0 = "gray";                  // zero | gray (uniform image at the data-estimated mean)

    std::string out = "out";
    std::string sinogram;                     // reconstruct input; default <out>/sinogram.vec
    std::string truth;                        // phantom image for SE; default <out>/phantom.vec if present

    /// Applies assignments on top of algorithm defaults. Unknown keys, malformed values,
    /// and parameters the selected algorithm does not use raise ConfigError naming the key.
    static ExperimentConfig from_assignments(const Assignments& kv);
    [[nodiscard]] std::string display_label() const { return label.empty() ? algorithm_name(algorithm) : label; }
    [[nodiscard]] PreconditionerSpec precond_spec() const;
};

/// Everything needed to run a reconstruction: geometry, projector, ground truth, data.
struct Experiment {
    ScanGeometry geometry;
    SparseMatrix projector;
    Image phantom;
    Sinogram sinogram;
};

[[nodiscard]] std::vector<EllipseSpec> phantom_ellipses(const ExperimentConfig& config);
[[nodiscard]] Experiment simulate_experiment(const ExperimentConfig& config);

struct Reconstruction {
    RunResult run;
    Image image;  // x_out mapped to the image domain
};

/// Runs the configured algorithm. phantom may be null (SE recorded as NaN).
[[nodiscard]] Reconstruction reconstruct(const ExperimentConfig& config, const SparseMatrix& projector,
                                         const Sinogram& sinogram, const Image* phantom);

struct CurveSummary {
    std::size_t argmin_k = 0;
    double min_se = 0.0;
};
/// Minimum SE over the first `window` records (all records when window is 0); ties keep the
/// earliest iteration.
[[nodiscard]] CurveSummary summarize_curve(const std::vector<IterationRecord>& trace, std::size_t window = 0);

/// Expands one grid line: whitespace-separated key=value tokens, comma-separated values
/// expand into the Cartesian product with the first key varying slowest.
[[nodiscard]] std::vector<Assignments> expand_grid_line(const std::string& line);
[[nodiscard]] std::vector<Assignments> read_grid(std::istream& in);

struct SweepRow {
    std::size_t index = 0;  // declaration order in the grid
    std::string algorithm;
    std::string params;
    double min_se = 0.0;
    std::size_t argmin_k = 0;
};

/// Runs every parameter set for kSweepIterations iterations against shared simulated data
/// and returns rows ranked by min SE; equal SE keeps declaration order.
[[nodiscard]] std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const Assignments& base_kv,
                                              const std::vector<Assignments>& sets, unsigned threads);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct CompareCurve {
    std::string algorithm;
    std::vector<IterationRecord> trace;
};
void write_compare_csv(const std::vector<CompareCurve>& curves, std::ostream& out);
[[nodiscard]] std::vector<CompareCurve> read_compare_csv(std::istream& in);

/// Worker count from SUPTOMO_THREADS, else hardware concurrency (at least 1).
[[nodiscard]] unsigned worker_threads();

/// Inputs common to every subcommand.
struct CommandInput {
    std::vector<std::string> config_files;
    std::vector<std::string> overrides;  // key=value
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string grid_file;  // sweep only
    std::string phantom_spec;  // phantom only: explicit spec file
};

/// Subcommands; each returns a process exit code and reports to `log`.
int cmd_phantom(const CommandInput& input, std::ostream& log);
int cmd_simulate(const CommandInput& input, std::ostream& log);
int cmd_reconstruct(const CommandInput& input, std::ostream& log);
int cmd_sweep(const CommandInput& input, std::ostream& log);
int cmd_compare(const CommandInput& input, std::ostream& log);

}  // namespace supertomo

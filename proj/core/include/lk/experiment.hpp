#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lk/ct.hpp"
#include "lk/engine.hpp"
#include "lk/forward_problem.hpp"
#include "lk/grid.hpp"
#include "lk/penalty.hpp"

namespace lk {

/// Bad key, value, or combination of settings. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProblemKind { ct, pde, custom_linear };
enum class NoiseKind { exact, relative };

const char* to_string(ProblemKind kind) noexcept;

struct ExperimentConfig {
    ProblemKind problem = ProblemKind::ct;

    // ct
    std::size_t grid_side = 64;
    std::size_t num_angles = 30;
    double angle_start = 0.0;
    double angle_stop = 180.0;
    std::size_t rays_per_angle = 0;  ///< 0 selects round(sqrt(2) q) + 1
    double detector_spacing = 1.0;

    // pde
    std::size_t mesh_m = 40;

    // custom-linear: matrix in coordinate format, plus either a ground truth
    // (data synthesized as A x) or the data itself; grids are whitespace-separated text
    std::string matrix_file;
    std::string truth_file;
    std::string data_file;
    std::size_t image_rows = 0;
    std::size_t image_cols = 0;

    PenaltyKind penalty = PenaltyKind::quadratic_tv;
    double mu = 1.0;
    bool nonnegative = true;

    /// delta is filled in from the noise model at run time.
    SolverConfig solver;
    Mode mode = Mode::plain;

    NoiseKind noise = NoiseKind::relative;
    double noise_level = 0.01;
    std::uint64_t seed = 1;

    std::string output_dir = "out";
    std::size_t metric_every = 1;  ///< metrics.csv keeps every k-th record and the last one
};

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// ct-paper, ct-desk, pde-paper, pde-desk. Throws ConfigError for other names.
ExperimentConfig make_preset(std::string_view name);

/// Applies one `key = value` setting. Unknown keys and malformed values throw ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines on top of `base`. Blank lines and lines starting
/// with '#' are skipped; repeated keys are an error.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Every key with its current value, one per line; parse_config reads it back.
std::string to_config_text(const ExperimentConfig& cfg);

/// Range and consistency checks beyond single values. Throws ConfigError.
void check_config(const ExperimentConfig& cfg);

ct::TomoGeometry make_geometry(const ExperimentConfig& cfg);

struct BuiltExperiment {
    std::unique_ptr<ForwardProblem> problem;
    std::optional<Grid> truth;
    double delta_abs = 0.0;
};

/// Forward operator, ground truth, and (noisy) data for the configured problem.
BuiltExperiment build_experiment(const ExperimentConfig& cfg);

/// Admissibility report for the solver scalars. gamma = 0 is supplied for the
/// linear problems; for the PDE problem c1 is not evaluated.
ValidationReport validate_experiment(const ExperimentConfig& cfg);

/// Whitespace-separated values, row-major; the count must equal rows * cols.
Grid read_grid_text(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
void write_grid_text(const std::filesystem::path& path, const Grid& g);

void write_metrics_csv(std::ostream& out, const RunTrace& trace, std::size_t every = 1);
void write_trace_csv(std::ostream& out, const RunTrace& trace);

/// Binary 8-bit PGM with min-max scaling; a constant image maps to 0.
void write_pgm(std::ostream& out, const Grid& image);
void write_pgm(const std::filesystem::path& path, const Grid& image);

struct ExperimentResult {
    int exit_code = 0;  ///< 0 success, 3 solver failure
    RunResult run;
    std::optional<double> final_rel_error;
    double delta_abs = 0.0;
    std::string message;
};

/// Builds the problem, runs the engine, and writes metrics.csv, trace.csv,
/// summary.json, and reconstruction.pgm into cfg.output_dir. The files are
/// written for solver failures too. Config and I/O problems throw ConfigError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace lk

#include "lk/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "lk/noise.hpp"
#include "lk/pde.hpp"
#include "lk/sparse.hpp"

namespace lk {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "': expected " +
                      std::string(expected));
}

double parse_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Setting {
    const char* key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Setting number(const char* key, T ExperimentConfig::*field) {
    return {key,
            [key, field](ExperimentConfig& c, std::string_view v) {
                if constexpr (std::is_floating_point_v<T>) {
                    c.*field = parse_double(key, v);
                } else {
                    c.*field = static_cast<T>(parse_u64(key, v));
                }
            },
            [field](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double(c.*field);
                else return std::to_string(c.*field);
            }};
}

template <class T>
Setting solver_number(const char* key, T SolverConfig::*field) {
    return {key,
            [key, field](ExperimentConfig& c, std::string_view v) {
                if constexpr (std::is_floating_point_v<T>) {
                    c.solver.*field = parse_double(key, v);
                } else {
                    const std::uint64_t n = parse_u64(key, v);
                    if (n > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) bad_value(key, v, "a smaller integer");
                    c.solver.*field = static_cast<T>(n);
                }
            },
            [field](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double(c.solver.*field);
                else return std::to_string(c.solver.*field);
            }};
}

Setting text(const char* key, std::string ExperimentConfig::*field) {
    return {key, [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(v); },
            [field](const ExperimentConfig& c) { return c.*field; }};
}

const std::vector<Setting>& settings() {
    static const std::vector<Setting> table = {
        {"problem",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "ct") c.problem = ProblemKind::ct;
             else if (v == "pde") c.problem = ProblemKind::pde;
             else if (v == "custom-linear") c.problem = ProblemKind::custom_linear;
             else bad_value("problem", v, "ct, pde or custom-linear");
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.problem)); }},
        number("grid_side", &ExperimentConfig::grid_side),
        number("num_angles", &ExperimentConfig::num_angles),
        number("angle_start", &ExperimentConfig::angle_start),
        number("angle_stop", &ExperimentConfig::angle_stop),
        number("rays_per_angle", &ExperimentConfig::rays_per_angle),
        number("detector_spacing", &ExperimentConfig::detector_spacing),
        number("mesh_m", &ExperimentConfig::mesh_m),
        text("matrix_file", &ExperimentConfig::matrix_file),
        text("truth_file", &ExperimentConfig::truth_file),
        text("data_file", &ExperimentConfig::data_file),
        number("image_rows", &ExperimentConfig::image_rows),
        number("image_cols", &ExperimentConfig::image_cols),
        {"penalty",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "quadratic") c.penalty = PenaltyKind::quadratic;
             else if (v == "quadratic-tv") c.penalty = PenaltyKind::quadratic_tv;
             else bad_value("penalty", v, "quadratic or quadratic-tv");
         },
         [](const ExperimentConfig& c) {
             return std::string(c.penalty == PenaltyKind::quadratic ? "quadratic" : "quadratic-tv");
         }},
        number("mu", &ExperimentConfig::mu),
        {"constraint",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "none") c.nonnegative = false;
             else if (v == "nonnegative") c.nonnegative = true;
             else bad_value("constraint", v, "none or nonnegative");
         },
         [](const ExperimentConfig& c) { return std::string(c.nonnegative ? "nonnegative" : "none"); }},
        solver_number("s", &SolverConfig::s),
        solver_number("beta0", &SolverConfig::beta0),
        solver_number("beta1", &SolverConfig::beta1),
        solver_number("sigma", &SolverConfig::sigma),
        solver_number("tau", &SolverConfig::tau),
        solver_number("alpha", &SolverConfig::alpha),
        solver_number("eta0", &SolverConfig::eta0),
        solver_number("gap_exponent", &SolverConfig::gap_exponent),
        solver_number("eta_max", &SolverConfig::eta_max),
        solver_number("eps_floor", &SolverConfig::eps_floor),
        solver_number("n_max", &SolverConfig::n_max),
        solver_number("blocks", &SolverConfig::blocks),
        solver_number("inner_max_iter", &SolverConfig::inner_max_iter),
        {"mode",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "plain") c.mode = Mode::plain;
             else if (v == "accelerated") c.mode = Mode::accelerated;
             else bad_value("mode", v, "plain or accelerated");
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }},
        {"noise",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "exact") c.noise = NoiseKind::exact;
             else if (v == "relative") c.noise = NoiseKind::relative;
             else bad_value("noise", v, "exact or relative");
         },
         [](const ExperimentConfig& c) { return std::string(c.noise == NoiseKind::exact ? "exact" : "relative"); }},
        number("noise_level", &ExperimentConfig::noise_level),
        number("seed", &ExperimentConfig::seed),
        text("output_dir", &ExperimentConfig::output_dir),
        number("metric_every", &ExperimentConfig::metric_every),
    };
    return table;
}

const Setting* find_setting(std::string_view key) {
    for (const auto& s : settings()) {
        if (key == s.key) return &s;
    }
    return nullptr;
}

std::vector<std::size_t> even_row_split(std::size_t rows, std::size_t blocks) {
    std::vector<std::size_t> bounds(blocks + 1);
    for (std::size_t b = 0; b <= blocks; ++b) bounds[b] = rows * b / blocks;
    return bounds;
}

Grid synthesize(const SparseMatrix& a, const Grid& truth) {
    return Grid::column(a.apply(truth.storage()));
}

std::string csv_number(double v) { return format_double(v); }

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

const char* to_string(ProblemKind kind) noexcept {
    switch (kind) {
        case ProblemKind::ct: return "ct";
        case ProblemKind::pde: return "pde";
        case ProblemKind::custom_linear: return "custom-linear";
    }
    return "unknown";
}

std::vector<std::string> preset_names() { return {"ct-paper", "ct-desk", "pde-paper", "pde-desk"}; }

ExperimentConfig make_preset(std::string_view name) {
    ExperimentConfig c;
    if (name == "ct-paper" || name == "ct-desk") {
        c.problem = ProblemKind::ct;
        c.penalty = PenaltyKind::quadratic_tv;
        c.mu = 1.0;
        c.nonnegative = true;
        c.solver.beta0 = 0.1 / c.mu;
        c.solver.beta1 = 10.0;
        c.solver.sigma = 0.001;
        c.solver.tau = 1.01;
        c.solver.alpha = 5.0;
        c.solver.gap_exponent = 2.2;
        c.noise = NoiseKind::relative;
        c.noise_level = 0.01;
        if (name == "ct-paper") {
            // 45 angles 1, 5, ..., 177 degrees; 367 rays per angle
            c.grid_side = 256;
            c.num_angles = 45;
            c.angle_start = 1.0;
            c.angle_stop = 181.0;
            c.rays_per_angle = 367;
        } else {
            c.grid_side = 64;
            c.num_angles = 30;
            c.angle_start = 0.0;
            c.angle_stop = 180.0;
            c.rays_per_angle = 0;
        }
        return c;
    }
    if (name == "pde-paper" || name == "pde-desk") {
        c.problem = ProblemKind::pde;
        c.penalty = PenaltyKind::quadratic_tv;
        c.mu = 20.0;
        c.nonnegative = false;
        c.solver.beta0 = 0.01 / c.mu;
        c.solver.beta1 = 2e4;
        c.solver.sigma = 0.001;
        c.solver.tau = 1.02;
        c.solver.alpha = 5.0;
        c.solver.gap_exponent = 1.5;
        c.noise = NoiseKind::relative;
        c.noise_level = 0.46e-3;
        c.mesh_m = name == "pde-paper" ? 100 : 40;
        return c;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    const Setting* s = find_setting(key);
    if (!s) throw ConfigError("unknown key '" + std::string(key) + "'");
    s->set(cfg, value);
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string_view key = trim(body.substr(0, eq));
        const std::string_view value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
        }
        try {
            apply_setting(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return parse_config(in, std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& s : settings()) {
        out += s.key;
        out += " = ";
        out += s.get(cfg);
        out += '\n';
    }
    return out;
}

void check_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    try {
        cfg.solver.check();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if (cfg.solver.delta != 0.0) fail("delta is derived from the noise model and cannot be set");
    if (!(cfg.mu > 0.0)) fail("mu must be positive");
    if (cfg.noise == NoiseKind::relative && !(cfg.noise_level > 0.0)) {
        fail("noise_level must be positive for relative noise (use noise = exact for clean data)");
    }
    if (cfg.metric_every < 1) fail("metric_every must be at least 1");
    if (cfg.output_dir.empty()) fail("output_dir must not be empty");
    switch (cfg.problem) {
        case ProblemKind::ct:
            if (cfg.grid_side < 8) fail("grid_side must be at least 8");
            if (cfg.num_angles < 1) fail("num_angles must be at least 1");
            if (!(cfg.angle_stop > cfg.angle_start)) fail("angle_stop must exceed angle_start");
            if (!(cfg.detector_spacing > 0.0)) fail("detector_spacing must be positive");
            if (cfg.solver.blocks > cfg.num_angles) fail("blocks cannot exceed num_angles");
            break;
        case ProblemKind::pde:
            if (cfg.mesh_m < 3) fail("mesh_m must be at least 3");
            if (cfg.solver.blocks != 1) fail("the pde problem has a single block");
            break;
        case ProblemKind::custom_linear:
            if (cfg.matrix_file.empty()) fail("custom-linear needs matrix_file");
            if (cfg.truth_file.empty() == cfg.data_file.empty()) {
                fail("custom-linear needs exactly one of truth_file and data_file");
            }
            if (cfg.image_rows < 1 || cfg.image_cols < 1) fail("custom-linear needs image_rows and image_cols");
            break;
    }
}

ct::TomoGeometry make_geometry(const ExperimentConfig& cfg) {
    ct::TomoGeometry geom;
    geom.grid_side = cfg.grid_side;
    geom.angles_deg = ct::evenly_spaced_angles(cfg.num_angles, cfg.angle_start, cfg.angle_stop);
    geom.rays_per_angle = cfg.rays_per_angle ? cfg.rays_per_angle : ct::default_rays_per_angle(cfg.grid_side);
    geom.detector_spacing = cfg.detector_spacing;
    geom.validate();
    return geom;
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
    check_config(cfg);
    BuiltExperiment out;
    auto noisy = [&](const Grid& clean) {
        if (cfg.noise == NoiseKind::exact) return clean;
        NoisyData nd = add_relative_gaussian_noise(clean, cfg.noise_level, cfg.seed);
        out.delta_abs = nd.delta_abs;
        return std::move(nd.data);
    };

    switch (cfg.problem) {
        case ProblemKind::ct: {
            const ct::TomoGeometry geom = make_geometry(cfg);
            SparseMatrix a = ct::build_parallel_tomo(geom);
            Grid truth = ct::shepp_logan(cfg.grid_side);
            const Grid data = noisy(synthesize(a, truth));
            auto bounds = ct::angle_block_bounds(geom, cfg.solver.blocks);
            out.problem = std::make_unique<LinearProblem>(std::move(a), cfg.grid_side, cfg.grid_side, data,
                                                          std::move(bounds));
            out.truth = std::move(truth);
            break;
        }
        case ProblemKind::pde: {
            pde::IdentificationSetup setup = pde::default_problem(cfg.mesh_m);
            const Grid data = noisy(pde::solve_state(setup.c_true, setup.mesh));
            out.problem = std::make_unique<pde::PdeProblem>(std::move(setup.mesh), data);
            out.truth = std::move(setup.c_true);
            break;
        }
        case ProblemKind::custom_linear: {
            std::ifstream in(cfg.matrix_file);
            if (!in) throw ConfigError("cannot open matrix_file " + cfg.matrix_file);
            SparseMatrix a;
            try {
                a = SparseMatrix::read_coordinate(in);
            } catch (const std::exception& e) {
                throw ConfigError(cfg.matrix_file + ": " + e.what());
            }
            if (a.cols() != cfg.image_rows * cfg.image_cols) {
                throw ConfigError("matrix_file has " + std::to_string(a.cols()) + " columns, image is " +
                                  std::to_string(cfg.image_rows) + "x" + std::to_string(cfg.image_cols));
            }
            if (cfg.solver.blocks > a.rows()) throw ConfigError("blocks cannot exceed the number of matrix rows");
            Grid data;
            try {
                if (!cfg.truth_file.empty()) {
                    Grid truth = read_grid_text(cfg.truth_file, cfg.image_rows, cfg.image_cols);
                    data = synthesize(a, truth);
                    out.truth = std::move(truth);
                } else {
                    data = read_grid_text(cfg.data_file, a.rows(), 1);
                }
            } catch (const std::runtime_error& e) {
                throw ConfigError(e.what());
            }
            data = noisy(data);
            auto bounds = even_row_split(a.rows(), cfg.solver.blocks);
            out.problem = std::make_unique<LinearProblem>(std::move(a), cfg.image_rows, cfg.image_cols, data,
                                                          std::move(bounds));
            break;
        }
    }
    return out;
}

ValidationReport validate_experiment(const ExperimentConfig& cfg) {
    check_config(cfg);
    SolverConfig solver = cfg.solver;
    if (cfg.noise == NoiseKind::relative) solver.delta = cfg.noise_level;  // only the sign matters here
    const Penalty penalty(cfg.penalty, cfg.mu, cfg.nonnegative ? std::optional<Box>(Box::nonnegative()) : std::nullopt);
    const std::optional<double> gamma =
        cfg.problem == ProblemKind::pde ? std::nullopt : std::optional<double>(0.0);
    return validate_config(solver, penalty.c0(), gamma);
}

Grid read_grid_text(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<double> values;
    values.reserve(rows * cols);
    std::string token;
    while (in >> token) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw std::runtime_error(path.string() + ": not a number: '" + token + "'");
        }
        values.push_back(v);
    }
    if (values.size() != rows * cols) {
        throw std::runtime_error(path.string() + ": expected " + std::to_string(rows * cols) + " values, found " +
                                 std::to_string(values.size()));
    }
    return Grid(rows, cols, std::move(values));
}

void write_grid_text(const std::filesystem::path& path, const Grid& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) out << (j ? " " : "") << format_double(g(i, j));
        out << '\n';
    }
}

void write_metrics_csv(std::ostream& out, const RunTrace& trace, std::size_t every) {
    if (every == 0) throw std::invalid_argument("write_metrics_csv: every must be positive");
    out << "n,i_n,residual_norm,mu_tilde,mu,eps_n,inner_iterations,rel_error,q_n\n";
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const StepRecord& r = trace.records[k];
        if (r.n % every != 0 && k + 1 != trace.records.size()) continue;
        out << r.n << ',' << r.block << ',' << csv_number(r.residual_norm) << ',' << csv_number(r.mu_tilde) << ','
            << csv_number(r.mu) << ',' << csv_number(r.eps_n) << ',' << r.inner_iterations << ','
            << csv_optional(r.rel_error) << ',' << r.q << '\n';
    }
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << "n,i_n,residual_norm,mu_tilde,mu,eps_n,inner_iterations,inner_gap_rel,q_n,discrepancy,"
           "bregman_to_truth,rel_error\n";
    for (const StepRecord& r : trace.records) {
        out << r.n << ',' << r.block << ',' << csv_number(r.residual_norm) << ',' << csv_number(r.mu_tilde) << ','
            << csv_number(r.mu) << ',' << csv_number(r.eps_n) << ',' << r.inner_iterations << ','
            << csv_number(r.inner_gap_rel) << ',' << r.q << ',' << (r.discrepancy ? 1 : 0) << ','
            << csv_optional(r.bregman_to_truth) << ',' << csv_optional(r.rel_error) << '\n';
    }
}

void write_pgm(std::ostream& out, const Grid& image) {
    if (image.empty()) throw std::invalid_argument("write_pgm: empty image");
    const auto [lo_it, hi_it] = std::minmax_element(image.values().begin(), image.values().end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    std::string bytes(image.size(), '\0');
    if (range > 0.0) {
        for (std::size_t k = 0; k < image.size(); ++k) {
            const double scaled = std::round(255.0 * (image[k] - lo) / range);
            bytes[k] = static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0)));
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const std::filesystem::path& path, const Grid& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_pgm(out, image);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    BuiltExperiment built = build_experiment(cfg);

    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

    SolverConfig solver = cfg.solver;
    solver.delta = built.delta_abs;
    const std::optional<Box> constraint =
        cfg.nonnegative ? std::optional<Box>(Box::nonnegative()) : std::nullopt;
    LandweberKaczmarz engine(*built.problem, InnerSolver(Penalty(cfg.penalty, cfg.mu, constraint), solver.inner_max_iter),
                             solver);
    if (built.truth) engine.set_ground_truth(*built.truth);

    ExperimentResult result;
    result.delta_abs = built.delta_abs;
    try {
        result.run = engine.run(cfg.mode);
    } catch (const std::runtime_error& e) {
        result.exit_code = 3;
        result.message = e.what();
        return result;
    }

    const RunTrace& trace = result.run.trace;
    if (built.truth) {
        const double tn = norm(*built.truth);
        if (tn > 0.0) result.final_rel_error = norm(result.run.solution.x - *built.truth) / tn;
    }
    if (trace.terminated_by == Termination::inner_failure) {
        result.exit_code = 3;
        result.message = "inner solver did not reach the requested gap at n = " + std::to_string(trace.n_final - 1);
    }

    auto open = [&](const char* name, std::ios::openmode mode = std::ios::out) {
        std::ofstream f(dir / name, mode);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("metrics.csv");
        write_metrics_csv(f, trace, cfg.metric_every);
    }
    {
        auto f = open("trace.csv");
        write_trace_csv(f, trace);
    }
    try {
        write_pgm(dir / "reconstruction.pgm", result.run.solution.x);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }

    nlohmann::ordered_json summary;
    summary["problem"] = to_string(cfg.problem);
    summary["mode"] = to_string(cfg.mode);
    summary["n_final"] = trace.n_final;
    summary["terminated_by"] = to_string(trace.terminated_by);
    summary["final_residual_norm"] = trace.records.empty() ? 0.0 : trace.records.back().residual_norm;
    summary["final_rel_error"] =
        result.final_rel_error ? nlohmann::ordered_json(*result.final_rel_error) : nlohmann::ordered_json(nullptr);
    summary["delta_abs"] = built.delta_abs;
    summary["seed"] = cfg.seed;
    summary["exit_code"] = result.exit_code;
    summary["warnings"] = trace.warnings;
    {
        auto f = open("summary.json");
        f << summary.dump(2) << '\n';
    }
    return result;
}

}  // namespace lk

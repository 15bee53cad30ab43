// lkrecon: run reconstructions, check solver scalars, export CT matrices.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lk/ct.hpp"
#include "lk/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

struct ConfigSource {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", config_path, "key = value configuration file");
        cmd.add_option("--preset", preset, "start from a named preset (ct-paper, ct-desk, pde-paper, pde-desk)");
        cmd.add_option("--set", overrides, "extra key=value setting, applied last (repeatable)");
    }

    lk::ExperimentConfig resolve() const {
        lk::ExperimentConfig cfg = preset.empty() ? lk::ExperimentConfig{} : lk::make_preset(preset);
        if (!config_path.empty()) cfg = lk::load_config(config_path, cfg);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw lk::ConfigError("--set expects key=value, got '" + kv + "'");
            auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(' ');
                const auto b = s.find_last_not_of(' ');
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            lk::apply_setting(cfg, strip(kv.substr(0, eq)), strip(kv.substr(eq + 1)));
        }
        return cfg;
    }
};

int cmd_run(const ConfigSource& src, const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
    lk::ExperimentConfig cfg = src.resolve();
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seed = *seed;

    const lk::ExperimentResult res = lk::run_experiment(cfg);
    for (const auto& w : res.run.trace.warnings) std::cerr << "warning: " << w << '\n';
    if (res.exit_code != 0) {
        std::cerr << "error: " << res.message << '\n';
        return res.exit_code;
    }
    const auto& trace = res.run.trace;
    std::printf("terminated_by=%s n=%zu residual=%.6g", lk::to_string(trace.terminated_by), trace.n_final,
                trace.records.back().residual_norm);
    if (res.final_rel_error) std::printf(" rel_error=%.6g", *res.final_rel_error);
    std::printf(" out=%s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_validate(const ConfigSource& src) {
    const lk::ExperimentConfig cfg = src.resolve();
    const lk::ValidationReport rep = lk::validate_experiment(cfg);
    std::printf("problem            %s\n", lk::to_string(cfg.problem));
    std::printf("kappa              %.6g\n", rep.kappa);
    std::printf("kappa*beta1*sigma  %.6g (%s)\n", rep.kappa_beta1_sigma, rep.sigma_admissible ? "ok" : "too large");
    if (rep.c1) std::printf("c1                 %.6g\n", *rep.c1);
    else std::printf("c1                 not evaluated (tangential cone constant unknown)\n");
    for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
    return 0;
}

int cmd_export(const ConfigSource& src, const std::string& path) {
    const lk::ExperimentConfig cfg = src.resolve();
    if (cfg.problem != lk::ProblemKind::ct) throw lk::ConfigError("export-matrix needs problem = ct");
    lk::check_config(cfg);
    const lk::SparseMatrix a = lk::ct::build_parallel_tomo(lk::make_geometry(cfg));
    std::ofstream out(path);
    if (!out) throw lk::ConfigError("cannot write " + path);
    a.write_coordinate(out);
    if (!out) throw lk::ConfigError("write failed: " + path);
    std::printf("%zu x %zu, %zu nonzeros -> %s\n", a.rows(), a.cols(), a.nnz(), path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landweber-Kaczmarz reconstructions with inexact TV inner solves"};
    app.require_subcommand(1);

    ConfigSource run_src, validate_src, export_src, show_src;
    std::string run_out;
    std::optional<std::uint64_t> run_seed;
    auto* run = app.add_subcommand("run", "run an experiment and write metrics.csv, trace.csv, summary.json, reconstruction.pgm");
    run_src.attach(*run);
    run->add_option("--out", run_out, "output directory (overrides output_dir)");
    run->add_option("--seed", run_seed, "noise seed (overrides seed)");

    auto* validate = app.add_subcommand("validate", "report the admissibility diagnostics of the solver scalars");
    validate_src.attach(*validate);

    std::string export_path;
    auto* exp = app.add_subcommand("export-matrix", "write the CT system matrix in coordinate format");
    export_src.attach(*exp);
    exp->add_option("--out", export_path, "destination file")->required();

    auto* show = app.add_subcommand("show-config", "print the resolved configuration");
    show_src.attach(*show);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return cmd_run(run_src, run_out, run_seed);
        if (*validate) return cmd_validate(validate_src);
        if (*exp) return cmd_export(export_src, export_path);
        if (*show) {
            std::cout << lk::to_config_text(show_src.resolve());
            return 0;
        }
    } catch (const lk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverError;
    }
    return 0;
}

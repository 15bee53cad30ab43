#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lk/forward_problem.hpp"
#include "lk/grid.hpp"
#include "lk/pdhg.hpp"
#include "lk/penalty.hpp"

namespace lk {

enum class Mode { plain, accelerated };
enum class Termination { discrepancy, cap, inner_failure };

const char* to_string(Mode mode) noexcept;
const char* to_string(Termination t) noexcept;

/// Scalars of the outer iteration.
///
/// delta = 0 selects the exact-data loop (no discrepancy test, runs to n_max).
/// The inner tolerance for the solve producing x_{n+1} is the relative gap
/// eta_n = min(eta_max, eta0 (n + 1)^-gap_exponent); the eps_n entering the
/// step size is the certificate returned by that solve, floored at eps_floor.
struct SolverConfig {
    double p = 2.0;
    double s = 2.0;
    double beta0 = 0.1;
    double beta1 = 10.0;
    double sigma = 1e-3;
    double tau = 1.01;
    double alpha = 5.0;
    double delta = 0.0;
    double eta0 = 1.0;
    double gap_exponent = 2.2;
    double eta_max = 0.5;
    double eps_floor = 1e-14;
    std::size_t n_max = 10000;
    std::size_t blocks = 1;
    int inner_max_iter = 5000;

    bool noisy() const noexcept { return delta > 0.0; }
    double eta(std::size_t n) const;

    /// Throws std::invalid_argument when an invariant is violated
    /// (tau > 1, beta0, beta1, sigma > 0, alpha >= 3, blocks >= 1, s > 1, p >= 2, ...).
    void check() const;
};

/// Admissibility diagnostics. Advisory only: nothing here blocks a run.
struct ValidationReport {
    double beta = 2.0;               ///< beta > 1 used for kappa
    double kappa = 1.0;
    double kappa_beta1_sigma = 0.0;
    bool sigma_admissible = true;    ///< kappa beta1 sigma <= 1
    std::optional<double> c1;        ///< when c0 and gamma are supplied
    std::vector<std::string> warnings;
};

/// kappa = 1 if p >= s, else (beta^{p/(s-p)} - 1)^{(p-s)/p}, with
/// beta = min(2, (1 + 1/max(gamma, 1e-3)) / 2) when gamma is given and 2 otherwise.
/// c1 = 1/beta - gamma - (1+gamma)/tau - (2/p*) (beta0/(2 c0))^{p*-1}; the tau
/// term is dropped for exact data. For p >= s kappa does not depend on beta and
/// c1 is reported at its supremum beta -> 1.
ValidationReport validate_config(const SolverConfig& cfg, std::optional<double> c0 = std::nullopt,
                                 std::optional<double> gamma = std::nullopt);

struct StepSize {
    double mu_tilde = 0.0;
    double mu = 0.0;
    bool discrepancy = false;  ///< ||r||^p + sigma eps <= (tau delta)^p held (noisy only)
};

/// mu_tilde = min(beta0 r^{p(s-1)} / ||L* J_s(r)||^p, beta1), beta1 when the
/// denominator vanishes; mu = mu_tilde (r^p + sigma eps)^{1 - s/p}, or 0 when
/// the discrepancy test holds.
StepSize step_size(double r_norm, double ljr_norm, double eps_n, const SolverConfig& cfg, bool noisy);

struct StepRecord {
    std::size_t n = 0;
    std::size_t block = 0;
    double residual_norm = 0.0;
    double mu_tilde = 0.0;
    double mu = 0.0;
    double eps_n = 0.0;
    int inner_iterations = 0;
    double inner_gap_rel = 0.0;
    std::size_t q = 0;
    bool discrepancy = false;
    std::optional<double> bregman_to_truth;  ///< D^{eps_n}_{xi_n} Theta(truth, x_n)
    std::optional<double> rel_error;         ///< ||x_n - truth|| / ||truth||
};

struct RunTrace {
    std::vector<StepRecord> records;  ///< one per iterate x_0 .. x_{n_final}
    Termination terminated_by = Termination::cap;
    std::size_t n_final = 0;
    std::vector<std::string> warnings;
};

struct IterationState {
    std::size_t n = 0;
    std::size_t q = 0;
    PrimalDualPair current;        ///< (x_n, xi_n, eps_n)
    PrimalDualPair previous;       ///< (x_{n-1}, xi_{n-1}); equals current at n = 0
    std::optional<WarmStart> warm;
    double lower_bound = 0.0;      ///< certified bound on min {Theta - <xi_n, .>}
    bool inner_failed = false;
};

struct RunResult {
    PrimalDualPair solution;
    RunTrace trace;
};

/// Landweber-Kaczmarz iteration with an inexact inner solver, plain or with
/// Nesterov extrapolation. Holds references to the problem; not thread-safe.
class LandweberKaczmarz {
public:
    LandweberKaczmarz(ForwardProblem& problem, InnerSolver inner, SolverConfig cfg);

    /// Enables bregman_to_truth and rel_error in the step records.
    void set_ground_truth(Grid truth);

    const SolverConfig& config() const noexcept { return cfg_; }
    const InnerSolver& inner() const noexcept { return inner_; }

    /// x0 = xi0 = 0, which satisfies xi0 in dTheta(x0) whenever 0 lies in the constraint set.
    IterationState initial_state() const;
    IterationState initial_state(Grid x0, Grid xi0, double eps0) const;

    /// One step of the plain iteration; advances the state to n + 1.
    StepRecord lk_step(IterationState& state);

    /// One extrapolated step; advances the state to n + 1.
    StepRecord nesterov_step(IterationState& state);

    RunResult run(Mode mode);
    RunResult run(Mode mode, IterationState state);

private:
    struct Plan {
        StepRecord record;
        Grid eval_point;   ///< x_n or the extrapolated point
        Grid xi_base;      ///< xi_n or the extrapolated dual point
        Grid direction;    ///< L(eval_point)^* J_s(r)
        bool xi_moved = false;
    };

    Plan plan(const IterationState& state, Mode mode);
    void commit(IterationState& state, Plan& plan);
    void annotate(StepRecord& record, const IterationState& state) const;

    ForwardProblem& problem_;
    InnerSolver inner_;
    SolverConfig cfg_;
    std::optional<Grid> truth_;
};

/// 16 sum eps_n <= c0 rho^p, checked on a finished trace when rho is known.
bool eps_budget_satisfied(const RunTrace& trace, double c0, double rho, double p);

}  // namespace lk

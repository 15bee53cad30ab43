#pragma once

#include <optional>
#include <vector>

#include "lk/grid.hpp"
#include "lk/penalty.hpp"
#include "lk/tv.hpp"

namespace lk {

/// min_z  Psi_P(z) = ||z - mu xi||^2 / (2 mu) + TV(z) + indicator_C(z)
struct DenoiseProblem {
    Grid xi;
    double mu = 1.0;
    std::optional<Box> constraint;

    DenoiseProblem(Grid xi_, double mu_, std::optional<Box> constraint_ = std::nullopt);
};

/// Psi_P(z); +infinity when z is infeasible.
double primal_value(const DenoiseProblem& prob, const Grid& z);

/// Psi_D(lambda) = min_z Phi(z, lambda), evaluated at the minimizer
/// z* = P_C(mu (xi - D^T lambda)); -infinity when lambda leaves the unit pixel ball.
double dual_value(const DenoiseProblem& prob, const GradientField& lambda);

/// (Psi_P - Psi_D) / (|Psi_P| + |Psi_D|), with 0/0 read as 0.
double relative_gap(double primal, double dual) noexcept;

struct PdhgStepSizes {
    double tau;
    double theta;
};

/// tau_k = 0.2 + 0.08 k,  theta_k = (0.5 - 5 / (15 + k)) / tau_k
PdhgStepSizes pdhg_step_sizes(std::size_t k) noexcept;

struct PdhgOptions {
    double eta = 1e-4;     ///< relative duality-gap target, in (0, 1)
    int max_iter = 5000;
    bool record_history = false;
    /// Dual step mu tau_k exactly as written for the mu-scaled problem. The
    /// default uses tau_k / mu, i.e. the schedule applied after substituting
    /// z = mu w, which keeps the step product independent of mu.
    bool literal_steps = false;
};

struct GapSample {
    int k;
    double primal;
    double dual;
};

struct PdhgReport {
    Grid x;
    GradientField lambda;
    int iterations = 0;
    double primal = 0.0;
    double dual = 0.0;
    double gap_abs = 0.0;
    double gap_rel = 0.0;
    double eps_certificate = 0.0;  ///< max(gap_abs, 0); bounds Psi_P(x) - min Psi_P
    bool converged = false;
    std::vector<GapSample> history;  ///< filled when PdhgOptions::record_history
};

/// PDHG with the increasing step schedule above. Stops as soon as the relative
/// gap reaches eta (or the absolute gap drops below 1e-15 (1 + mu |xi|^2 / 2),
/// which covers problems whose optimal value is 0); otherwise runs max_iter steps and returns the best pair seen
/// with converged = false. z0 must be feasible.
PdhgReport pdhg_solve(const DenoiseProblem& prob, const Grid& z0, const GradientField& lambda0,
                      const PdhgOptions& options);

/// Previous inner solution used to warm-start the next solve.
struct WarmStart {
    Grid x;
    GradientField lambda;
};

struct InnerResult {
    PrimalDualPair pair;          ///< (x, xi, eps) with xi in d_eps Theta(x)
    GradientField lambda;         ///< final dual iterate (empty for the exact path)
    double lower_bound = 0.0;     ///< certified lower bound on min_z {Theta(z) - <xi, z>}
    int iterations = 0;
    double gap_rel = 0.0;
    bool converged = true;
};

/// Inexact minimizer S_eps of Theta(z) - <xi, z>.
///
/// The quadratic penalty is solved in closed form with eps = 0. The quadratic+TV
/// penalty goes through PDHG stopped at relative gap eta; the returned eps is the
/// absolute duality gap of the returned pair.
class InnerSolver {
public:
    explicit InnerSolver(Penalty penalty, int max_iter = 5000);

    const Penalty& penalty() const noexcept { return penalty_; }
    int max_iter() const noexcept { return max_iter_; }

    InnerResult solve(const Grid& xi, double eta, const WarmStart* warm = nullptr) const;

private:
    Penalty penalty_;
    int max_iter_;
};

}  // namespace lk

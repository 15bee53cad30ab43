#include "lk/pdhg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lk {

namespace {

// pixels of a projected dual iterate may sit a few ulps outside the unit ball
constexpr double kDualBallSlack = 1e-12;

// When the optimal value is 0 (e.g. constant xi without constraint) the
// relative gap stays near 1 however close the pair gets. An absolute gap this
// far below mu |xi|^2 / 2, the offset between Psi_P and the inner objective
// Theta - <xi, .>, is treated as converged as well.
constexpr double kAbsoluteGapFloor = 1e-15;

double quadratic_fit(const Grid& z, const Grid& xi, double mu) {
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double d = z[k] - mu * xi[k];
        sum += d * d;
    }
    return sum / (2.0 * mu);
}

// Psi_D given D^T lambda (lambda assumed inside the ball).
double dual_value_from_divergence(const DenoiseProblem& prob, const Grid& dt_lambda) {
    Grid z = prob.xi - dt_lambda;
    z *= prob.mu;
    z = project(std::move(z), prob.constraint);
    return quadratic_fit(z, prob.xi, prob.mu) + dot(dt_lambda, z);
}

}  // namespace

DenoiseProblem::DenoiseProblem(Grid xi_, double mu_, std::optional<Box> constraint_)
    : xi(std::move(xi_)), mu(mu_), constraint(constraint_) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw std::invalid_argument("DenoiseProblem: mu must be positive");
    }
}

double primal_value(const DenoiseProblem& prob, const Grid& z) {
    require_same_shape(z, prob.xi, "primal_value");
    if (!feasible(z, prob.constraint)) return kInfinity;
    return quadratic_fit(z, prob.xi, prob.mu) + tv_value(z);
}

double dual_value(const DenoiseProblem& prob, const GradientField& lambda) {
    require_same_shape(lambda.u, prob.xi, "dual_value");
    if (max_pixel_norm(lambda) > 1.0 + kDualBallSlack) return -kInfinity;
    return dual_value_from_divergence(prob, divergence_adjoint(lambda));
}

double relative_gap(double primal, double dual) noexcept {
    const double gap = primal - dual;
    const double scale = std::abs(primal) + std::abs(dual);
    if (scale == 0.0) return gap <= 0.0 ? 0.0 : kInfinity;
    return gap / scale;
}

PdhgStepSizes pdhg_step_sizes(std::size_t k) noexcept {
    const double kd = static_cast<double>(k);
    const double tau = 0.2 + 0.08 * kd;
    return {tau, (0.5 - 5.0 / (15.0 + kd)) / tau};
}

PdhgReport pdhg_solve(const DenoiseProblem& prob, const Grid& z0, const GradientField& lambda0,
                      const PdhgOptions& options) {
    if (!(options.eta > 0.0 && options.eta < 1.0)) {
        throw std::invalid_argument("pdhg_solve: eta must lie in (0, 1)");
    }
    require_same_shape(z0, prob.xi, "pdhg_solve(z0)");
    require_same_shape(lambda0.u, prob.xi, "pdhg_solve(lambda0)");
    if (!feasible(z0, prob.constraint)) {
        throw std::invalid_argument("pdhg_solve: initial primal point is infeasible");
    }

    const double mu = prob.mu;
    // Psi_P(mu w) = mu (|w - xi|^2 / 2 + TV(w)) with the same dual variable, so
    // running the schedule on the mu = 1 problem only changes the dual step.
    const double dual_scale = options.literal_steps ? mu : 1.0 / mu;
    const double abs_floor = kAbsoluteGapFloor * (1.0 + 0.5 * mu * dot(prob.xi, prob.xi));
    Grid z = z0;
    GradientField lambda = project_dual_ball(lambda0);
    GradientField dz = discrete_gradient(z);
    Grid dt_lambda = divergence_adjoint(lambda);

    PdhgReport best;
    best.gap_rel = kInfinity;
    auto consider = [&](int k) {
        const double primal = quadratic_fit(z, prob.xi, mu) + isotropic_norm(dz);
        const double dual = dual_value_from_divergence(prob, dt_lambda);
        const double rel = relative_gap(primal, dual);
        if (options.record_history) best.history.push_back({k, primal, dual});
        const bool negligible = primal - dual <= abs_floor;
        if (rel <= best.gap_rel || negligible) {
            best.x = z;
            best.lambda = lambda;
            best.primal = primal;
            best.dual = dual;
            best.gap_abs = primal - dual;
            best.gap_rel = rel;
        }
        return rel <= options.eta || negligible;
    };

    bool done = consider(0);
    int k = 0;
    while (!done && k < options.max_iter) {
        const auto [tau, theta] = pdhg_step_sizes(static_cast<std::size_t>(k));
        lambda.u.axpy(dual_scale * tau, dz.u);
        lambda.v.axpy(dual_scale * tau, dz.v);
        lambda = project_dual_ball(std::move(lambda));
        dt_lambda = divergence_adjoint(lambda);

        auto zv = z.values();
        const auto xi = prob.xi.values();
        const auto dt = dt_lambda.values();
        for (std::size_t i = 0; i < zv.size(); ++i) {
            zv[i] = (1.0 - theta) * zv[i] + mu * theta * (xi[i] - dt[i]);
        }
        z = project(std::move(z), prob.constraint);
        dz = discrete_gradient(z);
        ++k;
        done = consider(k);
    }

    best.converged = done;
    best.iterations = k;
    best.eps_certificate = std::max(best.gap_abs, 0.0);
    return best;
}

InnerSolver::InnerSolver(Penalty penalty, int max_iter) : penalty_(penalty), max_iter_(max_iter) {
    if (max_iter < 0) throw std::invalid_argument("InnerSolver: max_iter must be nonnegative");
}

InnerResult InnerSolver::solve(const Grid& xi, double eta, const WarmStart* warm) const {
    InnerResult out;
    if (penalty_.kind() == PenaltyKind::quadratic) {
        out.pair = solve_quadratic_exact(xi, penalty_);
        out.lower_bound = quadratic_min_value(xi, penalty_);
        return out;
    }

    DenoiseProblem prob(xi, penalty_.mu(), penalty_.constraint());
    Grid z0 = warm ? warm->x : Grid(xi.rows(), xi.cols());
    GradientField lambda0 = warm ? warm->lambda : GradientField(xi.rows(), xi.cols());
    PdhgOptions options;
    options.eta = eta;
    options.max_iter = max_iter_;
    PdhgReport report = pdhg_solve(prob, z0, lambda0, options);

    // Theta(z) - <xi, z> = Psi_P(z) - mu ||xi||^2 / 2
    const double shift = 0.5 * penalty_.mu() * dot(xi, xi);
    out.pair = PrimalDualPair{std::move(report.x), xi, report.eps_certificate};
    out.lambda = std::move(report.lambda);
    out.lower_bound = report.dual - shift;
    out.iterations = report.iterations;
    out.gap_rel = report.gap_rel;
    out.converged = report.converged;
    return out;
}

}  // namespace lk

#include "lk/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lk {

const char* to_string(Mode mode) noexcept {
    return mode == Mode::plain ? "plain" : "accelerated";
}

const char* to_string(Termination t) noexcept {
    switch (t) {
        case Termination::discrepancy: return "discrepancy";
        case Termination::cap: return "cap";
        case Termination::inner_failure: return "inner-failure";
    }
    return "unknown";
}

double SolverConfig::eta(std::size_t n) const {
    return std::min(eta_max, eta0 * std::pow(static_cast<double>(n + 1), -gap_exponent));
}

void SolverConfig::check() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SolverConfig: " + msg); };
    if (!(p >= 2.0)) fail("p must be at least 2");
    if (!(s > 1.0)) fail("s must exceed 1");
    if (!(beta0 > 0.0)) fail("beta0 must be positive");
    if (!(beta1 > 0.0)) fail("beta1 must be positive");
    if (!(sigma > 0.0)) fail("sigma must be positive");
    if (!(tau > 1.0)) fail("tau must exceed 1");
    if (!(alpha >= 3.0)) fail("alpha must be at least 3");
    if (!(delta >= 0.0)) fail("delta must be nonnegative");
    if (!(eta0 > 0.0)) fail("eta0 must be positive");
    if (!(gap_exponent > 1.0)) fail("gap_exponent must exceed 1 for a summable schedule");
    if (!(eta_max > 0.0 && eta_max < 1.0)) fail("eta_max must lie in (0, 1)");
    if (!(eps_floor > 0.0)) fail("eps_floor must be positive");
    if (blocks < 1) fail("blocks must be at least 1");
    if (inner_max_iter < 1) fail("inner_max_iter must be at least 1");
}

ValidationReport validate_config(const SolverConfig& cfg, std::optional<double> c0,
                                 std::optional<double> gamma) {
    ValidationReport rep;
    const double p = cfg.p;
    const double s = cfg.s;
    rep.beta = gamma ? std::min(2.0, 0.5 * (1.0 + 1.0 / std::max(*gamma, 1e-3))) : 2.0;
    rep.kappa = (p >= s) ? 1.0 : std::pow(std::pow(rep.beta, p / (s - p)) - 1.0, (p - s) / p);
    rep.kappa_beta1_sigma = rep.kappa * cfg.beta1 * cfg.sigma;
    rep.sigma_admissible = rep.kappa_beta1_sigma <= 1.0;
    if (!rep.sigma_admissible) {
        std::ostringstream msg;
        msg << "kappa*beta1*sigma = " << rep.kappa_beta1_sigma
            << " exceeds 1; the termination and descent guarantees do not apply";
        rep.warnings.push_back(msg.str());
    }
    if (gamma && (*gamma < 0.0 || *gamma >= 1.0)) {
        rep.warnings.push_back("gamma must lie in [0, 1); c1 not evaluated");
    } else if (c0 && gamma) {
        const double p_star = p / (p - 1.0);
        const double beta_c1 = (p >= s) ? 1.0 : rep.beta;
        double c1 = 1.0 / beta_c1 - *gamma -
                    (2.0 / p_star) * std::pow(cfg.beta0 / (2.0 * *c0), p_star - 1.0);
        if (cfg.noisy()) c1 -= (1.0 + *gamma) / cfg.tau;
        rep.c1 = c1;
        if (!(c1 > 0.0)) {
            std::ostringstream msg;
            msg << "c1 = " << c1 << " is not positive; beta0 or tau fall outside the analysed range";
            rep.warnings.push_back(msg.str());
        }
    }
    return rep;
}

StepSize step_size(double r_norm, double ljr_norm, double eps_n, const SolverConfig& cfg, bool noisy) {
    StepSize out;
    const double p = cfg.p;
    const double s = cfg.s;
    if (ljr_norm > 0.0) {
        out.mu_tilde = std::min(cfg.beta0 * std::pow(r_norm, p * (s - 1.0)) / std::pow(ljr_norm, p), cfg.beta1);
    } else {
        out.mu_tilde = cfg.beta1;
    }
    const double lhs = std::pow(r_norm, p) + cfg.sigma * eps_n;
    if (noisy && lhs <= std::pow(cfg.tau * cfg.delta, p)) {
        out.discrepancy = true;
        out.mu = 0.0;
        return out;
    }
    out.mu = out.mu_tilde * std::pow(lhs, 1.0 - s / p);
    return out;
}

LandweberKaczmarz::LandweberKaczmarz(ForwardProblem& problem, InnerSolver inner, SolverConfig cfg)
    : problem_(problem), inner_(std::move(inner)), cfg_(cfg) {
    cfg_.check();
    if (problem_.num_blocks() != cfg_.blocks) {
        throw std::invalid_argument("LandweberKaczmarz: config has " + std::to_string(cfg_.blocks) +
                                    " blocks, problem has " + std::to_string(problem_.num_blocks()));
    }
}

void LandweberKaczmarz::set_ground_truth(Grid truth) {
    if (truth.rows() != problem_.domain_rows() || truth.cols() != problem_.domain_cols()) {
        throw std::invalid_argument("set_ground_truth: shape does not match the problem domain");
    }
    truth_ = std::move(truth);
}

IterationState LandweberKaczmarz::initial_state() const {
    const Grid zero(problem_.domain_rows(), problem_.domain_cols());
    return initial_state(zero, zero, 0.0);
}

IterationState LandweberKaczmarz::initial_state(Grid x0, Grid xi0, double eps0) const {
    if (x0.rows() != problem_.domain_rows() || x0.cols() != problem_.domain_cols()) {
        throw std::invalid_argument("initial_state: x0 shape does not match the problem domain");
    }
    require_same_shape(x0, xi0, "initial_state");
    IterationState st;
    st.current = PrimalDualPair{std::move(x0), std::move(xi0), std::max(eps0, cfg_.eps_floor)};
    st.previous = st.current;
    st.warm = WarmStart{st.current.x, GradientField(st.current.x.rows(), st.current.x.cols())};
    st.lower_bound = inner_.penalty().value(st.current.x) - dot(st.current.xi, st.current.x) - st.current.eps;
    return st;
}

LandweberKaczmarz::Plan LandweberKaczmarz::plan(const IterationState& state, Mode mode) {
    Plan pl;
    const std::size_t block = state.n % cfg_.blocks;
    if (mode == Mode::accelerated) {
        const double n = static_cast<double>(state.n);
        const double w = n / (n + cfg_.alpha);
        pl.eval_point = state.current.x;
        pl.eval_point.axpy(w, state.current.x - state.previous.x);
        pl.xi_base = state.current.xi;
        pl.xi_base.axpy(w, state.current.xi - state.previous.xi);
        pl.xi_moved = !(pl.xi_base == state.current.xi);
    } else {
        pl.eval_point = state.current.x;
        pl.xi_base = state.current.xi;
    }

    const Grid r = problem_.residual(block, pl.eval_point);
    const double r_norm = norm(r);
    pl.direction = problem_.adjoint_apply(block, pl.eval_point, duality_map(r, cfg_.s));
    const StepSize ss = step_size(r_norm, norm(pl.direction), state.current.eps, cfg_, cfg_.noisy());

    StepRecord& rec = pl.record;
    rec.n = state.n;
    rec.block = block;
    rec.residual_norm = r_norm;
    rec.mu_tilde = ss.mu_tilde;
    rec.mu = ss.mu;
    rec.eps_n = state.current.eps;
    rec.discrepancy = ss.discrepancy;
    rec.q = ss.discrepancy ? state.q + 1 : 0;
    return pl;
}

void LandweberKaczmarz::commit(IterationState& state, Plan& pl) {
    const bool moves = pl.record.mu != 0.0 || pl.xi_moved;
    if (moves) {
        Grid xi_next = std::move(pl.xi_base);
        if (pl.record.mu != 0.0) xi_next.axpy(-pl.record.mu, pl.direction);
        const WarmStart* warm = state.warm ? &*state.warm : nullptr;
        InnerResult res = inner_.solve(xi_next, cfg_.eta(state.n), warm);
        pl.record.inner_iterations = res.iterations;
        pl.record.inner_gap_rel = res.gap_rel;
        state.inner_failed = !res.converged;

        state.previous = std::move(state.current);
        state.current = std::move(res.pair);
        state.current.eps = std::max(state.current.eps, cfg_.eps_floor);
        state.lower_bound = res.lower_bound;
        if (!res.lambda.u.empty()) state.warm = WarmStart{state.current.x, std::move(res.lambda)};
    } else {
        // xi unchanged: the current certificate still holds
        state.previous = state.current;
    }
    state.q = pl.record.q;
    ++state.n;
}

void LandweberKaczmarz::annotate(StepRecord& record, const IterationState& state) const {
    if (!truth_) return;
    record.bregman_to_truth = bregman_eps_distance(inner_.penalty(), state.current, *truth_);
    const double tn = norm(*truth_);
    if (tn > 0.0) record.rel_error = norm(state.current.x - *truth_) / tn;
}

StepRecord LandweberKaczmarz::lk_step(IterationState& state) {
    Plan pl = plan(state, Mode::plain);
    annotate(pl.record, state);
    commit(state, pl);
    return pl.record;
}

StepRecord LandweberKaczmarz::nesterov_step(IterationState& state) {
    Plan pl = plan(state, Mode::accelerated);
    annotate(pl.record, state);
    commit(state, pl);
    return pl.record;
}

RunResult LandweberKaczmarz::run(Mode mode) { return run(mode, initial_state()); }

RunResult LandweberKaczmarz::run(Mode mode, IterationState state) {
    RunResult out;
    RunTrace& trace = out.trace;
    trace.warnings = validate_config(cfg_, inner_.penalty().c0()).warnings;
    if (cfg_.p != inner_.penalty().p()) {
        trace.warnings.push_back("config p differs from the penalty's convexity exponent");
    }

    for (;;) {
        Plan pl = plan(state, mode);
        annotate(pl.record, state);
        if (cfg_.noisy() && pl.record.q >= cfg_.blocks) {
            trace.records.push_back(std::move(pl.record));
            trace.terminated_by = Termination::discrepancy;
            break;
        }
        if (state.n >= cfg_.n_max) {
            trace.records.push_back(std::move(pl.record));
            trace.terminated_by = Termination::cap;
            break;
        }
        commit(state, pl);
        trace.records.push_back(std::move(pl.record));
        if (state.inner_failed) {
            trace.terminated_by = Termination::inner_failure;
            break;
        }
    }
    trace.n_final = state.n;
    out.solution = std::move(state.current);
    return out;
}

bool eps_budget_satisfied(const RunTrace& trace, double c0, double rho, double p) {
    double sum = 0.0;
    for (const auto& r : trace.records) sum += r.eps_n;
    return 16.0 * sum <= c0 * std::pow(rho, p);
}

}  // namespace lk

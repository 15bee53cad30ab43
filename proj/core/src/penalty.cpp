#include "lk/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lk/tv.hpp"

namespace lk {

double Box::clamp(double v) const noexcept { return std::min(std::max(v, lower), upper); }

bool feasible(const Grid& z, const std::optional<Box>& box) noexcept {
    if (!box) return true;
    return std::all_of(z.values().begin(), z.values().end(),
                       [&](double v) { return box->contains(v); });
}

Grid project(Grid z, const std::optional<Box>& box) {
    if (box) {
        for (auto& v : z.values()) v = box->clamp(v);
    }
    return z;
}

Penalty::Penalty(PenaltyKind kind, double mu, std::optional<Box> constraint)
    : kind_(kind), mu_(mu), constraint_(constraint) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw std::invalid_argument("Penalty: mu must be a positive finite number");
    }
    if (constraint_ && !constraint_->contains(0.0)) {
        throw std::invalid_argument("Penalty: constraint set must contain 0");
    }
}

double Penalty::value(const Grid& z) const {
    if (!feasible(z)) return kInfinity;
    double v = dot(z, z) / (2.0 * mu_);
    if (kind_ == PenaltyKind::quadratic_tv) v += tv_value(z);
    return v;
}

Grid duality_map(const Grid& r, double s) {
    if (!(s > 1.0)) throw std::invalid_argument("duality_map: exponent s must exceed 1");
    const double n = norm(r);
    Grid out = r;
    if (n == 0.0) {
        out.fill(0.0);
        return out;
    }
    if (s != 2.0) out *= std::pow(n, s - 2.0);
    return out;
}

std::optional<double> bregman_eps_distance(const Penalty& theta, const PrimalDualPair& pair,
                                           const Grid& xbar) {
    const double at_bar = theta.value(xbar);
    if (std::isinf(at_bar)) return std::nullopt;
    return at_bar - theta.value(pair.x) - dot(pair.xi, xbar - pair.x) + pair.eps;
}

PrimalDualPair solve_quadratic_exact(const Grid& xi, const Penalty& penalty) {
    if (penalty.kind() != PenaltyKind::quadratic) {
        throw std::invalid_argument("solve_quadratic_exact: penalty has a TV term");
    }
    return PrimalDualPair{project(penalty.mu() * xi, penalty.constraint()), xi, 0.0};
}

double quadratic_min_value(const Grid& xi, const Penalty& penalty) {
    if (penalty.kind() != PenaltyKind::quadratic) {
        throw std::invalid_argument("quadratic_min_value: penalty has a TV term");
    }
    const Grid x = project(penalty.mu() * xi, penalty.constraint());
    return penalty.value(x) - dot(xi, x);
}

double default_certificate_tolerance(double theta_x) noexcept {
    return 1e-9 * (1.0 + std::abs(theta_x));
}

bool check_eps_subgradient(const PrimalDualPair& pair, const Penalty& theta,
                           double dual_lower_bound, double tolerance) {
    const double theta_x = theta.value(pair.x);
    if (std::isinf(theta_x)) return false;
    if (tolerance < 0.0) tolerance = default_certificate_tolerance(theta_x);
    return theta_x - dot(pair.xi, pair.x) - dual_lower_bound <= pair.eps + tolerance;
}

}  // namespace lk

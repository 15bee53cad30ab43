#pragma once

#include <limits>
#include <optional>

#include "lk/grid.hpp"

namespace lk {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Closed box {z : lower <= z_ij <= upper}. Must contain 0 so that x0 = xi0 = 0
/// is an admissible starting pair.
struct Box {
    double lower = -kInfinity;
    double upper = kInfinity;

    static Box nonnegative() { return Box{0.0, kInfinity}; }

    bool contains(double v) const noexcept { return v >= lower && v <= upper; }
    double clamp(double v) const noexcept;
};

bool feasible(const Grid& z, const std::optional<Box>& box) noexcept;
Grid project(Grid z, const std::optional<Box>& box);

enum class PenaltyKind { quadratic, quadratic_tv };

/// Theta(z) = ||z||^2 / (2 mu) [+ TV(z)] + indicator of the box.
///
/// Both kinds are 2-convex with c0 = 1/(2 mu); the TV and indicator terms are
/// convex and do not improve the modulus.
class Penalty {
public:
    Penalty(PenaltyKind kind, double mu, std::optional<Box> constraint = std::nullopt);

    static Penalty quadratic(double mu, std::optional<Box> constraint = std::nullopt) {
        return Penalty(PenaltyKind::quadratic, mu, constraint);
    }
    static Penalty quadratic_tv(double mu, std::optional<Box> constraint = std::nullopt) {
        return Penalty(PenaltyKind::quadratic_tv, mu, constraint);
    }

    PenaltyKind kind() const noexcept { return kind_; }
    double mu() const noexcept { return mu_; }
    double p() const noexcept { return 2.0; }
    double c0() const noexcept { return 1.0 / (2.0 * mu_); }
    const std::optional<Box>& constraint() const noexcept { return constraint_; }

    bool feasible(const Grid& z) const noexcept { return lk::feasible(z, constraint_); }

    /// Theta(z); +infinity when z violates the constraint.
    double value(const Grid& z) const;

private:
    PenaltyKind kind_;
    double mu_;
    std::optional<Box> constraint_;
};

/// Iterate pair (x, xi) with xi an eps-subgradient of Theta at x.
struct PrimalDualPair {
    Grid x;
    Grid xi;
    double eps = 0.0;
};

/// Euclidean duality map J_s(r) = ||r||^{s-2} r, with J_s(0) = 0. Requires s > 1.
Grid duality_map(const Grid& r, double s);

/// eps-Bregman distance Theta(xbar) - Theta(x) - <xi, xbar - x> + eps.
/// Returns std::nullopt when Theta(xbar) is infinite.
std::optional<double> bregman_eps_distance(const Penalty& theta, const PrimalDualPair& pair,
                                           const Grid& xbar);

/// Exact minimizer of Theta(z) - <xi, z> for the TV-free penalty: x = P_C(mu xi), eps = 0.
PrimalDualPair solve_quadratic_exact(const Grid& xi, const Penalty& penalty);

/// min_z {Theta(z) - <xi, z>} for the TV-free penalty (the negated conjugate -Theta*(xi)).
double quadratic_min_value(const Grid& xi, const Penalty& penalty);

/// Default certificate slack 1e-9 (1 + |theta_x|).
double default_certificate_tolerance(double theta_x) noexcept;

/// Fenchel-gap test of xi in d_eps Theta(x):
///   Theta(x) - <xi, x> - dual_lower_bound <= eps + tol
/// where dual_lower_bound <= min_z {Theta(z) - <xi, z>}. A negative tolerance
/// selects the default.
bool check_eps_subgradient(const PrimalDualPair& pair, const Penalty& theta,
                           double dual_lower_bound, double tolerance = -1.0);

}  // namespace lk

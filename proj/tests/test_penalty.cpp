#include <gtest/gtest.h>

#include <cmath>

#include "lk/pdhg.hpp"
#include "lk/penalty.hpp"
#include "support.hpp"

using namespace lk;
using lk::testing::Gen;

namespace {

Grid vec(std::initializer_list<double> v) { return Grid::column(std::vector<double>(v)); }

}  // namespace

TEST(GridTest, ShapeMismatchThrows) {
    Grid a(2, 3);
    Grid b(3, 2);
    EXPECT_THROW(a += b, std::invalid_argument);
    EXPECT_THROW(dot(a, b), std::invalid_argument);
    EXPECT_THROW(Grid(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(GridTest, NormIsFrobenius) {
    Gen gen(1);
    for (int t = 0; t < 20; ++t) {
        Grid g = gen.grid(gen.index(1, 9), gen.index(1, 9));
        EXPECT_NEAR(norm(g), lk::testing::reference_norm(g.values()), 1e-12 * (1 + norm(g)));
    }
    EXPECT_EQ(norm(Grid(3, 4)), 0.0);
}

TEST(DualityMap, ZeroResidualGivesZero) {
    EXPECT_EQ(duality_map(Grid(2, 2), 2.0), Grid(2, 2));
    EXPECT_EQ(duality_map(Grid(2, 2), 3.5), Grid(2, 2));
}

TEST(DualityMap, ExponentTwoIsIdentity) {
    Gen gen(2);
    const Grid r = gen.grid(4, 3);
    EXPECT_EQ(duality_map(r, 2.0), r);
}

TEST(DualityMap, ThreeFourExponentThree) {
    const Grid j = duality_map(vec({3, 4}), 3.0);
    EXPECT_NEAR(j[0], 15.0, 1e-12);
    EXPECT_NEAR(j[1], 20.0, 1e-12);
    EXPECT_NEAR(dot(j, vec({3, 4})), 125.0, 1e-10);
}

TEST(DualityMap, RejectsExponentAtMostOne) {
    EXPECT_THROW(duality_map(vec({1}), 1.0), std::invalid_argument);
}

TEST(DualityMap, PairingAndNormIdentities) {
    Gen gen(3);
    for (int t = 0; t < 500; ++t) {
        const double s = gen.uniform(1.05, 4.0);
        const Grid r = gen.grid(gen.index(1, 6), gen.index(1, 6), gen.log_uniform(1e-3, 1e3));
        const Grid j = duality_map(r, s);
        const double rs = std::pow(norm(r), s);
        const double rs1 = std::pow(norm(r), s - 1.0);
        EXPECT_LE(std::abs(dot(j, r) - rs), 1e-10 * (1.0 + rs)) << "s=" << s;
        EXPECT_LE(std::abs(norm(j) - rs1), 1e-10 * (1.0 + rs1)) << "s=" << s;
    }
}

TEST(PenaltyTest, ConstantsAndValidation) {
    const Penalty p = Penalty::quadratic_tv(4.0);
    EXPECT_EQ(p.p(), 2.0);
    EXPECT_DOUBLE_EQ(p.c0(), 1.0 / 8.0);
    EXPECT_THROW(Penalty::quadratic(0.0), std::invalid_argument);
    EXPECT_THROW(Penalty::quadratic(-1.0), std::invalid_argument);
    EXPECT_THROW(Penalty::quadratic(1.0, Box{1.0, 2.0}), std::invalid_argument);
}

TEST(PenaltyTest, InfeasibleValueIsInfinite) {
    const Penalty p = Penalty::quadratic(1.0, Box::nonnegative());
    EXPECT_TRUE(std::isinf(p.value(vec({1, -1}))));
    EXPECT_DOUBLE_EQ(p.value(vec({1, 2})), 2.5);
}

TEST(BregmanDistance, QuadraticIdentity) {
    Gen gen(4);
    const Penalty theta = Penalty::quadratic(1.0);  // 0.5 |z|^2
    for (int t = 0; t < 50; ++t) {
        const Grid x = gen.grid(3, 3);
        const Grid xbar = gen.grid(3, 3);
        const auto d = bregman_eps_distance(theta, {x, x, 0.0}, xbar);
        ASSERT_TRUE(d.has_value());
        EXPECT_NEAR(*d, 0.5 * dot(xbar - x, xbar - x), 1e-12 * (1 + *d));
    }
}

TEST(BregmanDistance, AtSamePointEqualsEps) {
    Gen gen(5);
    const Penalty theta = Penalty::quadratic_tv(2.0, Box::nonnegative());
    const Grid xi = gen.grid(4, 4);
    const InnerResult r = InnerSolver(theta).solve(xi, 1e-3);
    const auto d = bregman_eps_distance(theta, r.pair, r.pair.x);
    ASSERT_TRUE(d.has_value());
    EXPECT_DOUBLE_EQ(*d, r.pair.eps);
}

TEST(BregmanDistance, InfeasibleTargetIsReportedSeparately) {
    const Penalty theta = Penalty::quadratic(1.0, Box::nonnegative());
    EXPECT_FALSE(bregman_eps_distance(theta, {vec({0, 0}), vec({0, 0}), 0.0}, vec({-1, 0})).has_value());
}

TEST(BregmanDistance, NonnegativeForCertifiedTvPairs) {
    Gen gen(6);
    int trials = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const bool constrained = inst % 2 == 0;
        const std::optional<Box> box = constrained ? std::optional<Box>(Box::nonnegative()) : std::nullopt;
        const Penalty theta = Penalty::quadratic_tv(gen.uniform(0.2, 5.0), box);
        const Grid xi = gen.grid(4, 4, 2.0);
        const InnerResult r = InnerSolver(theta).solve(xi, gen.log_uniform(1e-6, 1e-2));
        ASSERT_TRUE(r.converged);
        ASSERT_TRUE(check_eps_subgradient(r.pair, theta, r.lower_bound));
        for (int k = 0; k < 50; ++k, ++trials) {
            const Grid xbar = constrained ? gen.nonnegative_grid(4, 4, 3.0) : gen.grid(4, 4, 3.0);
            const auto d = bregman_eps_distance(theta, r.pair, xbar);
            ASSERT_TRUE(d.has_value());
            EXPECT_GE(*d, -1e-10);
        }
    }
    EXPECT_GE(trials, 1000);
}

TEST(BregmanDistance, ConvexityLowerBoundQuadratic) {
    // c0 |xbar - x|^2 <= 2 D + 2 eps + 1e-8 for certified pairs of the quadratic penalty
    Gen gen(7);
    for (int t = 0; t < 1000; ++t) {
        const double mu = gen.log_uniform(0.05, 20.0);
        const std::optional<Box> box = t % 2 ? std::optional<Box>(Box::nonnegative()) : std::nullopt;
        const Penalty theta = Penalty::quadratic(mu, box);
        PrimalDualPair pair = solve_quadratic_exact(gen.grid(3, 2), theta);
        pair.eps = gen.uniform(0.0, 0.1);
        const Grid xbar = box ? gen.nonnegative_grid(3, 2) : gen.grid(3, 2);
        const double d = *bregman_eps_distance(theta, pair, xbar);
        const double lhs = theta.c0() * dot(xbar - pair.x, xbar - pair.x);
        EXPECT_LE(lhs, 2.0 * d + 2.0 * pair.eps + 1e-8);
    }
}

TEST(QuadraticSolve, Examples) {
    EXPECT_EQ(solve_quadratic_exact(vec({0, 0}), Penalty::quadratic(3.0)).x, vec({0, 0}));
    const auto a = solve_quadratic_exact(vec({1, -3}), Penalty::quadratic(2.0));
    EXPECT_EQ(a.x, vec({2, -6}));
    EXPECT_EQ(a.eps, 0.0);
    const auto b = solve_quadratic_exact(vec({1, -3}), Penalty::quadratic(1.0, Box::nonnegative()));
    EXPECT_EQ(b.x, vec({1, 0}));
    EXPECT_THROW(solve_quadratic_exact(vec({1}), Penalty::quadratic_tv(1.0)), std::invalid_argument);
}

TEST(QuadraticSolve, IdempotentUnderOwnCertificate) {
    Gen gen(8);
    for (int t = 0; t < 100; ++t) {
        const Penalty theta = Penalty::quadratic(gen.log_uniform(0.1, 10.0), t % 2 ? std::optional<Box>(Box::nonnegative()) : std::nullopt);
        const auto first = solve_quadratic_exact(gen.grid(3, 3), theta);
        const auto again = solve_quadratic_exact(first.xi, theta);
        EXPECT_EQ(first.x, again.x);
    }
}

TEST(QuadraticSolve, MinimumValueMatchesDirectSearch) {
    // the closed form beats every random feasible probe
    Gen gen(9);
    const Penalty theta = Penalty::quadratic(1.5, Box::nonnegative());
    const Grid xi = gen.grid(2, 2);
    const double best = quadratic_min_value(xi, theta);
    for (int k = 0; k < 2000; ++k) {
        const Grid z = gen.nonnegative_grid(2, 2, 2.0);
        EXPECT_GE(theta.value(z) - dot(xi, z), best - 1e-12);
    }
}

TEST(EpsSubgradient, ExactQuadraticWithConjugateBound) {
    Gen gen(10);
    const double mu = 2.5;
    const Penalty theta = Penalty::quadratic(mu);
    const Grid xi = gen.grid(3, 3);
    const PrimalDualPair pair = solve_quadratic_exact(xi, theta);
    EXPECT_TRUE(check_eps_subgradient(pair, theta, -0.5 * mu * dot(xi, xi)));
}

TEST(EpsSubgradient, LargePerturbationFails) {
    Gen gen(11);
    const double mu = 1.0;
    const Penalty theta = Penalty::quadratic(mu);
    const Grid xi = gen.grid(3, 3);
    PrimalDualPair pair = solve_quadratic_exact(xi, theta);
    pair.x += gen.grid(3, 3, 5.0);
    EXPECT_FALSE(check_eps_subgradient(pair, theta, -0.5 * mu * dot(xi, xi)));
}

TEST(EpsSubgradient, PdhgPairWithOwnDualBound) {
    Gen gen(12);
    for (int t = 0; t < 10; ++t) {
        const Penalty theta = Penalty::quadratic_tv(gen.uniform(0.5, 3.0), Box::nonnegative());
        const InnerResult r = InnerSolver(theta).solve(gen.grid(5, 5), 1e-4);
        EXPECT_TRUE(check_eps_subgradient(r.pair, theta, r.lower_bound));
    }
}

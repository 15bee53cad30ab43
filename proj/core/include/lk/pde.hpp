#pragma once

#include <cstddef>
#include <functional>
#include <memory>

#include "lk/forward_problem.hpp"
#include "lk/grid.hpp"
#include "lk/sparse.hpp"

namespace lk::pde {

using ScalarField = std::function<double(double x, double y)>;

/// Uniform grid of m x m interior nodes on [0, 1]^2 with spacing h = 1/(m+1).
/// Node (i, j) sits at (x, y) = ((j + 1) h, (i + 1) h).
struct Mesh {
    std::size_t m = 0;
    double h = 0.0;
    Grid f;          ///< source sampled at interior nodes
    ScalarField g;   ///< Dirichlet data, evaluated on the boundary

    Mesh(std::size_t m_, const ScalarField& source, ScalarField boundary);

    double x(std::size_t j) const noexcept { return static_cast<double>(j + 1) * h; }
    double y(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h; }

    Grid sample(const ScalarField& fn) const;
};

/// Five-point matrix of -Laplace + diag(c) on the interior nodes (row-major node order).
/// c is clamped to >= 0 first.
SparseMatrix assemble(const Mesh& mesh, const Grid& c);

/// Right-hand side contribution of the Dirichlet data: g at boundary neighbours / h^2.
Grid boundary_lift(const Mesh& mesh);

/// A(c) = -Laplace + c with homogeneous Dirichlet conditions, factorized once.
class EllipticOperator {
public:
    /// Throws std::runtime_error when the factorization fails.
    EllipticOperator(const Mesh& mesh, const Grid& c);
    ~EllipticOperator();
    EllipticOperator(EllipticOperator&&) noexcept;
    EllipticOperator& operator=(EllipticOperator&&) noexcept;

    /// A(c)^{-1} rhs
    Grid solve(const Grid& rhs) const;

    /// A(c) u
    Grid apply(const Grid& u) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// u(c): solves -Laplace u + c u = f, u = g on the boundary.
Grid solve_state(const Grid& c, const Mesh& mesh);

/// F(c) = u(c) with F'(c) h = -A(c)^{-1}(h u(c)) and F'(c)^* w = -u(c) A(c)^{-1} w.
/// The factorization and state are cached for the most recent c.
class PdeProblem final : public ForwardProblem {
public:
    PdeProblem(Mesh mesh, Grid data);

    std::size_t num_blocks() const override { return 1; }
    std::size_t domain_rows() const override { return mesh_.m; }
    std::size_t domain_cols() const override { return mesh_.m; }

    Grid evaluate(std::size_t block, const Grid& c) override;
    const Grid& data(std::size_t block) const override;
    Grid derivative_apply(std::size_t block, const Grid& c, const Grid& h) override;
    Grid adjoint_apply(std::size_t block, const Grid& c, const Grid& w) override;

    const Mesh& mesh() const noexcept { return mesh_; }

private:
    void prepare(const Grid& c);

    Mesh mesh_;
    Grid data_;
    Grid cached_c_;
    std::unique_ptr<EllipticOperator> op_;
    Grid cached_u_;
};

/// 200 exp(-10 (x - 0.5)^2 - 10 (y - 0.5)^2)
double gaussian_source(double x, double y);

struct IdentificationSetup {
    Mesh mesh;
    Grid c_true;
};

/// Unit square, g = 1, Gaussian source, and a piecewise-constant coefficient:
/// 1 on the square [0.2, 0.45] x [0.55, 0.8], 2 on the disc of radius 0.15
/// around (0.65, 0.35), 0 elsewhere.
IdentificationSetup default_problem(std::size_t m = 100);

}  // namespace lk::pde

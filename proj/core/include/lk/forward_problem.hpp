#pragma once

#include <cstddef>
#include <vector>

#include "lk/grid.hpp"
#include "lk/sparse.hpp"

namespace lk {

/// A system F_i(x) = y_i, i = 0..N-1, with linearizations L_i(x).
///
/// Implementations may cache per-x work (e.g. factorizations), so the
/// evaluation methods are non-const. A single instance is not thread-safe.
class ForwardProblem {
public:
    virtual ~ForwardProblem() = default;

    virtual std::size_t num_blocks() const = 0;
    virtual std::size_t domain_rows() const = 0;
    virtual std::size_t domain_cols() const = 0;

    /// F_i(x)
    virtual Grid evaluate(std::size_t block, const Grid& x) = 0;
    /// y_i (possibly noisy)
    virtual const Grid& data(std::size_t block) const = 0;
    /// L_i(x) h
    virtual Grid derivative_apply(std::size_t block, const Grid& x, const Grid& h) = 0;
    /// L_i(x)^* w
    virtual Grid adjoint_apply(std::size_t block, const Grid& x, const Grid& w) = 0;

    Grid residual(std::size_t block, const Grid& x) { return evaluate(block, x) - data(block); }
};

/// F_i(x) = A_i vec(x) for row blocks A_i of a sparse matrix.
class LinearProblem final : public ForwardProblem {
public:
    /// block_rows holds N+1 increasing row offsets starting at 0 and ending at A.rows().
    /// data is the full right-hand side (any shape with A.rows() entries).
    LinearProblem(SparseMatrix a, std::size_t image_rows, std::size_t image_cols, const Grid& data,
                  std::vector<std::size_t> block_rows);

    /// Single block.
    LinearProblem(SparseMatrix a, std::size_t image_rows, std::size_t image_cols, const Grid& data);

    std::size_t num_blocks() const override { return blocks_.size(); }
    std::size_t domain_rows() const override { return image_rows_; }
    std::size_t domain_cols() const override { return image_cols_; }

    Grid evaluate(std::size_t block, const Grid& x) override;
    const Grid& data(std::size_t block) const override { return data_.at(block); }
    Grid derivative_apply(std::size_t block, const Grid& x, const Grid& h) override;
    Grid adjoint_apply(std::size_t block, const Grid& x, const Grid& w) override;

    const SparseMatrix& block_matrix(std::size_t block) const { return blocks_.at(block); }

private:
    std::size_t image_rows_;
    std::size_t image_cols_;
    std::vector<SparseMatrix> blocks_;
    std::vector<Grid> data_;
};

}  // namespace lk

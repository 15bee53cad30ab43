#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace lk {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Row-compressed sparse matrix.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Entries may arrive in any order; duplicates are summed and explicit zeros dropped.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_columns(std::size_t i) const;
    std::span<const double> row_values(std::size_t i) const;

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// x = A^T y
    void apply_adjoint(std::span<const double> y, std::span<double> x) const;
    std::vector<double> apply_adjoint(std::span<const double> y) const;

    /// Rows [begin, end) as a new matrix with the same column count.
    SparseMatrix row_block(std::size_t begin, std::size_t end) const;

    double row_sum(std::size_t i) const;

    /// Maximum absolute column sum.
    double norm_1() const;

    std::vector<Triplet> triplets() const;

    /// Plain-text coordinate format: a "M Q NNZ" header line followed by one
    /// zero-indexed "row col value" line per entry, values with 17 significant digits.
    void write_coordinate(std::ostream& out) const;
    static SparseMatrix read_coordinate(std::istream& in);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

}  // namespace lk

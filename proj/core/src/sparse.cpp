#include "lk/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lk {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(want) + ", got " + std::to_string(got));
    }
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw std::invalid_argument("SparseMatrix: entry (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") outside " +
                                        std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    row_ptr_.assign(rows + 1, 0);
    col_idx_.reserve(entries.size());
    values_.reserve(entries.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        while (k < entries.size() && entries[k].row == i) {
            const std::size_t col = entries[k].col;
            double v = 0.0;
            while (k < entries.size() && entries[k].row == i && entries[k].col == col) {
                v += entries[k].value;
                ++k;
            }
            if (v != 0.0) {
                col_idx_.push_back(col);
                values_.push_back(v);
            }
        }
        row_ptr_[i + 1] = values_.size();
    }
}

std::span<const std::size_t> SparseMatrix::row_columns(std::size_t i) const {
    return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

std::span<const double> SparseMatrix::row_values(std::size_t i) const {
    return std::span<const double>(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

void SparseMatrix::apply(std::span<const double> x, std::span<double> y) const {
    require_length(x.size(), cols_, "SparseMatrix::apply(x)");
    require_length(y.size(), rows_, "SparseMatrix::apply(y)");
    for (std::size_t i = 0; i < rows_; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
        y[i] = sum;
    }
}

std::vector<double> SparseMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(rows_);
    apply(x, y);
    return y;
}

void SparseMatrix::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    require_length(y.size(), rows_, "SparseMatrix::apply_adjoint(y)");
    require_length(x.size(), cols_, "SparseMatrix::apply_adjoint(x)");
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) x[col_idx_[k]] += values_[k] * yi;
    }
}

std::vector<double> SparseMatrix::apply_adjoint(std::span<const double> y) const {
    std::vector<double> x(cols_);
    apply_adjoint(y, x);
    return x;
}

SparseMatrix SparseMatrix::row_block(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows_) throw std::invalid_argument("SparseMatrix::row_block: bad range");
    SparseMatrix out;
    out.rows_ = end - begin;
    out.cols_ = cols_;
    out.row_ptr_.assign(out.rows_ + 1, 0);
    const std::size_t offset = row_ptr_[begin];
    for (std::size_t i = begin; i < end; ++i) out.row_ptr_[i - begin + 1] = row_ptr_[i + 1] - offset;
    out.col_idx_.assign(col_idx_.begin() + offset, col_idx_.begin() + row_ptr_[end]);
    out.values_.assign(values_.begin() + offset, values_.begin() + row_ptr_[end]);
    return out;
}

double SparseMatrix::row_sum(std::size_t i) const {
    double sum = 0.0;
    for (double v : row_values(i)) sum += v;
    return sum;
}

double SparseMatrix::norm_1() const {
    std::vector<double> col_sums(cols_, 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) col_sums[col_idx_[k]] += std::abs(values_[k]);
    return col_sums.empty() ? 0.0 : *std::max_element(col_sums.begin(), col_sums.end());
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out.push_back({i, col_idx_[k], values_[k]});
    }
    return out;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
    out << rows_ << ' ' << cols_ << ' ' << values_.size() << '\n';
    char buf[64];
    for (const auto& t : triplets()) {
        std::snprintf(buf, sizeof buf, "%.17g", t.value);
        out << t.row << ' ' << t.col << ' ' << buf << '\n';
    }
}

SparseMatrix SparseMatrix::read_coordinate(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("coordinate matrix: missing header");
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(header >> rows >> cols >> nnz)) {
        throw std::runtime_error("coordinate matrix: malformed header '" + line + "'");
    }
    std::vector<Triplet> entries;
    entries.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        Triplet t{};
        if (!(in >> t.row >> t.col >> t.value)) {
            throw std::runtime_error("coordinate matrix: expected " + std::to_string(nnz) +
                                     " entries, read " + std::to_string(k));
        }
        if (t.row >= rows || t.col >= cols) {
            throw std::runtime_error("coordinate matrix: entry " + std::to_string(k) + " at (" + std::to_string(t.row) +
                                     ", " + std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                                     std::to_string(cols));
        }
        entries.push_back(t);
    }
    return SparseMatrix(rows, cols, std::move(entries));
}

}  // namespace lk

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lk {

/// Dense row-major array of doubles with an immutable (rows, cols) shape.
///
/// Serves as the primal space, its dual, and the residual spaces. A flat
/// vector of length n is stored with shape (n, 1). All binary arithmetic
/// requires matching shapes; a mismatch throws std::invalid_argument.
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, double fill = 0.0);
    Grid(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Grid column(std::size_t n, double fill = 0.0) { return Grid(n, 1, fill); }
    static Grid column(std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool same_shape(const Grid& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    /// Same data viewed with a different shape of equal element count.
    Grid reshaped(std::size_t rows, std::size_t cols) const;

    Grid& operator+=(const Grid& other);
    Grid& operator-=(const Grid& other);
    Grid& operator*=(double scale) noexcept;

    /// this += scale * other
    Grid& axpy(double scale, const Grid& other);

    void fill(double value) noexcept;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Grid operator+(Grid a, const Grid& b);
Grid operator-(Grid a, const Grid& b);
Grid operator*(double scale, Grid a);

void require_same_shape(const Grid& a, const Grid& b, const char* what);

/// Frobenius inner product.
double dot(const Grid& a, const Grid& b);

/// Entrywise Euclidean (Frobenius) norm.
double norm(const Grid& a);

double max_abs(const Grid& a) noexcept;

std::string shape_string(const Grid& g);

}  // namespace lk

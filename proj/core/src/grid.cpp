#include "lk/grid.hpp"

#include <algorithm>
#include <cmath>

namespace lk {

Grid::Grid(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Grid::Grid(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Grid: " + std::to_string(data_.size()) +
                                    " values do not fill a " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " shape");
    }
}

Grid Grid::column(std::vector<double> values) {
    const auto n = values.size();
    return Grid(n, 1, std::move(values));
}

Grid Grid::reshaped(std::size_t rows, std::size_t cols) const {
    return Grid(rows, cols, data_);
}

void require_same_shape(const Grid& a, const Grid& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_string(a) +
                                    " vs " + shape_string(b));
    }
}

Grid& Grid::operator+=(const Grid& other) {
    require_same_shape(*this, other, "Grid::operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Grid& Grid::operator-=(const Grid& other) {
    require_same_shape(*this, other, "Grid::operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Grid& Grid::operator*=(double scale) noexcept {
    for (auto& v : data_) v *= scale;
    return *this;
}

Grid& Grid::axpy(double scale, const Grid& other) {
    require_same_shape(*this, other, "Grid::axpy");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += scale * other.data_[k];
    return *this;
}

void Grid::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

Grid operator+(Grid a, const Grid& b) { return a += b; }
Grid operator-(Grid a, const Grid& b) { return a -= b; }
Grid operator*(double scale, Grid a) { return a *= scale; }

double dot(const Grid& a, const Grid& b) {
    require_same_shape(a, b, "dot");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

double norm(const Grid& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += v * v;
    return std::sqrt(sum);
}

double max_abs(const Grid& a) noexcept {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

std::string shape_string(const Grid& g) {
    return "(" + std::to_string(g.rows()) + "x" + std::to_string(g.cols()) + ")";
}

}  // namespace lk

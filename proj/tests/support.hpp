#pragma once

// Random instance generators and small reference computations shared by the tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "lk/grid.hpp"
#include "lk/tv.hpp"

namespace lk::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    /// log-uniform on [lo, hi]
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    Grid grid(std::size_t rows, std::size_t cols, double scale = 1.0) {
        Grid g(rows, cols);
        for (auto& v : g.values()) v = scale * normal();
        return g;
    }
    Grid nonnegative_grid(std::size_t rows, std::size_t cols, double scale = 1.0) {
        Grid g(rows, cols);
        for (auto& v : g.values()) v = scale * std::abs(normal());
        return g;
    }
    GradientField field(std::size_t rows, std::size_t cols, double scale = 1.0) {
        return GradientField(grid(rows, cols, scale), grid(rows, cols, scale));
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// sum_k a_k b_k with long double accumulation, used as an independent inner product.
inline double reference_dot(std::span<const double> a, std::span<const double> b) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<long double>(a[k]) * b[k];
    return static_cast<double>(s);
}

inline double reference_norm(std::span<const double> a) { return std::sqrt(reference_dot(a, a)); }

inline double relative_difference(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace lk::testing

#include "lk/tv.hpp"

#include <algorithm>
#include <cmath>

namespace lk {

namespace {
constexpr double kBelowOne = 1.0 - 0x1p-53;
}

GradientField::GradientField(Grid u_, Grid v_) : u(std::move(u_)), v(std::move(v_)) {
    require_same_shape(u, v, "GradientField");
}

double dot(const GradientField& a, const GradientField& b) {
    return dot(a.u, b.u) + dot(a.v, b.v);
}

GradientField discrete_gradient(const Grid& z) {
    const std::size_t rows = z.rows();
    const std::size_t cols = z.cols();
    GradientField d(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t ip = (i + 1 == rows) ? 0 : i + 1;
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t jp = (j + 1 == cols) ? 0 : j + 1;
            d.u(i, j) = z(ip, j) - z(i, j);
            d.v(i, j) = z(i, jp) - z(i, j);
        }
    }
    return d;
}

Grid divergence_adjoint(const GradientField& lambda) {
    const std::size_t rows = lambda.rows();
    const std::size_t cols = lambda.cols();
    Grid out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t im = (i == 0) ? rows - 1 : i - 1;
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t jm = (j == 0) ? cols - 1 : j - 1;
            out(i, j) = (lambda.u(im, j) - lambda.u(i, j)) + (lambda.v(i, jm) - lambda.v(i, j));
        }
    }
    return out;
}

double isotropic_norm(const GradientField& field) {
    double sum = 0.0;
    const auto u = field.u.values();
    const auto v = field.v.values();
    for (std::size_t k = 0; k < u.size(); ++k) sum += std::hypot(u[k], v[k]);
    return sum;
}

double tv_value(const Grid& z) { return isotropic_norm(discrete_gradient(z)); }

GradientField project_dual_ball(GradientField lambda) {
    auto u = lambda.u.values();
    auto v = lambda.v.values();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double n = std::hypot(u[k], v[k]);
        if (n > 1.0) {
            u[k] /= n;
            v[k] /= n;
            // rounding can leave the pixel at 1 + ulp; shrink until inside
            while (std::hypot(u[k], v[k]) > 1.0) {
                u[k] *= kBelowOne;
                v[k] *= kBelowOne;
            }
        }
    }
    return lambda;
}

double max_pixel_norm(const GradientField& field) {
    double m = 0.0;
    const auto u = field.u.values();
    const auto v = field.v.values();
    for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::hypot(u[k], v[k]));
    return m;
}

}  // namespace lk

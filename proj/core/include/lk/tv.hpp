#pragma once

#include "lk/grid.hpp"

namespace lk {

/// A pair (u, v) on the image grid: either a discrete gradient Dz = (D1 z, D2 z)
/// or a dual variable lambda for the TV term.
struct GradientField {
    Grid u;
    Grid v;

    GradientField() = default;
    GradientField(std::size_t rows, std::size_t cols) : u(rows, cols), v(rows, cols) {}
    GradientField(Grid u_, Grid v_);

    std::size_t rows() const noexcept { return u.rows(); }
    std::size_t cols() const noexcept { return u.cols(); }
};

double dot(const GradientField& a, const GradientField& b);

/// Forward differences with periodic wrap:
///   (D1 z)_{i,j} = z_{i+1,j} - z_{i,j},  (D1 z)_{I-1,j} = z_{0,j} - z_{I-1,j}
///   (D2 z)_{i,j} = z_{i,j+1} - z_{i,j},  (D2 z)_{i,J-1} = z_{i,0} - z_{i,J-1}
GradientField discrete_gradient(const Grid& z);

/// Exact adjoint D^T of discrete_gradient (a negative periodic backward divergence).
Grid divergence_adjoint(const GradientField& lambda);

/// h(u, v) = sum_ij sqrt(u_ij^2 + v_ij^2).
double isotropic_norm(const GradientField& field);

/// h(Dz), the isotropic discrete total variation.
double tv_value(const Grid& z);

/// Pixelwise projection onto {(u, v) : u_ij^2 + v_ij^2 <= 1}.
GradientField project_dual_ball(GradientField lambda);

/// Largest pixel norm sqrt(u^2 + v^2) of the field.
double max_pixel_norm(const GradientField& field);

}  // namespace lk

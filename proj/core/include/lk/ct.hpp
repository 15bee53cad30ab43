#pragma once

#include <cstddef>
#include <vector>

#include "lk/grid.hpp"
#include "lk/sparse.hpp"

namespace lk::ct {

/// 2D parallel-beam scan of a q x q image of unit pixels centred at the origin.
///
/// Ray k of an angle theta is the line x cos(theta) + y sin(theta) = rho_k with
/// rho_k = (k - (R - 1) / 2) * detector_spacing. Pixel (i, j) covers
/// x in [-q/2 + j, -q/2 + j + 1] and y in [q/2 - i - 1, q/2 - i] (row 0 on top).
/// Matrix rows are ordered angle-major: row = angle_index * R + k.
struct TomoGeometry {
    std::size_t grid_side = 0;
    std::vector<double> angles_deg;
    std::size_t rays_per_angle = 0;
    double detector_spacing = 1.0;

    std::size_t num_rays() const noexcept { return angles_deg.size() * rays_per_angle; }
    std::size_t num_pixels() const noexcept { return grid_side * grid_side; }

    /// Throws std::invalid_argument when the geometry is unusable.
    void validate() const;
};

/// `count` angles start, start + step, ... with step = (stop - start) / count (stop excluded).
std::vector<double> evenly_spaced_angles(std::size_t count, double start = 0.0, double stop = 180.0);

/// round(sqrt(2) q) + 1, enough rays for the image diagonal at unit spacing.
std::size_t default_rays_per_angle(std::size_t grid_side);

/// q = grid_side, `num_angles` angles evenly over [0, 180), default ray count.
TomoGeometry default_geometry(std::size_t grid_side, std::size_t num_angles);

/// Exact ray/pixel intersection lengths by parametric traversal of the pixel
/// boundaries crossed by each ray. Rays that miss the image give empty rows.
SparseMatrix build_parallel_tomo(const TomoGeometry& geom);

/// Row offsets splitting the rows into `blocks` contiguous groups of whole angles.
std::vector<std::size_t> angle_block_bounds(const TomoGeometry& geom, std::size_t blocks);

/// Modified Shepp-Logan head phantom on a q x q grid, clamped to [0, 1]. Requires q >= 8.
Grid shepp_logan(std::size_t q);

/// A f, shaped (number of angles) x (rays per angle).
Grid forward_project(const SparseMatrix& a, const TomoGeometry& geom, const Grid& image);

}  // namespace lk::ct

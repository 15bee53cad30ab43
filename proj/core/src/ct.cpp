#include "lk/ct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lk::ct {

namespace {

// segments shorter than this come from near-coincident x/y crossings
constexpr double kMinSegment = 1e-10;
constexpr double kParallelTol = 1e-14;

struct Ellipse {
    double intensity;
    double a;
    double b;
    double x0;
    double y0;
    double phi_deg;
};

// Modified Shepp-Logan (Toft), coordinates on [-1, 1]^2.
constexpr std::array<Ellipse, 10> kSheppLogan = {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Appends the intersection lengths of one ray to `row`.
void trace_ray(double theta, double rho, std::size_t q, std::size_t row, std::vector<Triplet>& out) {
    const double half = 0.5 * static_cast<double>(q);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double px = rho * c;
    const double py = rho * s;
    const double dx = -s;
    const double dy = c;

    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double p, double d) {
        if (std::abs(d) < kParallelTol) {
            // parallel to this pair of sides: must lie strictly inside the slab
            return p > -half && p < half;
        }
        double t1 = (-half - p) / d;
        double t2 = (half - p) / d;
        if (t1 > t2) std::swap(t1, t2);
        t_lo = std::max(t_lo, t1);
        t_hi = std::min(t_hi, t2);
        return true;
    };
    if (!clip(px, dx) || !clip(py, dy) || !(t_hi - t_lo > kMinSegment)) return;

    std::vector<double> ts{t_lo, t_hi};
    ts.reserve(2 * q + 4);
    auto add_crossings = [&](double p, double d) {
        if (std::abs(d) < kParallelTol) return;
        for (std::size_t k = 0; k <= q; ++k) {
            const double t = (-half + static_cast<double>(k) - p) / d;
            if (t > t_lo && t < t_hi) ts.push_back(t);
        }
    };
    add_crossings(px, dx);
    add_crossings(py, dy);
    std::sort(ts.begin(), ts.end());

    const auto last = static_cast<double>(q - 1);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double len = ts[k + 1] - ts[k];
        if (len <= kMinSegment) continue;
        const double tm = 0.5 * (ts[k] + ts[k + 1]);
        const double mx = px + tm * dx;
        const double my = py + tm * dy;
        const double col = std::clamp(std::floor(mx + half), 0.0, last);
        const double r = std::clamp(std::floor(half - my), 0.0, last);
        out.push_back({row, static_cast<std::size_t>(r) * q + static_cast<std::size_t>(col), len});
    }
}

}  // namespace

void TomoGeometry::validate() const {
    if (grid_side < 1) throw std::invalid_argument("TomoGeometry: grid side must be at least 1");
    if (angles_deg.empty()) throw std::invalid_argument("TomoGeometry: at least one angle required");
    if (rays_per_angle < 1) throw std::invalid_argument("TomoGeometry: at least one ray per angle");
    if (!(detector_spacing > 0.0)) throw std::invalid_argument("TomoGeometry: detector spacing must be positive");
    for (std::size_t k = 0; k < angles_deg.size(); ++k) {
        const double a = angles_deg[k];
        if (!(a >= 0.0 && a < 180.0)) {
            throw std::invalid_argument("TomoGeometry: angle " + std::to_string(a) + " outside [0, 180)");
        }
        if (k > 0 && !(a > angles_deg[k - 1])) {
            throw std::invalid_argument("TomoGeometry: angles must be strictly increasing");
        }
    }
}

std::vector<double> evenly_spaced_angles(std::size_t count, double start, double stop) {
    std::vector<double> out(count);
    const double step = (stop - start) / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = start + step * static_cast<double>(k);
    return out;
}

std::size_t default_rays_per_angle(std::size_t grid_side) {
    return static_cast<std::size_t>(std::lround(std::numbers::sqrt2 * static_cast<double>(grid_side))) + 1;
}

TomoGeometry default_geometry(std::size_t grid_side, std::size_t num_angles) {
    return TomoGeometry{grid_side, evenly_spaced_angles(num_angles), default_rays_per_angle(grid_side), 1.0};
}

SparseMatrix build_parallel_tomo(const TomoGeometry& geom) {
    geom.validate();
    const std::size_t q = geom.grid_side;
    const std::size_t rays = geom.rays_per_angle;
    std::vector<Triplet> entries;
    entries.reserve(geom.num_rays() * q * 3 / 2);
    const double centre = 0.5 * static_cast<double>(rays - 1);
    for (std::size_t a = 0; a < geom.angles_deg.size(); ++a) {
        const double theta = deg_to_rad(geom.angles_deg[a]);
        for (std::size_t k = 0; k < rays; ++k) {
            const double rho = (static_cast<double>(k) - centre) * geom.detector_spacing;
            trace_ray(theta, rho, q, a * rays + k, entries);
        }
    }
    return SparseMatrix(geom.num_rays(), geom.num_pixels(), std::move(entries));
}

std::vector<std::size_t> angle_block_bounds(const TomoGeometry& geom, std::size_t blocks) {
    const std::size_t n_angles = geom.angles_deg.size();
    if (blocks < 1 || blocks > n_angles) {
        throw std::invalid_argument("angle_block_bounds: need 1 <= blocks <= number of angles");
    }
    std::vector<std::size_t> bounds(blocks + 1);
    for (std::size_t b = 0; b <= blocks; ++b) bounds[b] = (b * n_angles / blocks) * geom.rays_per_angle;
    return bounds;
}

Grid shepp_logan(std::size_t q) {
    if (q < 8) throw std::invalid_argument("shepp_logan: grid side must be at least 8");
    Grid img(q, q);
    const double qd = static_cast<double>(q);
    for (std::size_t i = 0; i < q; ++i) {
        const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / qd;
        for (std::size_t j = 0; j < q; ++j) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / qd - 1.0;
            double v = 0.0;
            for (const auto& e : kSheppLogan) {
                const double phi = deg_to_rad(e.phi_deg);
                const double xr = (x - e.x0) * std::cos(phi) + (y - e.y0) * std::sin(phi);
                const double yr = -(x - e.x0) * std::sin(phi) + (y - e.y0) * std::cos(phi);
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.intensity;
            }
            // 1 - 0.8 - 0.2 leaves rounding residue inside the dark ellipses
            if (std::abs(v) < 1e-12) v = 0.0;
            img(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

Grid forward_project(const SparseMatrix& a, const TomoGeometry& geom, const Grid& image) {
    return Grid(geom.angles_deg.size(), geom.rays_per_angle, a.apply(image.values()));
}

}  // namespace lk::ct

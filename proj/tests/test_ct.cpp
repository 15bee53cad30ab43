#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lk/ct.hpp"
#include "lk/forward_problem.hpp"
#include "lk/noise.hpp"
#include "support.hpp"

using namespace lk;
using lk::testing::Gen;

namespace {

struct Line {
    double px, py, dx, dy;  // point on the line and unit direction
};

Line ray_line(double theta_deg, double rho) {
    const double t = theta_deg * std::numbers::pi / 180.0;
    return {rho * std::cos(t), rho * std::sin(t), -std::sin(t), std::cos(t)};
}

// Length of the line inside [x0, x1] x [y0, y1], from the parameter interval
// of each slab (Liang-Barsky clipping written independently of the tracer).
double clip_length(const Line& l, double x0, double x1, double y0, double y1) {
    double lo = -1e300, hi = 1e300;
    const double p[4] = {-l.dx, l.dx, -l.dy, l.dy};
    const double q[4] = {l.px - x0, x1 - l.px, l.py - y0, y1 - l.py};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return 0.0;
            continue;
        }
        const double r = q[k] / p[k];
        if (p[k] < 0.0) lo = std::max(lo, r);
        else hi = std::min(hi, r);
    }
    return std::max(0.0, hi - lo);
}

// Chord through the q x q square from its intersections with the four sides.
double chord_by_sides(const Line& l, double half) {
    std::vector<std::pair<double, double>> pts;
    auto add = [&](double x, double y) {
        for (const auto& [a, b] : pts) {
            if (std::abs(a - x) < 1e-12 && std::abs(b - y) < 1e-12) return;
        }
        pts.emplace_back(x, y);
    };
    for (double xs : {-half, half}) {
        if (std::abs(l.dx) > 1e-15) {
            const double y = l.py + (xs - l.px) / l.dx * l.dy;
            if (y >= -half && y <= half) add(xs, y);
        }
    }
    for (double ys : {-half, half}) {
        if (std::abs(l.dy) > 1e-15) {
            const double x = l.px + (ys - l.py) / l.dy * l.dx;
            if (x >= -half && x <= half) add(x, ys);
        }
    }
    if (pts.size() < 2) return 0.0;
    return std::hypot(pts[0].first - pts[1].first, pts[0].second - pts[1].second);
}

ct::TomoGeometry geometry(std::size_t q, std::vector<double> angles, std::size_t rays, double spacing = 1.0) {
    ct::TomoGeometry g;
    g.grid_side = q;
    g.angles_deg = std::move(angles);
    g.rays_per_angle = rays;
    g.detector_spacing = spacing;
    return g;
}

double row_sum(const SparseMatrix& a, std::size_t r) {
    double s = 0.0;
    for (double v : a.row_values(r)) s += v;
    return s;
}

}  // namespace

TEST(Tomography, SingleHorizontalRayThroughUnitPixel) {
    const SparseMatrix a = ct::build_parallel_tomo(geometry(1, {90.0}, 1));
    ASSERT_EQ(a.rows(), 1u);
    ASSERT_EQ(a.nnz(), 1u);
    EXPECT_NEAR(a.row_values(0)[0], 1.0, 1e-14);
}

TEST(Tomography, VerticalRayAlongLeftColumn) {
    // theta = 0: rays x = rho with rho = -0.5, 0.5
    const SparseMatrix a = ct::build_parallel_tomo(geometry(2, {0.0}, 2));
    ASSERT_EQ(a.row_columns(0).size(), 2u);
    EXPECT_EQ(a.row_columns(0)[0], 0u);
    EXPECT_EQ(a.row_columns(0)[1], 2u);
    EXPECT_NEAR(a.row_values(0)[0], 1.0, 1e-14);
    EXPECT_NEAR(a.row_values(0)[1], 1.0, 1e-14);
}

TEST(Tomography, RowSumsEqualChordLength) {
    Gen gen(40);
    for (int t = 0; t < 20; ++t) {
        const std::size_t q = gen.index(2, 24);
        std::vector<double> angles;
        double a = gen.uniform(0.0, 10.0);
        while (a < 180.0) {
            angles.push_back(a);
            a += gen.uniform(5.0, 40.0);
        }
        const double spacing = gen.uniform(0.3, 1.3);
        const auto geom = geometry(q, angles, gen.index(1, 3 * q), spacing);
        const SparseMatrix m = ct::build_parallel_tomo(geom);
        const double centre = 0.5 * static_cast<double>(geom.rays_per_angle - 1);
        for (std::size_t ai = 0; ai < angles.size(); ++ai) {
            for (std::size_t k = 0; k < geom.rays_per_angle; ++k) {
                const double rho = (static_cast<double>(k) - centre) * spacing;
                const double want = chord_by_sides(ray_line(angles[ai], rho), 0.5 * static_cast<double>(q));
                EXPECT_NEAR(row_sum(m, ai * geom.rays_per_angle + k), want, 1e-9) << "q=" << q << " angle=" << angles[ai];
            }
        }
    }
}

TEST(Tomography, EntriesMatchPerPixelClipping) {
    Gen gen(41);
    for (int t = 0; t < 10; ++t) {
        const std::size_t q = gen.index(3, 12);
        const std::vector<double> angles{gen.uniform(0, 60), gen.uniform(60, 120), gen.uniform(120, 179)};
        const auto geom = geometry(q, angles, 2 * q, gen.uniform(0.4, 0.9));
        const SparseMatrix m = ct::build_parallel_tomo(geom);
        const double half = 0.5 * static_cast<double>(q);
        const double centre = 0.5 * static_cast<double>(geom.rays_per_angle - 1);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const Line l = ray_line(angles[r / geom.rays_per_angle],
                                    (static_cast<double>(r % geom.rays_per_angle) - centre) * geom.detector_spacing);
            std::vector<double> dense(q * q, 0.0);
            const auto cols = m.row_columns(r);
            const auto vals = m.row_values(r);
            for (std::size_t k = 0; k < cols.size(); ++k) dense[cols[k]] += vals[k];
            for (std::size_t i = 0; i < q; ++i) {
                for (std::size_t j = 0; j < q; ++j) {
                    const double x0 = -half + static_cast<double>(j);
                    const double y1 = half - static_cast<double>(i);
                    const double want = clip_length(l, x0, x0 + 1.0, y1 - 1.0, y1);
                    EXPECT_NEAR(dense[i * q + j], want, 1e-9);
                }
            }
        }
    }
}

TEST(Tomography, ValuesPositiveBoundedAndSparse) {
    const auto geom = ct::default_geometry(32, 20);
    const SparseMatrix m = ct::build_parallel_tomo(geom);
    EXPECT_EQ(m.cols(), 32u * 32u);
    EXPECT_EQ(m.rows(), 20u * geom.rays_per_angle);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        EXPECT_LE(m.row_values(r).size(), 2u * 32u);
        for (double v : m.row_values(r)) {
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, 32.0 * std::numbers::sqrt2);
        }
    }
}

TEST(Tomography, Deterministic) {
    const auto geom = ct::default_geometry(16, 7);
    EXPECT_EQ(ct::build_parallel_tomo(geom).triplets().size(), ct::build_parallel_tomo(geom).triplets().size());
    const auto a = ct::build_parallel_tomo(geom).triplets();
    const auto b = ct::build_parallel_tomo(geom).triplets();
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].row, b[k].row);
        EXPECT_EQ(a[k].col, b[k].col);
        EXPECT_EQ(a[k].value, b[k].value);
    }
}

TEST(Tomography, ApplyAndAdjoint) {
    Gen gen(42);
    const auto geom = ct::default_geometry(24, 13);
    const SparseMatrix a = ct::build_parallel_tomo(geom);
    EXPECT_EQ(Grid::column(a.apply(std::vector<double>(a.cols(), 0.0))), Grid::column(a.rows()));
    for (int t = 0; t < 100; ++t) {
        const Grid f = gen.grid(a.cols(), 1);
        const Grid g = gen.grid(a.rows(), 1);
        const double lhs = lk::testing::reference_dot(a.apply(f.values()), g.values());
        const double rhs = lk::testing::reference_dot(f.values(), a.apply_adjoint(g.values()));
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * a.norm_1() * norm(f) * norm(g));
    }
    EXPECT_THROW(a.apply(std::vector<double>(a.cols() + 1)), std::invalid_argument);
    EXPECT_THROW(a.apply_adjoint(std::vector<double>(a.rows() - 1)), std::invalid_argument);
}

TEST(Tomography, ConstantImageGivesChordLengths) {
    const auto geom = ct::default_geometry(20, 9);
    const SparseMatrix a = ct::build_parallel_tomo(geom);
    const Grid sino = ct::forward_project(a, geom, Grid(20, 20, 1.0));
    EXPECT_EQ(sino.rows(), 9u);
    EXPECT_EQ(sino.cols(), geom.rays_per_angle);
    for (std::size_t r = 0; r < a.rows(); ++r) EXPECT_NEAR(sino[r], row_sum(a, r), 1e-12);
}

TEST(Tomography, ScaleCovariance) {
    const auto geom = ct::default_geometry(32, 11);
    const SparseMatrix a = ct::build_parallel_tomo(geom);
    const Grid f = ct::shepp_logan(32);
    EXPECT_EQ(ct::forward_project(a, geom, 4.0 * f), 4.0 * ct::forward_project(a, geom, f));
}

TEST(Tomography, LinearizationIndependentOfPoint) {
    Gen gen(43);
    const auto geom = ct::default_geometry(12, 5);
    const Grid truth = ct::shepp_logan(12);
    LinearProblem prob(ct::build_parallel_tomo(geom), 12, 12, ct::forward_project(ct::build_parallel_tomo(geom), geom, truth));
    const Grid w = gen.grid(prob.data(0).rows(), 1);
    const Grid h = gen.grid(12, 12);
    EXPECT_EQ(prob.adjoint_apply(0, gen.grid(12, 12), w), prob.adjoint_apply(0, gen.grid(12, 12), w));
    EXPECT_EQ(prob.derivative_apply(0, gen.grid(12, 12), h), prob.derivative_apply(0, Grid(12, 12), h));
    EXPECT_NEAR(norm(prob.residual(0, truth)), 0.0, 1e-12);
}

TEST(Tomography, GeometryValidation) {
    EXPECT_THROW(ct::build_parallel_tomo(geometry(0, {0.0}, 1)), std::invalid_argument);
    EXPECT_THROW(ct::build_parallel_tomo(geometry(4, {}, 1)), std::invalid_argument);
    EXPECT_THROW(ct::build_parallel_tomo(geometry(4, {10.0, 5.0}, 3)), std::invalid_argument);
    EXPECT_THROW(ct::build_parallel_tomo(geometry(4, {180.0}, 3)), std::invalid_argument);
    EXPECT_THROW(ct::build_parallel_tomo(geometry(4, {0.0}, 0)), std::invalid_argument);
}

TEST(Tomography, RaysMissingTheGridGiveEmptyRows) {
    const SparseMatrix a = ct::build_parallel_tomo(geometry(4, {0.0, 45.0}, 11));
    EXPECT_EQ(a.rows(), 22u);
    EXPECT_TRUE(a.row_values(0).empty());   // rho = -5
    EXPECT_TRUE(a.row_values(10).empty());  // rho = 5
}

TEST(Tomography, FullAndDeskDimensions) {
    const auto angles = ct::evenly_spaced_angles(45, 1.0, 181.0);
    ASSERT_EQ(angles.size(), 45u);
    EXPECT_DOUBLE_EQ(angles.front(), 1.0);
    EXPECT_DOUBLE_EQ(angles[1], 5.0);
    EXPECT_DOUBLE_EQ(angles.back(), 177.0);
    EXPECT_EQ(geometry(256, angles, 367).num_rays(), 16515u);
    EXPECT_EQ(geometry(256, angles, 367).num_pixels(), 65536u);
    EXPECT_EQ(ct::default_rays_per_angle(64), 92u);
    const auto desk = ct::default_geometry(64, 30);
    EXPECT_DOUBLE_EQ(desk.angles_deg[1], 6.0);
    EXPECT_EQ(desk.num_rays(), 30u * 92u);
}

TEST(Tomography, AngleBlocks) {
    const auto geom = ct::default_geometry(8, 10);
    const auto b = ct::angle_block_bounds(geom, 3);
    ASSERT_EQ(b.size(), 4u);
    EXPECT_EQ(b.front(), 0u);
    EXPECT_EQ(b.back(), geom.num_rays());
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        EXPECT_LT(b[k], b[k + 1]);
        EXPECT_EQ(b[k] % geom.rays_per_angle, 0u);
    }
    EXPECT_THROW(ct::angle_block_bounds(geom, 11), std::invalid_argument);
}

TEST(Phantom, BackgroundRangeAndSupport) {
    const Grid p = ct::shepp_logan(256);
    EXPECT_EQ(p(0, 0), 0.0);
    EXPECT_EQ(p(255, 255), 0.0);
    std::size_t nonzero = 0;
    for (double v : p.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        nonzero += v != 0.0;
    }
    const double frac = static_cast<double>(nonzero) / static_cast<double>(p.size());
    EXPECT_GT(frac, 0.3);
    EXPECT_LT(frac, 0.7);
    EXPECT_EQ(ct::shepp_logan(64), ct::shepp_logan(64));
    EXPECT_THROW(ct::shepp_logan(7), std::invalid_argument);
}

TEST(CoordinateFormat, RoundTripAndHeader) {
    const SparseMatrix a = ct::build_parallel_tomo(ct::default_geometry(8, 4));
    std::stringstream ss;
    a.write_coordinate(ss);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(a.nnz()));
    ss.seekg(0);
    const SparseMatrix b = SparseMatrix::read_coordinate(ss);
    ASSERT_EQ(a.nnz(), b.nnz());
    const auto ta = a.triplets();
    const auto tb = b.triplets();
    for (std::size_t k = 0; k < ta.size(); ++k) {
        EXPECT_EQ(ta[k].row, tb[k].row);
        EXPECT_EQ(ta[k].col, tb[k].col);
        EXPECT_EQ(ta[k].value, tb[k].value);  // 17 digits round-trip exactly
    }
}

TEST(CoordinateFormat, MalformedInputThrows) {
    std::stringstream truncated("2 2 3\n0 0 1.0\n1 1 2.0\n");
    EXPECT_THROW(SparseMatrix::read_coordinate(truncated), std::runtime_error);
    std::stringstream out_of_range("2 2 1\n5 0 1.0\n");
    EXPECT_THROW(SparseMatrix::read_coordinate(out_of_range), std::runtime_error);
    std::stringstream garbage("x y z\n");
    EXPECT_THROW(SparseMatrix::read_coordinate(garbage), std::runtime_error);
}

TEST(Noise, ZeroLevelLeavesDataUnchanged) {
    Gen gen(44);
    const Grid g = gen.grid(10, 3);
    const NoisyData nd = add_relative_gaussian_noise(g, 0.0, 5);
    EXPECT_EQ(nd.data, g);
    EXPECT_EQ(nd.delta_abs, 0.0);
}

TEST(Noise, RelativeLevelIsExact) {
    Gen gen(45);
    for (int t = 0; t < 20; ++t) {
        const Grid g = gen.grid(50, 4, 10.0);
        const double rel = gen.log_uniform(1e-4, 0.5);
        const NoisyData nd = add_relative_gaussian_noise(g, rel, 100 + t);
        EXPECT_NEAR(norm(nd.data - g) / norm(g), rel, 1e-12);
        EXPECT_NEAR(nd.delta_abs, rel * norm(g), 1e-12 * nd.delta_abs);
    }
}

TEST(Noise, SeedsDifferDeltaDoesNot) {
    Gen gen(46);
    const Grid g = gen.grid(30, 1);
    const NoisyData a = add_relative_gaussian_noise(g, 0.01, 1);
    const NoisyData b = add_relative_gaussian_noise(g, 0.01, 2);
    const NoisyData a2 = add_relative_gaussian_noise(g, 0.01, 1);
    EXPECT_NE(a.data, b.data);
    EXPECT_EQ(a.delta_abs, b.delta_abs);
    EXPECT_EQ(a.data, a2.data);
}

TEST(Noise, Errors) {
    EXPECT_THROW(add_relative_gaussian_noise(Grid(3, 1), 0.1, 1), std::invalid_argument);
    EXPECT_THROW(add_relative_gaussian_noise(Grid(3, 1, 1.0), -0.1, 1), std::invalid_argument);
}

TEST(Noise, StreamLooksStandardNormal) {
    NormalStream s(2024);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = s.next();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Noise, StreamFollowsDocumentedTransform) {
    // mt19937_64, u = (bits >> 11) 2^-53, Box-Muller with r = sqrt(-2 ln(1 - u1)), cos then sin
    std::mt19937_64 eng(77);
    NormalStream s(77);
    for (int k = 0; k < 10; ++k) {
        const double u1 = static_cast<double>(eng() >> 11) * 0x1p-53;
        const double u2 = static_cast<double>(eng() >> 11) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        EXPECT_EQ(s.next(), r * std::cos(2.0 * std::numbers::pi * u2));
        EXPECT_EQ(s.next(), r * std::sin(2.0 * std::numbers::pi * u2));
    }
}

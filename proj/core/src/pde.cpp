#include "lk/pde.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lk::pde {

namespace {

using EigenSparse = Eigen::SparseMatrix<double>;

void require_mesh_shape(const Mesh& mesh, const Grid& g, const char* what) {
    if (g.rows() != mesh.m || g.cols() != mesh.m) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(mesh.m) + "x" +
                                    std::to_string(mesh.m) + " grid, got " + shape_string(g));
    }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const Grid& g) {
    return {g.values().data(), static_cast<Eigen::Index>(g.size())};
}

}  // namespace

Mesh::Mesh(std::size_t m_, const ScalarField& source, ScalarField boundary)
    : m(m_), h(1.0 / static_cast<double>(m_ + 1)), g(std::move(boundary)) {
    if (m < 1) throw std::invalid_argument("Mesh: need at least one interior node");
    f = sample(source);
}

Grid Mesh::sample(const ScalarField& fn) const {
    Grid out(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) out(i, j) = fn(x(j), y(i));
    }
    return out;
}

SparseMatrix assemble(const Mesh& mesh, const Grid& c) {
    require_mesh_shape(mesh, c, "assemble");
    const std::size_t m = mesh.m;
    const double inv_h2 = 1.0 / (mesh.h * mesh.h);
    std::vector<Triplet> entries;
    entries.reserve(5 * m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t row = i * m + j;
            entries.push_back({row, row, 4.0 * inv_h2 + std::max(c(i, j), 0.0)});
            if (i > 0) entries.push_back({row, row - m, -inv_h2});
            if (i + 1 < m) entries.push_back({row, row + m, -inv_h2});
            if (j > 0) entries.push_back({row, row - 1, -inv_h2});
            if (j + 1 < m) entries.push_back({row, row + 1, -inv_h2});
        }
    }
    return SparseMatrix(m * m, m * m, std::move(entries));
}

Grid boundary_lift(const Mesh& mesh) {
    const std::size_t m = mesh.m;
    const double inv_h2 = 1.0 / (mesh.h * mesh.h);
    const double edge = static_cast<double>(m + 1) * mesh.h;  // == 1 up to rounding
    Grid lift(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        const double x = mesh.x(k);
        const double y = mesh.y(k);
        lift(0, k) += mesh.g(x, 0.0) * inv_h2;
        lift(m - 1, k) += mesh.g(x, edge) * inv_h2;
        lift(k, 0) += mesh.g(0.0, y) * inv_h2;
        lift(k, m - 1) += mesh.g(edge, y) * inv_h2;
    }
    return lift;
}

struct EllipticOperator::Impl {
    EigenSparse matrix;
    Eigen::SimplicialLLT<EigenSparse> factor;
    std::size_t m = 0;
};

EllipticOperator::EllipticOperator(const Mesh& mesh, const Grid& c) : impl_(std::make_unique<Impl>()) {
    const SparseMatrix a = assemble(mesh, c);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(a.nnz());
    for (const auto& t : a.triplets()) {
        entries.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
    }
    impl_->m = mesh.m;
    impl_->matrix.resize(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    impl_->matrix.setFromTriplets(entries.begin(), entries.end());
    impl_->factor.compute(impl_->matrix);
    if (impl_->factor.info() != Eigen::Success) {
        throw std::runtime_error("EllipticOperator: Cholesky factorization failed (matrix not positive definite)");
    }
}

EllipticOperator::~EllipticOperator() = default;
EllipticOperator::EllipticOperator(EllipticOperator&&) noexcept = default;
EllipticOperator& EllipticOperator::operator=(EllipticOperator&&) noexcept = default;

Grid EllipticOperator::solve(const Grid& rhs) const {
    const std::size_t m = impl_->m;
    if (rhs.size() != m * m) throw std::invalid_argument("EllipticOperator::solve: size mismatch");
    Eigen::VectorXd sol = impl_->factor.solve(as_vector(rhs));
    if (impl_->factor.info() != Eigen::Success) throw std::runtime_error("EllipticOperator: solve failed");
    return Grid(m, m, std::vector<double>(sol.data(), sol.data() + sol.size()));
}

Grid EllipticOperator::apply(const Grid& u) const {
    const std::size_t m = impl_->m;
    if (u.size() != m * m) throw std::invalid_argument("EllipticOperator::apply: size mismatch");
    Eigen::VectorXd out = impl_->matrix * as_vector(u);
    return Grid(m, m, std::vector<double>(out.data(), out.data() + out.size()));
}

Grid solve_state(const Grid& c, const Mesh& mesh) {
    const EllipticOperator op(mesh, c);
    return op.solve(mesh.f + boundary_lift(mesh));
}

PdeProblem::PdeProblem(Mesh mesh, Grid data) : mesh_(std::move(mesh)), data_(std::move(data)) {
    require_mesh_shape(mesh_, data_, "PdeProblem(data)");
}

void PdeProblem::prepare(const Grid& c) {
    require_mesh_shape(mesh_, c, "PdeProblem");
    if (op_ && c == cached_c_) return;
    op_ = std::make_unique<EllipticOperator>(mesh_, c);
    cached_u_ = op_->solve(mesh_.f + boundary_lift(mesh_));
    cached_c_ = c;
}

Grid PdeProblem::evaluate(std::size_t block, const Grid& c) {
    if (block != 0) throw std::out_of_range("PdeProblem: single block");
    prepare(c);
    return cached_u_;
}

const Grid& PdeProblem::data(std::size_t block) const {
    if (block != 0) throw std::out_of_range("PdeProblem: single block");
    return data_;
}

Grid PdeProblem::derivative_apply(std::size_t block, const Grid& c, const Grid& h) {
    if (block != 0) throw std::out_of_range("PdeProblem: single block");
    prepare(c);
    require_mesh_shape(mesh_, h, "PdeProblem::derivative_apply");
    Grid rhs = h;
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] *= cached_u_[k];
    Grid out = op_->solve(rhs);
    out *= -1.0;
    return out;
}

Grid PdeProblem::adjoint_apply(std::size_t block, const Grid& c, const Grid& w) {
    if (block != 0) throw std::out_of_range("PdeProblem: single block");
    prepare(c);
    require_mesh_shape(mesh_, w, "PdeProblem::adjoint_apply");
    Grid out = op_->solve(w);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= -cached_u_[k];
    return out;
}

double gaussian_source(double x, double y) {
    return 200.0 * std::exp(-10.0 * (x - 0.5) * (x - 0.5) - 10.0 * (y - 0.5) * (y - 0.5));
}

IdentificationSetup default_problem(std::size_t m) {
    Mesh mesh(m, gaussian_source, [](double, double) { return 1.0; });
    Grid c_true = mesh.sample([](double x, double y) {
        if (x >= 0.2 && x <= 0.45 && y >= 0.55 && y <= 0.8) return 1.0;
        const double dx = x - 0.65;
        const double dy = y - 0.35;
        if (dx * dx + dy * dy <= 0.15 * 0.15) return 2.0;
        return 0.0;
    });
    return {std::move(mesh), std::move(c_true)};
}

}  // namespace lk::pde

#include "lk/forward_problem.hpp"

#include <stdexcept>
#include <string>

namespace lk {

LinearProblem::LinearProblem(SparseMatrix a, std::size_t image_rows, std::size_t image_cols,
                             const Grid& data, std::vector<std::size_t> block_rows)
    : image_rows_(image_rows), image_cols_(image_cols) {
    if (a.cols() != image_rows * image_cols) {
        throw std::invalid_argument("LinearProblem: matrix has " + std::to_string(a.cols()) +
                                    " columns for a " + std::to_string(image_rows) + "x" +
                                    std::to_string(image_cols) + " image");
    }
    if (data.size() != a.rows()) {
        throw std::invalid_argument("LinearProblem: data length " + std::to_string(data.size()) +
                                    " does not match " + std::to_string(a.rows()) + " rows");
    }
    if (block_rows.size() < 2 || block_rows.front() != 0 || block_rows.back() != a.rows()) {
        throw std::invalid_argument("LinearProblem: block offsets must run from 0 to the row count");
    }
    for (std::size_t b = 0; b + 1 < block_rows.size(); ++b) {
        const std::size_t begin = block_rows[b];
        const std::size_t end = block_rows[b + 1];
        if (end <= begin) throw std::invalid_argument("LinearProblem: empty or decreasing block");
        blocks_.push_back(a.row_block(begin, end));
        data_.push_back(Grid::column(std::vector<double>(data.storage().begin() + begin,
                                                         data.storage().begin() + end)));
    }
}

LinearProblem::LinearProblem(SparseMatrix a, std::size_t image_rows, std::size_t image_cols,
                             const Grid& data)
    : LinearProblem(a, image_rows, image_cols, data, {0, a.rows()}) {}

Grid LinearProblem::evaluate(std::size_t block, const Grid& x) {
    const SparseMatrix& a = blocks_.at(block);
    return Grid::column(a.apply(x.values()));
}

Grid LinearProblem::derivative_apply(std::size_t block, const Grid& /*x*/, const Grid& h) {
    return Grid::column(blocks_.at(block).apply(h.values()));
}

Grid LinearProblem::adjoint_apply(std::size_t block, const Grid& /*x*/, const Grid& w) {
    return Grid(image_rows_, image_cols_, blocks_.at(block).apply_adjoint(w.values()));
}

}  // namespace lk

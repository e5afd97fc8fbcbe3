#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "addmar/errors.hpp"

namespace addmar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Ordered sequence of T matrix observations sharing one shape d1 x d2.
// Index 0 is the earliest observation; transitions are t-1 -> t for t = 1..T-1.
struct MatrixSeries {
    std::vector<Matrix> data;

    Index size() const { return static_cast<Index>(data.size()); }   // T
    Index rows() const { return data.empty() ? 0 : data.front().rows(); }  // d1
    Index cols() const { return data.empty() ? 0 : data.front().cols(); }  // d2
    Index pairs() const { return size() - 1; }  // N = T - 1 transition pairs

    // First t observations, e.g. the training window of a rolling backtest.
    MatrixSeries prefix(Index t) const {
        if (t < 0 || t > size()) throw std::invalid_argument("prefix length out of range");
        return MatrixSeries{std::vector<Matrix>(data.begin(), data.begin() + t)};
    }
};

inline void validate(const MatrixSeries& series) {
    if (series.size() < 2) throw DimensionError("series needs at least 2 observations");
    const Index d1 = series.rows(), d2 = series.cols();
    if (d1 < 1 || d2 < 1) throw DimensionError("series observations must be non-empty matrices");
    for (const Matrix& y : series.data) {
        if (y.rows() != d1 || y.cols() != d2)
            throw DimensionError("series observations disagree in shape");
        if (!y.allFinite()) throw NumericError("series contains non-finite values");
    }
}

// Additive transition blocks: the row map A = L1 + S1 (d1 x d1) acts on variables,
// the column map B = L2 + S2 (d2 x d2) acts on entities,
//   Y_t = A Y_{t-1} + Y_{t-1} B^T + E_t.
struct AdditiveMarParams {
    Matrix L1, S1;  // d1 x d1
    Matrix L2, S2;  // d2 x d2

    static AdditiveMarParams Zero(Index d1, Index d2) {
        return {Matrix::Zero(d1, d1), Matrix::Zero(d1, d1),
                Matrix::Zero(d2, d2), Matrix::Zero(d2, d2)};
    }

    Matrix row_map() const { return L1 + S1; }
    Matrix col_map() const { return L2 + S2; }
};

inline void check_square(const Matrix& m, Index d, const std::string& name) {
    if (m.rows() != d || m.cols() != d)
        throw DimensionError(name + " must be " + std::to_string(d) + "x" + std::to_string(d));
}

inline void check_shapes(const MatrixSeries& series, const AdditiveMarParams& params) {
    check_square(params.L1, series.rows(), "L1");
    check_square(params.S1, series.rows(), "S1");
    check_square(params.L2, series.cols(), "L2");
    check_square(params.S2, series.cols(), "S2");
}

// Non-negative regularization weights: nuclear norms on L blocks, l1 on S blocks.
struct Penalties {
    double lambda_l1 = 0.0;
    double lambda_s1 = 0.0;
    double lambda_l2 = 0.0;
    double lambda_s2 = 0.0;

    double sum() const { return lambda_l1 + lambda_s1 + lambda_l2 + lambda_s2; }
};

inline void validate(const Penalties& pen) {
    for (double v : {pen.lambda_l1, pen.lambda_s1, pen.lambda_l2, pen.lambda_s2})
        if (!(v >= 0.0)) throw std::invalid_argument("penalties must be non-negative");
}

// Fixed gradient step lengths 1/L for the row-side and column-side blocks.
struct StepSizes {
    double eta_row = 0.0;
    double eta_col = 0.0;
};

}  // namespace addmar

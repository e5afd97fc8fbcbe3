#pragma once

// Loss, gradients and curvature bounds of the additive matrix autoregression
//   Y_t = (L1 + S1) Y_{t-1} + Y_{t-1} (L2 + S2)^T + E_t.
// Everything is normalized by the number of transition pairs N = T - 1; index 0
// enters only as a regressor.

#include <vector>

#include "addmar/linalg.hpp"
#include "addmar/types.hpp"

namespace addmar {

// One-step residuals R_t = Y_t - A Y_{t-1} - Y_{t-1} B^T for t = 1..T-1.
inline std::vector<Matrix> residuals(const MatrixSeries& series, const AdditiveMarParams& params) {
    validate(series);
    check_shapes(series, params);
    const Matrix a = params.row_map();
    const Matrix b_t = params.col_map().transpose();
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(series.pairs()));
    for (Index t = 1; t < series.size(); ++t) {
        const Matrix& y = series.data[static_cast<std::size_t>(t)];
        const Matrix& x = series.data[static_cast<std::size_t>(t - 1)];
        out.push_back(y - a * x - x * b_t);
    }
    return out;
}

// (1 / 2N) sum_t ||R_t||_F^2.
inline double smooth_loss(const MatrixSeries& series, const AdditiveMarParams& params) {
    double acc = 0.0;
    for (const Matrix& r : residuals(series, params)) acc += r.squaredNorm();
    return acc / (2.0 * static_cast<double>(series.pairs()));
}

// smooth_loss plus nuclear penalties on the L blocks and l1 penalties on the S blocks.
inline double objective(const MatrixSeries& series, const AdditiveMarParams& params,
                        const Penalties& pen) {
    validate(pen);
    double f = smooth_loss(series, params);
    if (pen.lambda_l1 > 0.0) f += pen.lambda_l1 * nuclear_norm(params.L1);
    if (pen.lambda_s1 > 0.0) f += pen.lambda_s1 * l1_norm(params.S1);
    if (pen.lambda_l2 > 0.0) f += pen.lambda_l2 * nuclear_norm(params.L2);
    if (pen.lambda_s2 > 0.0) f += pen.lambda_s2 * l1_norm(params.S2);
    return f;
}

// Gradient of smooth_loss in the row map A = L1 + S1; identical for both blocks.
inline Matrix grad_row(const MatrixSeries& series, const AdditiveMarParams& params) {
    Matrix g = Matrix::Zero(series.rows(), series.rows());
    const auto res = residuals(series, params);
    for (Index t = 1; t < series.size(); ++t)
        g.noalias() -= res[static_cast<std::size_t>(t - 1)] *
                       series.data[static_cast<std::size_t>(t - 1)].transpose();
    return g / static_cast<double>(series.pairs());
}

// Gradient in the column map B = L2 + S2.
inline Matrix grad_col(const MatrixSeries& series, const AdditiveMarParams& params) {
    Matrix g = Matrix::Zero(series.cols(), series.cols());
    const auto res = residuals(series, params);
    for (Index t = 1; t < series.size(); ++t)
        g.noalias() -= res[static_cast<std::size_t>(t - 1)].transpose() *
                       series.data[static_cast<std::size_t>(t - 1)];
    return g / static_cast<double>(series.pairs());
}

namespace detail {

// (1/N) sum_{t<T-1} Y_t Y_t^T: curvature of the row-side quadratic.
inline Matrix gram_row(const MatrixSeries& series) {
    Matrix g = Matrix::Zero(series.rows(), series.rows());
    for (Index t = 0; t + 1 < series.size(); ++t) {
        const Matrix& y = series.data[static_cast<std::size_t>(t)];
        g.noalias() += y * y.transpose();
    }
    return g / static_cast<double>(series.pairs());
}

inline Matrix gram_col(const MatrixSeries& series) {
    Matrix g = Matrix::Zero(series.cols(), series.cols());
    for (Index t = 0; t + 1 < series.size(); ++t) {
        const Matrix& y = series.data[static_cast<std::size_t>(t)];
        g.noalias() += y.transpose() * y;
    }
    return g / static_cast<double>(series.pairs());
}

}  // namespace detail

// Fixed steps 1/L with L the largest eigenvalue of the corresponding Gram matrix.
inline StepSizes step_sizes(const MatrixSeries& series) {
    validate(series);
    const double lip_row = spectral_max(detail::gram_row(series));
    const double lip_col = spectral_max(detail::gram_col(series));
    if (lip_row <= 0.0 || lip_col <= 0.0)
        throw DegenerateDataError("regressor history is identically zero");
    return StepSizes{1.0 / lip_row, 1.0 / lip_col};
}

}  // namespace addmar

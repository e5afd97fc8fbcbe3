#pragma once

// Estimation-quality metrics (relative error, support sensitivity and
// specificity) and noise-free h-step forecasting.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "addmar/errors.hpp"
#include "addmar/solver.hpp"
#include "addmar/types.hpp"

namespace addmar {

enum class ErrorMode { lowrank, sparse, both };

// Squared Frobenius estimation error over the blocks selected by `mode`,
// normalized by the truth's squared Frobenius norm over the same blocks.
inline double relative_error(const AdditiveMarParams& est, const AdditiveMarParams& truth,
                             ErrorMode mode) {
    if (est.L1.rows() != truth.L1.rows() || est.L2.rows() != truth.L2.rows())
        throw DimensionError("relative_error: estimate and truth shapes differ");

    double num = 0.0, den = 0.0;
    const bool with_lowrank = mode != ErrorMode::sparse;
    const bool with_sparse = mode != ErrorMode::lowrank;
    if (with_lowrank) {
        num += (est.L1 - truth.L1).squaredNorm() + (est.L2 - truth.L2).squaredNorm();
        den += truth.L1.squaredNorm() + truth.L2.squaredNorm();
    }
    if (with_sparse) {
        num += (est.S1 - truth.S1).squaredNorm() + (est.S2 - truth.S2).squaredNorm();
        den += truth.S1.squaredNorm() + truth.S2.squaredNorm();
    }
    if (!(den > 0.0))
        throw std::invalid_argument("relative_error: truth has zero norm in this mode");
    return num / den;
}

struct SupportMetrics {
    std::optional<double> sn;  // true-positive rate; absent when truth has no nonzeros
    std::optional<double> sp;  // true-negative rate; absent when truth has no zeros
};

// Support recovery of a sparse block: the estimate counts as nonzero above
// `zero_tol`, the truth by exact comparison with zero.
inline SupportMetrics support_metrics(const Matrix& est, const Matrix& truth,
                                      double zero_tol) {
    if (est.rows() != truth.rows() || est.cols() != truth.cols())
        throw DimensionError("support_metrics: shapes differ");
    if (!(zero_tol >= 0.0))
        throw std::invalid_argument("support_metrics: zero_tol must be >= 0");

    Index tp = 0, fn = 0, tn = 0, fp = 0;
    for (Index j = 0; j < truth.cols(); ++j) {
        for (Index i = 0; i < truth.rows(); ++i) {
            const bool on_est = std::abs(est(i, j)) > zero_tol;
            if (truth(i, j) != 0.0)
                (on_est ? tp : fn)++;
            else
                (on_est ? fp : tn)++;
        }
    }

    SupportMetrics out;
    if (tp + fn > 0) out.sn = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0) out.sp = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return out;
}

// Noise-free h-step-ahead forecast: h applications of the transition map.
inline Matrix forecast(const AdditiveMarParams& params, const Matrix& y_last, Index h) {
    if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    check_square(params.L1, y_last.rows(), "forecast: L1");
    check_square(params.S1, y_last.rows(), "forecast: S1");
    check_square(params.L2, y_last.cols(), "forecast: L2");
    check_square(params.S2, y_last.cols(), "forecast: S2");

    const Matrix a = params.row_map();
    const Matrix bt = params.col_map().transpose();
    Matrix y = y_last;
    for (Index k = 0; k < h; ++k) y = a * y + y * bt;
    return y;
}

struct MetricsReport {
    double re = 0.0;  // composite relative error over all four blocks
    std::optional<double> sn_s1, sp_s1, sn_s2, sp_s2;
    Index rank_l1_hat = 0;
    Index rank_l2_hat = 0;
};

inline MetricsReport evaluate(const AdditiveMarParams& est, const AdditiveMarParams& truth,
                              double zero_tol) {
    MetricsReport out;
    out.re = relative_error(est, truth, ErrorMode::both);
    const SupportMetrics m1 = support_metrics(est.S1, truth.S1, zero_tol);
    const SupportMetrics m2 = support_metrics(est.S2, truth.S2, zero_tol);
    out.sn_s1 = m1.sn;
    out.sp_s1 = m1.sp;
    out.sn_s2 = m2.sn;
    out.sp_s2 = m2.sp;
    out.rank_l1_hat = estimate_rank(est.L1);
    out.rank_l2_hat = estimate_rank(est.L2);
    return out;
}

}  // namespace addmar

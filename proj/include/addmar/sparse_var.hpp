#pragma once

// Lasso-penalized VAR(1) on the vectorized series: the comparison baseline
// for backtests, plus the exact embedding of the additive model into its
// transition space.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "addmar/errors.hpp"
#include "addmar/linalg.hpp"
#include "addmar/prox.hpp"
#include "addmar/solver.hpp"
#include "addmar/types.hpp"

namespace addmar {

struct SparseVarModel {
    Matrix transition;  // (d1 d2) x (d1 d2)
    double lambda = 0.0;
};

namespace detail {

// Canonical quadratic of the vectorized regression: with w_t = vec(Y_{t-1})
// and z_t = vec(Y_t), the loss (1/2N) sum ||z_t - Phi w_t||^2 expands to
// z0 - <Phi, H> + (1/2) tr(Phi G Phi^T).
inline QuadForm svar_quadform(const MatrixSeries& series) {
    const Index D = series.rows() * series.cols();
    const double n = static_cast<double>(series.pairs());
    QuadForm qf;
    qf.g = Matrix::Zero(D, D);
    qf.h = Matrix::Zero(D, D);
    for (Index t = 1; t < series.size(); ++t) {
        const Vector w = vec(series.data[static_cast<std::size_t>(t - 1)]);
        const Vector z = vec(series.data[static_cast<std::size_t>(t)]);
        qf.g.noalias() += w * w.transpose();
        qf.h.noalias() += z * w.transpose();
        qf.z0 += z.squaredNorm();
    }
    qf.g /= n;
    qf.h /= n;
    qf.z0 /= 2.0 * n;
    qf.lipschitz = spectral_max(qf.g);
    return qf;
}

}  // namespace detail

inline SparseVarModel fit_sparse_var(const MatrixSeries& series, double lambda,
                                     const SolverConfig& cfg,
                                     std::vector<double>* trace = nullptr) {
    validate(series);
    validate(cfg);
    if (!(lambda >= 0.0))
        throw std::invalid_argument("fit_sparse_var: lambda must be >= 0");

    const detail::QuadForm qf = detail::svar_quadform(series);
    if (!(qf.lipschitz > 0.0))
        throw DegenerateDataError("fit_sparse_var: series carries no signal");

    const detail::ProxFn prox = [](const Matrix& x, double tau) {
        Matrix out = soft_threshold(x, tau);
        const double pen = l1_norm(out);
        return detail::ProxOut{std::move(out), pen};
    };
    const Index D = series.rows() * series.cols();
    const detail::InnerResult res =
        detail::prox_gradient(qf, lambda, prox, Matrix::Zero(D, D), cfg.inner_tol,
                              cfg.inner_max_iters, cfg.use_acceleration, trace);
    return {res.x, lambda};
}

inline Matrix forecast_svar(const SparseVarModel& model, const Matrix& y_last, Index h) {
    if (h < 1) throw std::invalid_argument("forecast_svar: horizon must be >= 1");
    const Index D = y_last.rows() * y_last.cols();
    check_square(model.transition, D, "forecast_svar: transition");

    Vector v = vec(y_last);
    for (Index k = 0; k < h; ++k) v = model.transition * v;
    return unvec(v, y_last.rows(), y_last.cols());
}

// The additive model is a structured point of the VAR transition space:
// vec(A Y + Y B^T) = (I (x) A + B (x) I) vec(Y) under column stacking.
inline Matrix mar_to_var_transition(const AdditiveMarParams& params) {
    const Index d1 = params.L1.rows();
    const Index d2 = params.L2.rows();
    return kron(Matrix::Identity(d2, d2), params.row_map()) +
           kron(params.col_map(), Matrix::Identity(d1, d1));
}

// Same AIC form as the additive model with complexity 2 nnz(Phi); a vanishing
// RSS returns the large negative sentinel.
inline double svar_aic(const MatrixSeries& series, const SparseVarModel& model) {
    validate(series);
    const Index D = series.rows() * series.cols();
    check_square(model.transition, D, "svar_aic: transition");

    double rss = 0.0;
    for (Index t = 1; t < series.size(); ++t) {
        const Vector w = vec(series.data[static_cast<std::size_t>(t - 1)]);
        const Vector z = vec(series.data[static_cast<std::size_t>(t)]);
        rss += (z - model.transition * w).squaredNorm();
    }
    rss /= 2.0 * static_cast<double>(series.pairs());

    const Index nnz =
        detail::count_above(model.transition, density_zero_tol(model.transition));
    bool degenerate = false;
    return detail::aic_value(rss, series.pairs(), 0, 0, nnz, 0, degenerate);
}

// Fits every weight in the ascending list and keeps the AIC minimizer; ties
// prefer the larger weight (the sparser transition).
inline SparseVarModel fit_sparse_var_aic(const MatrixSeries& series,
                                         const std::vector<double>& lambdas,
                                         const SolverConfig& cfg) {
    if (lambdas.empty())
        throw std::invalid_argument("fit_sparse_var_aic: weight list must be nonempty");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] >= 0.0) || !std::isfinite(lambdas[k]))
            throw std::invalid_argument(
                "fit_sparse_var_aic: weights must be finite and >= 0");
        if (k > 0 && lambdas[k] < lambdas[k - 1])
            throw std::invalid_argument("fit_sparse_var_aic: weights must be ascending");
    }

    SparseVarModel best;
    double best_score = 0.0;
    bool have = false;
    for (double lam : lambdas) {
        SparseVarModel m = fit_sparse_var(series, lam, cfg);
        const double score = svar_aic(series, m);
        if (!have || score < best_score ||
            (score == best_score && m.lambda > best.lambda)) {
            have = true;
            best = std::move(m);
            best_score = score;
        }
    }
    return best;
}

}  // namespace addmar

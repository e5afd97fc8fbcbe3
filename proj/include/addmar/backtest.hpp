#pragma once

// Rolling-origin backtesting: refit on each growing prefix, forecast h steps
// ahead, and aggregate the squared Frobenius forecast errors into one RMSE.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "addmar/errors.hpp"
#include "addmar/metrics.hpp"
#include "addmar/selection.hpp"
#include "addmar/sparse_var.hpp"
#include "addmar/types.hpp"

namespace addmar {

enum class ForecastModel { additive_mar, sparse_var };

struct BacktestReport {
    Index horizon = 0;
    double rmse = 0.0;
    Index n_origins = 0;
};

struct BacktestTuner {
    LambdaGrid grid;
    Criterion criterion = Criterion::aic();

    // Off by default: weights are selected once on the first origin's prefix
    // and held fixed, which keeps the cost at one grid sweep per backtest.
    bool retune_each_origin = false;
};

// Evaluates h-step-ahead forecasts from every origin prefix of length
// T - window .. T - h.  A prefix the model cannot be fit on (an all-zero
// stretch of data) falls back to the zero model: the only model that fits
// such a prefix exactly.  The sparse VAR baseline draws its weight list from
// the tuner grid's lambda_s1 and tunes by its AIC.
inline BacktestReport rolling_backtest(const MatrixSeries& series, Index h,
                                       const BacktestTuner& tuner, const SolverConfig& cfg,
                                       ForecastModel model, Index window = 10) {
    validate(series);
    validate(tuner.grid);
    validate(cfg);
    if (window < 1) throw std::invalid_argument("rolling_backtest: window must be >= 1");
    if (h < 1 || h > window)
        throw std::invalid_argument("rolling_backtest: horizon must lie in [1, window]");
    if (series.size() <= window + h)
        throw std::invalid_argument("rolling_backtest: series must be longer than window + h");

    const Index T = series.size();
    const double cells = static_cast<double>(series.rows() * series.cols());

    BacktestReport out;
    out.horizon = h;
    out.n_origins = window - h + 1;

    std::optional<Penalties> tuned_pen;      // additive model
    std::optional<double> tuned_lambda;      // sparse VAR
    double acc = 0.0;
    for (Index n = T - window; n <= T - h; ++n) {
        const MatrixSeries prefix = series.prefix(n);
        const Matrix& y_last = series.data[static_cast<std::size_t>(n - 1)];
        const Matrix& target = series.data[static_cast<std::size_t>(n - 1 + h)];

        Matrix predicted;
        if (model == ForecastModel::additive_mar) {
            std::optional<AdditiveMarParams> params;
            try {
                if (tuner.retune_each_origin || !tuned_pen) {
                    GridSearchResult res =
                        grid_search(prefix, tuner.grid, cfg, tuner.criterion);
                    tuned_pen = res.penalties;
                    params = std::move(res.report.params);
                } else {
                    params = fit(prefix, *tuned_pen, cfg).params;
                }
            } catch (const DegenerateDataError&) {
                params = AdditiveMarParams::Zero(series.rows(), series.cols());
            }
            predicted = forecast(*params, y_last, h);
        } else {
            std::optional<SparseVarModel> svar;
            try {
                if (tuner.retune_each_origin || !tuned_lambda) {
                    svar = fit_sparse_var_aic(prefix, tuner.grid.lambda_s1, cfg);
                    tuned_lambda = svar->lambda;
                } else {
                    svar = fit_sparse_var(prefix, *tuned_lambda, cfg);
                }
            } catch (const DegenerateDataError&) {
                const Index D = series.rows() * series.cols();
                svar = SparseVarModel{Matrix::Zero(D, D), 0.0};
            }
            predicted = forecast_svar(*svar, y_last, h);
        }

        acc += (target - predicted).squaredNorm() / cells;
    }

    out.rmse = std::sqrt(acc / static_cast<double>(out.n_origins));
    return out;
}

}  // namespace addmar

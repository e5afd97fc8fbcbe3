#pragma once

// Alternating block minimization for the penalized additive autoregression
//
//   min over (L1, S1, L2, S2) of  smooth_loss  +  lambda_l1 ||L1||_*
//        + lambda_s1 ||S1||_1 + lambda_l2 ||L2||_* + lambda_s2 ||S2||_1.
//
// The problem is jointly convex and the penalty is separable across blocks, so
// cyclic exact block minimization converges to a global optimum. Each block
// subproblem reduces to a quadratic in canonical form
//
//   q(X) = z0 - <X, H> + 0.5 tr(X G X^T),    grad q = X G - H,
//
// whose data-dependent pieces (G, H, z0) are assembled once per block update;
// inner proximal-gradient iterations then cost O(d^3) independent of T.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "addmar/model.hpp"
#include "addmar/prox.hpp"

namespace addmar {

enum class Block { L1, S1, L2, S2 };

struct SolverConfig {
    double outer_tol = 1e-6;   // relative objective-change stop across sweeps
    int outer_max_iters = 200;
    double inner_tol = 1e-8;   // relative block-objective-change stop
    int inner_max_iters = 500;
    bool use_acceleration = true;
    std::optional<AdditiveMarParams> init;  // zeros when absent
    std::array<Block, 4> block_order = {Block::L1, Block::S1, Block::L2, Block::S2};
};

inline void validate(const SolverConfig& cfg) {
    if (!(cfg.outer_tol > 0.0) || !(cfg.inner_tol > 0.0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (cfg.outer_max_iters < 1 || cfg.inner_max_iters < 1)
        throw std::invalid_argument("solver iteration caps must be at least 1");
    int seen[4] = {0, 0, 0, 0};
    for (Block b : cfg.block_order) ++seen[static_cast<int>(b)];
    for (int c : seen)
        if (c != 1) throw std::invalid_argument("block_order must visit each block once");
}

struct FitReport {
    AdditiveMarParams params;
    std::vector<double> objective_trace;  // one entry per outer sweep
    int outer_iters = 0;
    bool converged = false;
    int est_rank_l1 = 0, est_rank_l2 = 0;
    double est_density_s1 = 0.0, est_density_s2 = 0.0;
    double aic = 0.0;
    bool aic_degenerate = false;  // RSS underflowed the log; aic is a sentinel
};

// Count of singular values above the numerical cutoff.
inline int estimate_rank(const Matrix& m) {
    const Vector sv = singular_values(m);
    if (sv.size() == 0) return 0;
    const double cut = rank_cutoff(sv(0), m.rows(), m.cols());
    int r = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++r;
    return r;
}

// Tolerance below which a fitted sparse entry counts as zero.
inline double density_zero_tol(const Matrix& s) { return 1e-6 * std::max(1.0, max_abs(s)); }

inline double estimate_density(const Matrix& m, double zero_tol) {
    if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero_tol must be >= 0");
    if (m.size() == 0) return 0.0;
    Index nz = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > zero_tol) ++nz;
    return static_cast<double>(nz) / static_cast<double>(m.size());
}

namespace detail {

struct QuadForm {
    Matrix g;        // k x k PSD curvature
    Matrix h;        // m x k cross term
    double z0 = 0.0;
    double lipschitz = 0.0;

    double value(const Matrix& x) const {
        return z0 - x.cwiseProduct(h).sum() + 0.5 * (x * g).cwiseProduct(x).sum();
    }
    Matrix grad(const Matrix& x) const { return x * g - h; }
};

struct ProxOut {
    Matrix x;
    double penalty;  // unweighted penalty value at x
};
using ProxFn = std::function<ProxOut(const Matrix&, double)>;

struct InnerResult {
    Matrix x;
    double objective = 0.0;
    int iters = 0;
};

// Monotone FISTA on q(X) + lambda * pen(X). The prox functor returns the penalty
// value of its output, so objective tracking costs nothing extra; pen(x0) is
// obtained from a tau = 0 prox call.
inline InnerResult prox_gradient(const QuadForm& qf, double lambda, const ProxFn& prox,
                                 const Matrix& x0, double tol, int max_iters,
                                 bool accelerate, std::vector<double>* trace = nullptr) {
    if (!(qf.lipschitz > 0.0))
        throw DegenerateDataError("block curvature is zero; regressors carry no signal");
    const double eta = 1.0 / qf.lipschitz;

    Matrix x = x0;
    double fx = qf.value(x) + lambda * prox(x, 0.0).penalty;
    Matrix y = x;
    double t = 1.0;
    InnerResult out;
    for (int k = 0; k < max_iters; ++k) {
        out.iters = k + 1;
        const ProxOut pr = prox(y - eta * qf.grad(y), eta * lambda);
        const double fz = qf.value(pr.x) + lambda * pr.penalty;
        if (!std::isfinite(fz)) throw NumericError("block objective diverged");

        const double f_old = fx;
        const Matrix x_old = x;
        const bool accepted = fz <= fx;
        if (accepted) {
            x = pr.x;
            fx = fz;
        }
        if (!accelerate) {
            y = x;
        } else if (!accepted) {
            // Momentum overshot; restart it so the next step is plain descent.
            t = 1.0;
            y = x;
        } else {
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x + (t / t_new) * (pr.x - x) + ((t - 1.0) / t_new) * (x - x_old);
            t = t_new;
        }
        if (trace) trace->push_back(fx);
        // Rejected steps make no progress by construction; only an accepted step
        // with a negligible improvement signals convergence.
        if (accepted && std::abs(f_old - fx) <= tol * (1.0 + std::abs(f_old))) break;
    }
    out.x = std::move(x);
    out.objective = fx;
    return out;
}

// Assemble the canonical quadratic of one block, holding the other three fixed.
inline QuadForm block_subproblem(Block block, const MatrixSeries& series,
                                 const AdditiveMarParams& params, const Matrix& gram_r,
                                 const Matrix& gram_c, double lip_r, double lip_c) {
    const bool row_side = (block == Block::L1 || block == Block::S1);
    const double n = static_cast<double>(series.pairs());
    QuadForm qf;
    if (row_side) {
        const Matrix& other = (block == Block::L1) ? params.S1 : params.L1;
        const Matrix bt = params.col_map().transpose();
        qf.h = Matrix::Zero(series.rows(), series.rows());
        for (Index t = 1; t < series.size(); ++t) {
            const Matrix& yt = series.data[static_cast<std::size_t>(t)];
            const Matrix& xt = series.data[static_cast<std::size_t>(t - 1)];
            const Matrix z = yt - other * xt - xt * bt;
            qf.h.noalias() += z * xt.transpose();
            qf.z0 += z.squaredNorm();
        }
        qf.g = gram_r;
        qf.lipschitz = lip_r;
    } else {
        const Matrix& other = (block == Block::L2) ? params.S2 : params.L2;
        const Matrix a = params.row_map();
        const Matrix ot = other.transpose();
        qf.h = Matrix::Zero(series.cols(), series.cols());
        for (Index t = 1; t < series.size(); ++t) {
            const Matrix& yt = series.data[static_cast<std::size_t>(t)];
            const Matrix& xt = series.data[static_cast<std::size_t>(t - 1)];
            const Matrix z = yt - a * xt - xt * ot;
            qf.h.noalias() += z.transpose() * xt;
            qf.z0 += z.squaredNorm();
        }
        qf.g = gram_c;
        qf.lipschitz = lip_c;
    }
    qf.h /= n;
    qf.z0 /= 2.0 * n;
    return qf;
}

inline double block_lambda(Block block, const Penalties& pen) {
    switch (block) {
        case Block::L1: return pen.lambda_l1;
        case Block::S1: return pen.lambda_s1;
        case Block::L2: return pen.lambda_l2;
        case Block::S2: return pen.lambda_s2;
    }
    return 0.0;
}

inline ProxFn block_prox(Block block) {
    if (block == Block::L1 || block == Block::L2)
        return [](const Matrix& v, double tau) -> ProxOut {
            SvtResult r = singular_value_threshold(v, tau);
            return {std::move(r.matrix), r.nuclear_norm};
        };
    return [](const Matrix& v, double tau) -> ProxOut {
        Matrix x = soft_threshold(v, tau);
        const double pen = l1_norm(x);
        return {std::move(x), pen};
    };
}

inline Matrix& block_ref(AdditiveMarParams& p, Block block) {
    switch (block) {
        case Block::L1: return p.L1;
        case Block::S1: return p.S1;
        case Block::L2: return p.L2;
        case Block::S2: return p.S2;
    }
    return p.L1;  // unreachable
}

// AIC = N log(RSS / N) + 2 rank(L1) + 2 rank(L2) + 2 k1 + 2 k2 with RSS the
// (1/2N)-normalized smooth loss kept verbatim. RSS underflow returns a large
// negative sentinel and sets `degenerate`.
inline double aic_value(double rss, Index n_pairs, int rank_l1, int rank_l2, Index k1,
                        Index k2, bool& degenerate) {
    degenerate = !(rss > 1e-300);
    if (degenerate) return -1e300;
    const double n = static_cast<double>(n_pairs);
    return n * std::log(rss / n) +
           2.0 * static_cast<double>(rank_l1 + rank_l2) +
           2.0 * static_cast<double>(k1 + k2);
}

inline Index count_above(const Matrix& m, double tol) {
    Index nz = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > tol) ++nz;
    return nz;
}

}  // namespace detail

// Minimize the full objective in one block, the other three held fixed.
// The returned block never increases the objective relative to its input value.
inline Matrix solve_block(Block block, const MatrixSeries& series,
                          const AdditiveMarParams& params, const Penalties& pen,
                          const SolverConfig& cfg = {}) {
    validate(series);
    check_shapes(series, params);
    validate(pen);
    validate(cfg);
    const Matrix gram_r = detail::gram_row(series);
    const Matrix gram_c = detail::gram_col(series);
    const double lip_r = spectral_max(gram_r);
    const double lip_c = spectral_max(gram_c);
    if (lip_r <= 0.0 || lip_c <= 0.0)
        throw DegenerateDataError("regressor history is identically zero");

    const detail::QuadForm qf =
        detail::block_subproblem(block, series, params, gram_r, gram_c, lip_r, lip_c);
    AdditiveMarParams tmp = params;
    return detail::prox_gradient(qf, detail::block_lambda(block, pen),
                                 detail::block_prox(block), detail::block_ref(tmp, block),
                                 cfg.inner_tol, cfg.inner_max_iters, cfg.use_acceleration)
        .x;
}

// Full alternating fit. Sweeps the blocks in cfg.block_order until the relative
// objective change drops below outer_tol or the sweep cap is reached.
inline FitReport fit(const MatrixSeries& series, const Penalties& pen,
                     const SolverConfig& cfg = {}) {
    validate(series);
    validate(pen);
    validate(cfg);

    FitReport report;
    if (cfg.init) {
        check_shapes(series, *cfg.init);
        report.params = *cfg.init;
    } else {
        report.params = AdditiveMarParams::Zero(series.rows(), series.cols());
    }

    const Matrix gram_r = detail::gram_row(series);
    const Matrix gram_c = detail::gram_col(series);
    const double lip_r = spectral_max(gram_r);
    const double lip_c = spectral_max(gram_c);
    if (lip_r <= 0.0 || lip_c <= 0.0)
        throw DegenerateDataError("regressor history is identically zero");

    double f = objective(series, report.params, pen);
    for (int sweep = 0; sweep < cfg.outer_max_iters; ++sweep) {
        for (Block b : cfg.block_order) {
            const detail::QuadForm qf = detail::block_subproblem(
                b, series, report.params, gram_r, gram_c, lip_r, lip_c);
            detail::block_ref(report.params, b) =
                detail::prox_gradient(qf, detail::block_lambda(b, pen), detail::block_prox(b),
                                      detail::block_ref(report.params, b), cfg.inner_tol,
                                      cfg.inner_max_iters, cfg.use_acceleration)
                    .x;
        }
        const double f_new = objective(series, report.params, pen);
        if (!std::isfinite(f_new)) throw NumericError("fit objective diverged");
        report.objective_trace.push_back(f_new);
        report.outer_iters = sweep + 1;
        if (std::abs(f - f_new) <= cfg.outer_tol * (1.0 + std::abs(f))) {
            report.converged = true;
            break;
        }
        f = f_new;
    }

    report.est_rank_l1 = estimate_rank(report.params.L1);
    report.est_rank_l2 = estimate_rank(report.params.L2);
    const double tol_s1 = density_zero_tol(report.params.S1);
    const double tol_s2 = density_zero_tol(report.params.S2);
    report.est_density_s1 = estimate_density(report.params.S1, tol_s1);
    report.est_density_s2 = estimate_density(report.params.S2, tol_s2);
    report.aic = detail::aic_value(smooth_loss(series, report.params), series.pairs(),
                                   report.est_rank_l1, report.est_rank_l2,
                                   detail::count_above(report.params.S1, tol_s1),
                                   detail::count_above(report.params.S2, tol_s2),
                                   report.aic_degenerate);
    return report;
}

}  // namespace addmar

#pragma once

// Penalty-weight selection: AIC and the grid search with its oracle-tuning
// modes for simulation studies.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "addmar/errors.hpp"
#include "addmar/metrics.hpp"
#include "addmar/model.hpp"
#include "addmar/solver.hpp"
#include "addmar/types.hpp"

namespace addmar {

// ---------------------------------------------------------------------------
// Candidate grids
// ---------------------------------------------------------------------------

struct LambdaGrid {
    enum class Mode { full_cross, coupled_pairs };

    std::vector<double> lambda_l1;
    std::vector<double> lambda_s1;
    std::vector<double> lambda_l2;
    std::vector<double> lambda_s2;

    // coupled_pairs walks the two nuclear lists in lockstep and the two l1
    // lists in lockstep, crossing only the (nuclear, sparse) index pair; this
    // keeps the search quadratic instead of quartic.
    Mode mode = Mode::coupled_pairs;

    std::vector<Penalties> candidates() const;
};

inline void validate(const LambdaGrid& grid) {
    auto check_list = [](const std::vector<double>& v, const char* name) {
        if (v.empty())
            throw std::invalid_argument(std::string("LambdaGrid: ") + name +
                                        " must be nonempty");
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!(v[k] >= 0.0) || !std::isfinite(v[k]))
                throw std::invalid_argument(std::string("LambdaGrid: ") + name +
                                            " must hold finite non-negative values");
            if (k > 0 && v[k] < v[k - 1])
                throw std::invalid_argument(std::string("LambdaGrid: ") + name +
                                            " must be sorted ascending");
        }
    };
    check_list(grid.lambda_l1, "lambda_l1");
    check_list(grid.lambda_s1, "lambda_s1");
    check_list(grid.lambda_l2, "lambda_l2");
    check_list(grid.lambda_s2, "lambda_s2");
    if (grid.mode == LambdaGrid::Mode::coupled_pairs &&
        (grid.lambda_l1.size() != grid.lambda_l2.size() ||
         grid.lambda_s1.size() != grid.lambda_s2.size()))
        throw std::invalid_argument(
            "LambdaGrid: coupled_pairs requires matching nuclear and matching "
            "sparse list lengths");
}

inline std::vector<Penalties> LambdaGrid::candidates() const {
    validate(*this);
    std::vector<Penalties> out;
    if (mode == Mode::coupled_pairs) {
        out.reserve(lambda_l1.size() * lambda_s1.size());
        for (std::size_t i = 0; i < lambda_l1.size(); ++i)
            for (std::size_t j = 0; j < lambda_s1.size(); ++j)
                out.push_back({lambda_l1[i], lambda_s1[j], lambda_l2[i], lambda_s2[j]});
        return out;
    }
    out.reserve(lambda_l1.size() * lambda_s1.size() * lambda_l2.size() *
                lambda_s2.size());
    for (double l1 : lambda_l1)
        for (double s1 : lambda_s1)
            for (double l2 : lambda_l2)
                for (double s2 : lambda_s2) out.push_back({l1, s1, l2, s2});
    return out;
}

// ---------------------------------------------------------------------------
// AIC
// ---------------------------------------------------------------------------

// N log(RSS/N) + 2 rank(L1) + 2 rank(L2) + 2 k1 + 2 k2 with RSS the smooth
// loss of the report's parameters on the series (the loss keeps its 1/2N
// normalization) and k the nonzero counts of the sparse blocks.  A vanishing
// RSS returns the same large negative sentinel the solver reports.
inline double aic(const MatrixSeries& series, const FitReport& report) {
    validate(series);
    check_shapes(series, report.params);
    const double tol1 = density_zero_tol(report.params.S1);
    const double tol2 = density_zero_tol(report.params.S2);
    bool degenerate = false;
    return detail::aic_value(smooth_loss(series, report.params), series.pairs(),
                             estimate_rank(report.params.L1),
                             estimate_rank(report.params.L2),
                             detail::count_above(report.params.S1, tol1),
                             detail::count_above(report.params.S2, tol2), degenerate);
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct Criterion {
    enum class Kind { aic, oracle_rank, oracle_support };

    Kind kind = Kind::aic;
    Index target_rank_l1 = 0;  // oracle_rank
    Index target_rank_l2 = 0;
    Matrix true_s1;  // oracle_support
    Matrix true_s2;

    static Criterion aic() { return {}; }

    static Criterion oracle_rank(Index r1, Index r2) {
        if (r1 < 0 || r2 < 0)
            throw std::invalid_argument("Criterion: target ranks must be >= 0");
        Criterion c;
        c.kind = Kind::oracle_rank;
        c.target_rank_l1 = r1;
        c.target_rank_l2 = r2;
        return c;
    }

    static Criterion oracle_support(Matrix s1, Matrix s2) {
        Criterion c;
        c.kind = Kind::oracle_support;
        c.true_s1 = std::move(s1);
        c.true_s2 = std::move(s2);
        return c;
    }
};

namespace detail {

// Lower is better for every mode; oracle_support negates SN + SP.
inline double criterion_score(const FitReport& report, const Criterion& criterion) {
    switch (criterion.kind) {
        case Criterion::Kind::aic:
            return report.aic;
        case Criterion::Kind::oracle_rank:
            return std::abs(
                       static_cast<double>(report.est_rank_l1 - criterion.target_rank_l1)) +
                   std::abs(
                       static_cast<double>(report.est_rank_l2 - criterion.target_rank_l2));
        case Criterion::Kind::oracle_support: {
            const SupportMetrics m1 = support_metrics(
                report.params.S1, criterion.true_s1, density_zero_tol(report.params.S1));
            const SupportMetrics m2 = support_metrics(
                report.params.S2, criterion.true_s2, density_zero_tol(report.params.S2));
            return -(m1.sn.value_or(0.0) + m1.sp.value_or(0.0) + m2.sn.value_or(0.0) +
                     m2.sp.value_or(0.0));
        }
    }
    throw std::logic_error("criterion_score: unreachable");
}

}  // namespace detail

struct ScoredCandidate {
    Penalties penalties;
    double score = 0.0;
};

struct GridSearchResult {
    Penalties penalties;
    FitReport report;
    std::vector<ScoredCandidate> evaluated;  // in enumeration order
};

// Fits every candidate from cold (no warm starts, so results are independent
// of evaluation order) and returns the score minimizer.  Ties prefer the
// larger total penalty — the sparser, lower-rank model — then the earlier
// candidate in enumeration order.
inline GridSearchResult grid_search(const MatrixSeries& series, const LambdaGrid& grid,
                                    const SolverConfig& cfg, const Criterion& criterion) {
    validate(series);
    validate(grid);
    if (criterion.kind == Criterion::Kind::oracle_support) {
        check_square(criterion.true_s1, series.rows(), "Criterion: true S1");
        check_square(criterion.true_s2, series.cols(), "Criterion: true S2");
    }

    GridSearchResult out;
    bool have = false;
    double best_score = 0.0;
    for (const Penalties& pen : grid.candidates()) {
        FitReport rep = fit(series, pen, cfg);
        const double score = detail::criterion_score(rep, criterion);
        out.evaluated.push_back({pen, score});
        const bool better = !have || score < best_score ||
                            (score == best_score && pen.sum() > out.penalties.sum());
        if (better) {
            have = true;
            best_score = score;
            out.penalties = pen;
            out.report = std::move(rep);
        }
    }
    return out;
}

}  // namespace addmar

// Acceptance gate: ten end-to-end criteria, each printing one [PASS]/[FAIL]
// line.  Tolerances, seeds, grids, and runtime caps are pinned here; the
// assertions are the release contract for this library.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "addmar/backtest.hpp"
#include "addmar/datagen.hpp"
#include "addmar/io.hpp"
#include "addmar/metrics.hpp"
#include "addmar/model.hpp"
#include "addmar/prox.hpp"
#include "addmar/selection.hpp"
#include "addmar/solver.hpp"
#include "addmar/sparse_var.hpp"

namespace {

using namespace addmar;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int num, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %02d: %s%s%s%s\n", ok ? "PASS" : "FAIL", num, name,
                detail.empty() ? "" : "  (", detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double median(std::vector<double> v) {
    REQUIRE_FALSE(v.empty());
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

Matrix random_matrix(Index r, Index c, Rng& rng, double scale) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
    return m;
}

MatrixSeries random_series(Index t, Index d1, Index d2, Rng& rng) {
    MatrixSeries s;
    for (Index k = 0; k < t; ++k) s.data.push_back(random_matrix(d1, d2, rng, 1.0));
    return s;
}

// Pooled sensitivity/specificity over both sparse blocks.
std::pair<double, double> pooled_sn_sp(const AdditiveMarParams& est,
                                       const AdditiveMarParams& truth, double tol) {
    long tp = 0, fn = 0, tn = 0, fp = 0;
    const auto count = [&](const Matrix& eb, const Matrix& tb) {
        for (Index i = 0; i < eb.rows(); ++i)
            for (Index j = 0; j < eb.cols(); ++j) {
                const bool on = std::abs(eb(i, j)) > tol;
                if (tb(i, j) != 0.0)
                    on ? ++tp : ++fn;
                else
                    on ? ++fp : ++tn;
            }
    };
    count(est.S1, truth.S1);
    count(est.S2, truth.S2);
    const double sn = (tp + fn) ? double(tp) / double(tp + fn) : 1.0;
    const double sp = (tn + fp) ? double(tn) / double(tn + fp) : 1.0;
    return {sn, sp};
}

// Shared sparse-recovery protocol: sparse-only generation, support-oracle
// tuning of the l1 weights over a fixed grid with the nuclear weights pinned
// high (the truth has no low-rank part).
struct SparseOutcome {
    double re_both = 0.0;
    double re_sparse = 0.0;
    double sn = 0.0, sp = 0.0;
};

SparseOutcome run_sparse_protocol(double edge_density, Index T, unsigned seed) {
    SimulationConfig cfg;
    cfg.d1 = 15;
    cfg.d2 = 10;
    cfg.T = T;
    cfg.e1 = edge_density;
    cfg.e2 = edge_density;
    cfg.structure = TruthStructure::sparse_only;
    cfg.seed = seed;
    const SimulationResult sim = simulate(cfg);

    LambdaGrid grid;
    grid.lambda_l1 = {1e6};
    grid.lambda_l2 = {1e6};
    grid.lambda_s1 = {0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28};
    grid.lambda_s2 = grid.lambda_s1;

    const GridSearchResult gsr =
        grid_search(sim.series, grid, SolverConfig{},
                    Criterion::oracle_support(sim.truth.S1, sim.truth.S2));

    SparseOutcome out;
    out.re_both = relative_error(gsr.report.params, sim.truth, ErrorMode::both);
    out.re_sparse = relative_error(gsr.report.params, sim.truth, ErrorMode::sparse);
    std::tie(out.sn, out.sp) = pooled_sn_sp(gsr.report.params, sim.truth, 1e-8);
    return out;
}

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "addmar_acc_XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("acceptance 01 gradient correctness", "[acceptance]") {
    constexpr double kRelTol = 1e-6;
    constexpr double kRuntimeCap = 10.0;
    constexpr double kEps = 1e-5;
    Stopwatch watch;

    Rng rng(2024, RngStream::generic);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const Index d1 = 2 + Index(rng.below(5));
        const Index d2 = 2 + Index(rng.below(5));
        const Index T = 8 + Index(rng.below(13));
        const MatrixSeries series = random_series(T, d1, d2, rng);
        AdditiveMarParams params = AdditiveMarParams::Zero(d1, d2);
        params.L1 = random_matrix(d1, d1, rng, 0.5);
        params.S1 = random_matrix(d1, d1, rng, 0.5);
        params.L2 = random_matrix(d2, d2, rng, 0.5);
        params.S2 = random_matrix(d2, d2, rng, 0.5);

        const Matrix g_row = grad_row(series, params);
        const Matrix g_col = grad_col(series, params);

        Matrix fd_row(d1, d1), fd_col(d2, d2);
        for (Index i = 0; i < d1; ++i)
            for (Index j = 0; j < d1; ++j) {
                AdditiveMarParams p = params;
                p.S1(i, j) += kEps;
                const double up = smooth_loss(series, p);
                p.S1(i, j) -= 2.0 * kEps;
                fd_row(i, j) = (up - smooth_loss(series, p)) / (2.0 * kEps);
            }
        for (Index i = 0; i < d2; ++i)
            for (Index j = 0; j < d2; ++j) {
                AdditiveMarParams p = params;
                p.S2(i, j) += kEps;
                const double up = smooth_loss(series, p);
                p.S2(i, j) -= 2.0 * kEps;
                fd_col(i, j) = (up - smooth_loss(series, p)) / (2.0 * kEps);
            }

        const double scale_row = std::max(1.0, fd_row.cwiseAbs().maxCoeff());
        const double scale_col = std::max(1.0, fd_col.cwiseAbs().maxCoeff());
        worst = std::max(worst, (g_row - fd_row).cwiseAbs().maxCoeff() / scale_row);
        worst = std::max(worst, (g_col - fd_col).cwiseAbs().maxCoeff() / scale_col);
    }

    const double elapsed = watch.seconds();
    const bool ok = worst <= kRelTol && elapsed < kRuntimeCap;
    report(1, "gradient correctness", ok,
           "max rel dev " + fmt("%.2e", worst) + " over 20 instances, " +
               fmt("%.1f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 02 proximal operator oracles", "[acceptance]") {
    constexpr double kNuclearTol = 1e-8;
    constexpr double kOptimalitySlack = 1e-12;
    constexpr double kRuntimeCap = 30.0;
    Stopwatch watch;

    Rng rng(77, RngStream::generic);
    bool soft_exact = true;
    double worst_identity = 0.0;
    bool optimal = true;

    for (int k = 0; k < 50; ++k) {
        const Matrix m = random_matrix(4, 4, rng, 1.0 + rng.uniform01());
        const double tau = (k % 7 == 0) ? 0.0 : rng.uniform(0.0, 2.0);

        // Entrywise closed form, computed independently.
        const Matrix soft = soft_threshold(m, tau);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) {
                const double v = m(i, j);
                const double mag = std::abs(v) - tau;
                const double expect = mag > 0.0 ? (v < 0.0 ? -mag : mag) : 0.0;
                if (soft(i, j) != expect) soft_exact = false;
            }

        // Nuclear-norm identity: the thresholded spectrum is the prox's spectrum.
        const SvtResult svt = singular_value_threshold(m, tau);
        Eigen::JacobiSVD<Matrix> svd(m);
        double expect_nuc = 0.0;
        for (Index i = 0; i < svd.singularValues().size(); ++i)
            expect_nuc += std::max(svd.singularValues()(i) - tau, 0.0);
        worst_identity = std::max(worst_identity, std::abs(svt.nuclear_norm - expect_nuc));
        worst_identity =
            std::max(worst_identity, std::abs(nuclear_norm(svt.matrix) - expect_nuc));

        // Local optimality of the prox objective at the reported minimizer.
        const auto prox_objective = [&](const Matrix& x) {
            return 0.5 * (x - m).squaredNorm() + tau * nuclear_norm(x);
        };
        const double at_min = prox_objective(svt.matrix);
        for (double scale : {1e-2, 1e-4})
            for (int probe = 0; probe < 4; ++probe) {
                Matrix delta = random_matrix(4, 4, rng, 1.0);
                delta *= scale / delta.norm();
                if (prox_objective(svt.matrix + delta) <
                    at_min - kOptimalitySlack * (1.0 + std::abs(at_min)))
                    optimal = false;
            }
    }

    const double elapsed = watch.seconds();
    const bool ok =
        soft_exact && worst_identity <= kNuclearTol && optimal && elapsed < kRuntimeCap;
    report(2, "proximal operator oracles", ok,
           std::string("soft exact=") + (soft_exact ? "yes" : "NO") + ", nuclear dev " +
               fmt("%.2e", worst_identity) + ", optimality " + (optimal ? "held" : "VIOLATED") +
               ", " + fmt("%.1f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 03 solver descent and convexity", "[acceptance]") {
    constexpr double kMonotoneSlack = 1e-12;  // relative, per step
    constexpr double kAgreeTol = 1e-4;        // relative, across initializations
    constexpr double kRuntimeCap = 120.0;
    Stopwatch watch;

    bool monotone = true;
    double worst_gap = 0.0;
    for (int i = 0; i < 10; ++i) {
        SimulationConfig cfg;
        cfg.d1 = 4 + i % 3;
        cfg.d2 = 3 + (i + 1) % 3;
        cfg.T = 40 + 5 * i;
        cfg.R1 = 1 + i % 2;
        cfg.R2 = 1;
        cfg.e1 = 0.2 + 0.05 * (i % 3);
        cfg.e2 = 0.2;
        cfg.seed = 100 + unsigned(i);
        cfg.structure = static_cast<TruthStructure>(i % 3);
        const SimulationResult sim = simulate(cfg);
        const Penalties pen{0.2, 0.05, 0.2, 0.05};

        SolverConfig tight;
        tight.outer_tol = 1e-8;
        tight.outer_max_iters = 500;
        tight.inner_tol = 1e-10;
        tight.inner_max_iters = 2000;

        const FitReport a = fit(sim.series, pen, tight);
        for (std::size_t k = 0; k + 1 < a.objective_trace.size(); ++k)
            if (a.objective_trace[k + 1] >
                a.objective_trace[k] +
                    kMonotoneSlack * (1.0 + std::abs(a.objective_trace[k])))
                monotone = false;

        SolverConfig from_elsewhere = tight;
        Rng rng(7 + unsigned(i), RngStream::generic);
        AdditiveMarParams init = AdditiveMarParams::Zero(cfg.d1, cfg.d2);
        init.L1 = random_matrix(cfg.d1, cfg.d1, rng, 0.2);
        init.S1 = random_matrix(cfg.d1, cfg.d1, rng, 0.2);
        init.L2 = random_matrix(cfg.d2, cfg.d2, rng, 0.2);
        init.S2 = random_matrix(cfg.d2, cfg.d2, rng, 0.2);
        from_elsewhere.init = init;
        const FitReport b = fit(sim.series, pen, from_elsewhere);

        const double fa = a.objective_trace.back(), fb = b.objective_trace.back();
        worst_gap = std::max(worst_gap,
                             std::abs(fa - fb) / (1.0 + std::min(std::abs(fa), std::abs(fb))));
    }

    const double elapsed = watch.seconds();
    const bool ok = monotone && worst_gap <= kAgreeTol && elapsed < kRuntimeCap;
    report(3, "solver descent and convexity", ok,
           std::string("traces ") + (monotone ? "monotone" : "NOT MONOTONE") +
               ", worst init gap " + fmt("%.2e", worst_gap) + ", " + fmt("%.1f", elapsed) +
               "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 04 sparse recovery improves with history length", "[acceptance]") {
    constexpr double kReCap = 0.15;
    constexpr double kSupportFloor = 0.85;
    constexpr double kRuntimeCap = 900.0;
    Stopwatch watch;

    std::vector<double> re100, re300, sn300, sp300;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        re100.push_back(run_sparse_protocol(0.2, 100, seed).re_both);
        const SparseOutcome o = run_sparse_protocol(0.2, 300, seed);
        re300.push_back(o.re_both);
        sn300.push_back(o.sn);
        sp300.push_back(o.sp);
    }
    const double m100 = median(re100), m300 = median(re300);
    const double msn = median(sn300), msp = median(sp300);

    const double elapsed = watch.seconds();
    const bool ok = m300 < m100 && m300 <= kReCap && msn >= kSupportFloor &&
                    msp >= kSupportFloor && elapsed < kRuntimeCap;
    report(4, "sparse recovery improves with history length", ok,
           "median RE " + fmt("%.3f", m100) + " @T=100 -> " + fmt("%.3f", m300) +
               " @T=300, SN " + fmt("%.2f", msn) + ", SP " + fmt("%.2f", msp) + ", " +
               fmt("%.0f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 05 denser truths are harder", "[acceptance]") {
    constexpr double kRuntimeCap = 900.0;
    Stopwatch watch;

    std::vector<double> re_sparse, re_dense;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        re_sparse.push_back(run_sparse_protocol(0.2, 300, seed).re_both);
        re_dense.push_back(run_sparse_protocol(0.4, 300, seed).re_both);
    }
    const double ms = median(re_sparse), md = median(re_dense);

    const double elapsed = watch.seconds();
    const bool ok = md > ms && elapsed < kRuntimeCap;
    report(5, "denser truths are harder", ok,
           "median RE " + fmt("%.3f", ms) + " @e=0.2 vs " + fmt("%.3f", md) + " @e=0.4, " +
               fmt("%.0f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 06 rank recovery under rank-oracle tuning", "[acceptance]") {
    constexpr int kExactFloor = 4;  // of 5 seeds
    constexpr double kReCap = 0.20;
    constexpr double kRuntimeCap = 900.0;
    Stopwatch watch;

    int exact = 0;
    std::vector<double> res;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        SimulationConfig cfg;
        cfg.d1 = 15;
        cfg.d2 = 10;
        cfg.T = 300;
        cfg.R1 = 3;
        cfg.R2 = 3;
        cfg.structure = TruthStructure::lowrank_only;
        cfg.seed = seed;
        const SimulationResult sim = simulate(cfg);

        LambdaGrid grid;
        grid.mode = LambdaGrid::Mode::full_cross;
        grid.lambda_l1 = {1.1, 1.2, 1.3, 1.38, 1.46, 1.55, 1.7, 1.9, 2.1, 2.4, 2.7, 3.0};
        grid.lambda_l2 = grid.lambda_l1;
        grid.lambda_s1 = {1e6};
        grid.lambda_s2 = {1e6};

        const GridSearchResult gsr =
            grid_search(sim.series, grid, SolverConfig{}, Criterion::oracle_rank(3, 3));
        if (gsr.report.est_rank_l1 == 3 && gsr.report.est_rank_l2 == 3) ++exact;
        res.push_back(relative_error(gsr.report.params, sim.truth, ErrorMode::both));
    }
    const double mre = median(res);

    const double elapsed = watch.seconds();
    const bool ok = exact >= kExactFloor && mre <= kReCap && elapsed < kRuntimeCap;
    report(6, "rank recovery under rank-oracle tuning", ok,
           "exact ranks on " + std::to_string(exact) + "/5 seeds, median RE " +
               fmt("%.3f", mre) + ", " + fmt("%.0f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 07 backtest beats the sparse VAR baseline", "[acceptance]") {
    constexpr int kWinFloor = 4;  // of 5 seeds, at every horizon
    constexpr double kRuntimeCap = 1200.0;
    Stopwatch watch;

    int wins = 0;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        SimulationConfig cfg;
        cfg.d1 = 10;
        cfg.d2 = 15;
        cfg.T = 80;
        cfg.R1 = 3;
        cfg.R2 = 4;
        cfg.e1 = 0.5;
        cfg.e2 = 0.3;
        cfg.seed = seed;
        const SimulationResult sim = simulate(cfg);

        BacktestTuner tuner;
        tuner.grid.lambda_l1 = {0.1, 0.3};
        tuner.grid.lambda_l2 = {0.1, 0.3};
        tuner.grid.lambda_s1 = {0.05, 0.15};
        tuner.grid.lambda_s2 = {0.05, 0.15};

        bool all_h = true;
        for (Index h : {1, 2, 3}) {
            const double mar = rolling_backtest(sim.series, h, tuner, SolverConfig{},
                                                ForecastModel::additive_mar)
                                   .rmse;
            const double var = rolling_backtest(sim.series, h, tuner, SolverConfig{},
                                                ForecastModel::sparse_var)
                                   .rmse;
            all_h = all_h && mar < var;
        }
        wins += all_h;
    }

    const double elapsed = watch.seconds();
    const bool ok = wins >= kWinFloor && elapsed < kRuntimeCap;
    report(7, "backtest beats the sparse VAR baseline", ok,
           "additive model won at every horizon on " + std::to_string(wins) + "/5 seeds, " +
               fmt("%.0f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 08 vectorized embedding equivalence", "[acceptance]") {
    constexpr double kTol = 1e-10;
    constexpr double kRuntimeCap = 10.0;
    Stopwatch watch;

    Rng rng(5150, RngStream::generic);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Index d1 = 2 + Index(rng.below(4));
        const Index d2 = 2 + Index(rng.below(4));
        AdditiveMarParams params = AdditiveMarParams::Zero(d1, d2);
        params.L1 = gen_lowrank(d1, 1 + Index(rng.below(std::min<std::size_t>(d1, 3))), rng);
        params.S1 = gen_sparse(d1, 0.4, rng);
        params.L2 = gen_lowrank(d2, 1 + Index(rng.below(std::min<std::size_t>(d2, 3))), rng);
        params.S2 = gen_sparse(d2, 0.4, rng);
        const double c = stabilize_factor(params.row_map(), params.col_map(), 0.95);
        params.L1 *= c;
        params.S1 *= c;
        params.L2 *= c;
        params.S2 *= c;

        SparseVarModel var;
        var.transition = mar_to_var_transition(params);
        const Matrix y0 = random_matrix(d1, d2, rng, 1.0);
        for (Index h = 1; h <= 5; ++h) {
            const Matrix direct = forecast(params, y0, h);
            const Matrix embedded = forecast_svar(var, y0, h);
            const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
            worst = std::max(worst, (direct - embedded).cwiseAbs().maxCoeff() / scale);
        }
    }

    const double elapsed = watch.seconds();
    const bool ok = worst <= kTol && elapsed < kRuntimeCap;
    report(8, "vectorized embedding equivalence", ok,
           "max rel dev " + fmt("%.2e", worst) + " over 10 parameter sets, h<=5, " +
               fmt("%.1f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 09 estimation error shrinks with T", "[acceptance]") {
    constexpr double kRatioCap = 0.6;
    constexpr double kRuntimeCap = 900.0;
    Stopwatch watch;

    std::vector<double> e2_100, e2_400;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        // Same seed at both lengths: the truth streams are length-invariant,
        // so each pair shares its ground truth.
        e2_100.push_back(run_sparse_protocol(0.2, 100, seed).re_sparse);
        e2_400.push_back(run_sparse_protocol(0.2, 400, seed).re_sparse);
    }
    const double m100 = median(e2_100), m400 = median(e2_400);

    const double elapsed = watch.seconds();
    const bool ok = m400 < kRatioCap * m100 && elapsed < kRuntimeCap;
    report(9, "estimation error shrinks with T", ok,
           "median squared error " + fmt("%.4f", m100) + " @T=100 -> " + fmt("%.4f", m400) +
               " @T=400 (ratio " + fmt("%.2f", m400 / m100) + ", cap 0.60), " +
               fmt("%.0f", elapsed) + "s");
    REQUIRE(ok);
}

TEST_CASE("acceptance 10 determinism and io round-trips", "[acceptance]") {
    constexpr double kRuntimeCap = 60.0;
    Stopwatch watch;

    const char* cli_env = std::getenv("ADDMAR_CLI");
    if (cli_env == nullptr) {
        report(10, "determinism and io round-trips", false, "ADDMAR_CLI not set");
        REQUIRE(cli_env != nullptr);
    }
    const std::string cli = cli_env;
    TempDir dir;

    const auto run0 = [&](const std::string& tail) {
        REQUIRE(run_cmd(cli + " " + tail + " >/dev/null 2>/dev/null") == 0);
    };
    const auto same = [&](const std::string& f1, const std::string& f2) {
        return slurp(dir.file(f1)) == slurp(dir.file(f2));
    };

    detail::write_text_file(dir.file("cfg.json"),
                            "{\"d1\": 4, \"d2\": 3, \"T\": 40, \"e1\": 0.3, \"e2\": 0.3,"
                            " \"structure\": \"sparse_only\", \"seed\": 7,"
                            " \"noise\": {\"kind\": \"iid\", \"sigma\": 0.5}}\n");

    bool deterministic = true;
    const std::string sim_tail = "simulate --config " + dir.file("cfg.json") + " --out ";
    run0(sim_tail + dir.file("s1.csv"));
    run0(sim_tail + dir.file("s2.csv"));
    deterministic = deterministic && same("s1.csv", "s2.csv") &&
                    same("s1.csv.truth.json", "s2.csv.truth.json");

    const std::string fit_tail =
        "fit --data " + dir.file("s1.csv") +
        " --lambda-l1 1e6 --lambda-s1 0.05 --lambda-l2 1e6 --lambda-s2 0.05 --out ";
    run0(fit_tail + dir.file("m1.json") + " --report " + dir.file("r1.txt"));
    run0(fit_tail + dir.file("m2.json") + " --report " + dir.file("r2.txt"));
    deterministic = deterministic && same("m1.json", "m2.json") && same("r1.txt", "r2.txt");

    const std::string fc_tail = "forecast --model " + dir.file("m1.json") + " --data " +
                                dir.file("s1.csv") + " --horizon 3 --out ";
    run0(fc_tail + dir.file("f1.csv"));
    run0(fc_tail + dir.file("f2.csv"));
    deterministic = deterministic && same("f1.csv", "f2.csv");

    const std::string bt_tail = "backtest --data " + dir.file("s1.csv") +
                                " --grid 'l1=1e6;s1=0.05;l2=1e6;s2=0.05' --horizon 1"
                                " --window 6 --out ";
    run0(bt_tail + dir.file("b1.txt"));
    run0(bt_tail + dir.file("b2.txt"));
    deterministic = deterministic && same("b1.txt", "b2.txt");

    // Round-trips are exact: series and model files reproduce byte-for-byte.
    const MatrixSeries series = parse_series(dir.file("s1.csv"));
    write_series(dir.file("s_rt.csv"), series);
    const bool series_rt = same("s1.csv", "s_rt.csv");

    const ModelFile model = parse_model(dir.file("m1.json"));
    write_model(dir.file("m_rt.json"), model);
    const bool model_rt = same("m1.json", "m_rt.json");

    const double elapsed = watch.seconds();
    const bool ok = deterministic && series_rt && model_rt && elapsed < kRuntimeCap;
    report(10, "determinism and io round-trips", ok,
           std::string("reruns ") + (deterministic ? "byte-identical" : "DIVERGED") +
               ", series round-trip " + (series_rt ? "exact" : "INEXACT") +
               ", model round-trip " + (model_rt ? "exact" : "INEXACT") + ", " +
               fmt("%.1f", elapsed) + "s");
    REQUIRE(ok);
}

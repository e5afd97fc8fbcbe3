// addmar: command-line surface over the additive matrix autoregression library.
//
// Subcommands: simulate | fit | forecast | backtest.
// Exit codes:  0 success, 2 user/input error, 3 IO/system error.
// Env:         ADDMAR_THREADS caps internal parallelism (0 = automatic).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "addmar/backtest.hpp"
#include "addmar/io.hpp"
#include "addmar/metrics.hpp"
#include "addmar/selection.hpp"
#include "addmar/solver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 2;
constexpr int kIoError = 3;

double parse_double_token(std::string_view tok, const std::string& what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.begin(), tok.end(), v);
    if (ec != std::errc{} || p != tok.end() || !std::isfinite(v))
        throw std::invalid_argument(what + ": expected a finite number, got '" +
                                    std::string(tok) + "'");
    return v;
}

long parse_long_token(std::string_view tok, const std::string& what) {
    long v = 0;
    const auto [p, ec] = std::from_chars(tok.begin(), tok.end(), v);
    if (ec != std::errc{} || p != tok.end())
        throw std::invalid_argument(what + ": expected an integer, got '" +
                                    std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= text.size(); ++k) {
        if (k == text.size() || text[k] == sep) {
            out.push_back(text.substr(start, k - start));
            start = k + 1;
        }
    }
    return out;
}

// Inline grid syntax: "mode=coupled;l1=0,0.1;s1=0.01,0.1;l2=0,0.1;s2=0.01,0.1".
// mode is optional (coupled|full, default coupled); the four lists are required.
addmar::LambdaGrid parse_grid_spec(const std::string& spec) {
    addmar::LambdaGrid grid;
    bool saw_l1 = false, saw_s1 = false, saw_l2 = false, saw_s2 = false;
    for (std::string_view seg : split(spec, ';')) {
        if (seg.empty()) continue;
        const std::size_t eq = seg.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("--grid: expected key=value, got '" +
                                        std::string(seg) + "'");
        const std::string_view key = seg.substr(0, eq);
        const std::string_view value = seg.substr(eq + 1);
        if (key == "mode") {
            if (value == "coupled")
                grid.mode = addmar::LambdaGrid::Mode::coupled_pairs;
            else if (value == "full")
                grid.mode = addmar::LambdaGrid::Mode::full_cross;
            else
                throw std::invalid_argument("--grid: mode must be coupled or full, got '" +
                                            std::string(value) + "'");
            continue;
        }
        std::vector<double>* list = nullptr;
        if (key == "l1") {
            list = &grid.lambda_l1;
            saw_l1 = true;
        } else if (key == "s1") {
            list = &grid.lambda_s1;
            saw_s1 = true;
        } else if (key == "l2") {
            list = &grid.lambda_l2;
            saw_l2 = true;
        } else if (key == "s2") {
            list = &grid.lambda_s2;
            saw_s2 = true;
        } else {
            throw std::invalid_argument("--grid: unknown key '" + std::string(key) + "'");
        }
        list->clear();
        for (std::string_view tok : split(value, ','))
            list->push_back(parse_double_token(tok, "--grid " + std::string(key)));
    }
    if (!(saw_l1 && saw_s1 && saw_l2 && saw_s2))
        throw std::invalid_argument("--grid must define all of l1, s1, l2, s2");
    addmar::validate(grid);
    return grid;
}

addmar::Criterion make_criterion(const std::string& name, const std::string& truth_path) {
    if (name == "aic") return addmar::Criterion::aic();
    if (truth_path.empty())
        throw std::invalid_argument("--criterion " + name +
                                    " requires --truth <model file>");
    const addmar::ModelFile truth = addmar::parse_model(truth_path);
    if (name == "oracle-rank")
        return addmar::Criterion::oracle_rank(addmar::estimate_rank(truth.params.L1),
                                              addmar::estimate_rank(truth.params.L2));
    return addmar::Criterion::oracle_support(truth.params.S1, truth.params.S2);
}

std::string fv(double v) { return addmar::detail::format_value(v); }

std::string short_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string penalty_line(const addmar::Penalties& pen) {
    return "lambda_l1=" + fv(pen.lambda_l1) + " lambda_s1=" + fv(pen.lambda_s1) +
           " lambda_l2=" + fv(pen.lambda_l2) + " lambda_s2=" + fv(pen.lambda_s2);
}

void append_edges(std::string& s, const addmar::Matrix& block, const std::string& axis) {
    const double tol = addmar::density_zero_tol(block);
    bool any = false;
    for (addmar::Index i = 0; i < block.rows(); ++i) {
        for (addmar::Index j = 0; j < block.cols(); ++j) {
            if (std::abs(block(i, j)) > tol) {
                s += "  " + axis + " " + std::to_string(i) + " <- " + axis + " " +
                     std::to_string(j) + ": " + short_value(block(i, j)) + "\n";
                any = true;
            }
        }
    }
    if (!any) s += "  (none)\n";
}

std::string fit_report_text(const std::string& data_path, const addmar::MatrixSeries& series,
                            const addmar::Penalties& pen, const addmar::FitReport& rep,
                            const std::string& selection_note,
                            const std::vector<addmar::ScoredCandidate>* evaluated) {
    const addmar::Matrix& s1 = rep.params.S1;
    const addmar::Matrix& s2 = rep.params.S2;
    const addmar::Index n1 = s1.size(), n2 = s2.size();
    const addmar::Index k1 = addmar::detail::count_above(s1, addmar::density_zero_tol(s1));
    const addmar::Index k2 = addmar::detail::count_above(s2, addmar::density_zero_tol(s2));

    std::string s;
    s += "additive MAR fit\n";
    s += "================\n";
    s += "data: " + data_path + " (T=" + std::to_string(series.size()) +
         ", d1=" + std::to_string(series.rows()) + ", d2=" + std::to_string(series.cols()) +
         ")\n";
    if (!selection_note.empty()) s += selection_note + "\n";
    s += "penalties: " + penalty_line(pen) + "\n";
    s += std::string("converged: ") + (rep.converged ? "yes" : "no") + " (" +
         std::to_string(rep.outer_iters) + " outer sweeps)\n";
    s += "final objective: " +
         (rep.objective_trace.empty() ? std::string("n/a") : fv(rep.objective_trace.back())) +
         "\n";
    s += "AIC: " + (rep.aic_degenerate ? std::string("not defined (zero residual)")
                                       : fv(rep.aic)) +
         "\n";
    s += "estimated rank of L1: " + std::to_string(rep.est_rank_l1) + " (of at most " +
         std::to_string(series.rows()) + ")\n";
    s += "estimated rank of L2: " + std::to_string(rep.est_rank_l2) + " (of at most " +
         std::to_string(series.cols()) + ")\n";
    s += "edge density of S1: " + short_value(rep.est_density_s1) + " (" +
         std::to_string(k1) + " of " + std::to_string(n1) + " entries)\n";
    s += "edge density of S2: " + short_value(rep.est_density_s2) + " (" +
         std::to_string(k2) + " of " + std::to_string(n2) + " entries)\n";
    s += "S1 edges (row i <- row j: weight):\n";
    append_edges(s, s1, "row");
    s += "S2 edges (col i <- col j: weight):\n";
    append_edges(s, s2, "col");
    if (evaluated != nullptr) {
        s += "grid candidates (lower score wins; ties prefer larger penalties):\n";
        for (const addmar::ScoredCandidate& c : *evaluated)
            s += "  " + penalty_line(c.penalties) + "  score=" + fv(c.score) + "\n";
    }
    s += "objective trace:\n";
    for (std::size_t k = 0; k < rep.objective_trace.size(); ++k)
        s += "  sweep " + std::to_string(k + 1) + ": " + fv(rep.objective_trace[k]) + "\n";
    return s;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        addmar::detail::write_text_file(out_path, text);
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const std::string& config_path, const std::string& out_path,
                 bool seed_given, std::uint64_t seed) {
    addmar::SimulationConfig cfg = addmar::parse_simulation_config(config_path);
    if (seed_given) cfg.seed = seed;
    const addmar::SimulationResult res = addmar::simulate(cfg);
    addmar::write_series(out_path, res.series);
    addmar::ModelFile truth;
    truth.params = res.truth;
    truth.converged = true;
    addmar::write_model(out_path + ".truth.json", truth);
    return kOk;
}

// --- fit --------------------------------------------------------------------

int run_fit(const std::string& data_path, const std::string& out_path,
            const std::string& report_path, const std::string& grid_spec,
            const std::string& criterion_name, const std::string& truth_path,
            const addmar::Penalties& fixed_pen) {
    const addmar::MatrixSeries series = addmar::parse_series(data_path);
    const addmar::SolverConfig cfg{};

    addmar::ModelFile model;
    std::string report;
    if (!grid_spec.empty()) {
        const addmar::LambdaGrid grid = parse_grid_spec(grid_spec);
        const addmar::Criterion crit = make_criterion(criterion_name, truth_path);
        const addmar::GridSearchResult gsr = addmar::grid_search(series, grid, cfg, crit);
        model.params = gsr.report.params;
        model.penalties = gsr.penalties;
        model.outer_iters = gsr.report.outer_iters;
        model.converged = gsr.report.converged;
        model.objective =
            gsr.report.objective_trace.empty() ? 0.0 : gsr.report.objective_trace.back();
        const std::string note = "selection: criterion " + criterion_name + " over " +
                                 std::to_string(gsr.evaluated.size()) + " grid candidates";
        report = fit_report_text(data_path, series, gsr.penalties, gsr.report, note,
                                 &gsr.evaluated);
    } else {
        const addmar::FitReport rep = addmar::fit(series, fixed_pen, cfg);
        model.params = rep.params;
        model.penalties = fixed_pen;
        model.outer_iters = rep.outer_iters;
        model.converged = rep.converged;
        model.objective = rep.objective_trace.empty() ? 0.0 : rep.objective_trace.back();
        report = fit_report_text(data_path, series, fixed_pen, rep, "", nullptr);
    }
    addmar::write_model(out_path, model);
    emit(report_path, report);
    return kOk;
}

// --- forecast ---------------------------------------------------------------

int run_forecast(const std::string& model_path, const std::string& data_path,
                 long horizon, const std::string& out_path) {
    const addmar::ModelFile model = addmar::parse_model(model_path);
    const addmar::MatrixSeries series = addmar::parse_series(data_path);

    addmar::MatrixSeries fragment;
    addmar::Matrix y = series.data.back();
    if (horizon < 1)
        throw std::invalid_argument("forecast: horizon must be >= 1");
    for (long k = 0; k < horizon; ++k) {
        y = addmar::forecast(model.params, y, 1);
        fragment.data.push_back(y);
    }
    const std::string text = addmar::to_csv(fragment, /*t_offset=*/series.size());
    emit(out_path, text);
    return kOk;
}

// --- backtest ---------------------------------------------------------------

int run_backtest(const std::string& data_path, const std::string& horizons_arg,
                 const std::string& models_arg, const std::string& grid_spec,
                 long window, const std::string& out_path) {
    const addmar::MatrixSeries series = addmar::parse_series(data_path);

    std::vector<long> horizons;
    for (std::string_view tok : split(horizons_arg, ','))
        horizons.push_back(parse_long_token(tok, "--horizon"));
    if (horizons.empty()) throw std::invalid_argument("--horizon: list must be nonempty");

    std::vector<std::pair<std::string, addmar::ForecastModel>> models;
    for (std::string_view tok : split(models_arg, ',')) {
        if (tok == "additive_mar")
            models.emplace_back("additive_mar", addmar::ForecastModel::additive_mar);
        else if (tok == "sparse_var")
            models.emplace_back("sparse_var", addmar::ForecastModel::sparse_var);
        else
            throw std::invalid_argument(
                "--models: expected additive_mar or sparse_var, got '" + std::string(tok) +
                "'");
    }
    if (models.empty()) throw std::invalid_argument("--models: list must be nonempty");

    addmar::BacktestTuner tuner;
    tuner.grid = parse_grid_spec(grid_spec);
    const addmar::SolverConfig cfg{};

    // One RMSE per (horizon, model) cell.
    std::vector<std::vector<std::string>> cells;
    for (long h : horizons) {
        std::vector<std::string> row;
        row.push_back(std::to_string(h));
        for (const auto& [name, kind] : models) {
            const addmar::BacktestReport rep =
                addmar::rolling_backtest(series, h, tuner, cfg, kind, window);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", rep.rmse);
            row.push_back(buf);
        }
        cells.push_back(std::move(row));
    }

    std::vector<std::string> headers{"horizon"};
    for (const auto& [name, kind] : models) headers.push_back(name);
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }

    std::string text;
    text += "rolling backtest: window=" + std::to_string(window) + ", origins=window-h+1\n";
    text += "data: " + data_path + " (T=" + std::to_string(series.size()) +
            ", d1=" + std::to_string(series.rows()) +
            ", d2=" + std::to_string(series.cols()) + ")\n";
    text += "tuning: AIC over " + std::to_string(tuner.grid.candidates().size()) +
            " grid candidates at the first origin\n";
    const auto append_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) text += "  ";
            text += std::string(width[c] - row[c].size(), ' ') + row[c];
        }
        text += '\n';
    };
    append_row(headers);
    for (const auto& row : cells) append_row(row);
    emit(out_path, text);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("ADDMAR_THREADS")) {
        int n = 0;
        const std::string_view sv(env);
        const auto [p, ec] = std::from_chars(sv.begin(), sv.end(), n);
        if (ec != std::errc{} || p != sv.end() || n < 0) {
            std::cerr << "error: ADDMAR_THREADS must be a non-negative integer\n";
            return kUserError;
        }
        Eigen::setNbThreads(n);
    }

    CLI::App app{"additive matrix autoregression: simulate, fit, forecast, backtest"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic series from a config");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "simulation config (JSON)")->required();
    sim->add_option("--out", sim_out,
                    "output series path; the ground truth goes to <out>.truth.json")
        ->required();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "override the config's seed");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit an additive MAR model to a series");
    std::string fit_data, fit_out, fit_report, fit_grid, fit_truth;
    std::string fit_criterion = "aic";
    addmar::Penalties fit_pen{};
    fit_cmd->add_option("--data", fit_data, "input series (CSV)")->required();
    fit_cmd->add_option("--out", fit_out, "output model path (JSON)")->required();
    fit_cmd->add_option("--report", fit_report, "report path (stdout when omitted)");
    auto* grid_opt = fit_cmd->add_option(
        "--grid", fit_grid, "grid spec, e.g. mode=coupled;l1=0,0.1;s1=0.01;l2=0,0.1;s2=0.01");
    auto* l1_opt = fit_cmd->add_option("--lambda-l1", fit_pen.lambda_l1, "nuclear penalty on L1");
    auto* s1_opt = fit_cmd->add_option("--lambda-s1", fit_pen.lambda_s1, "l1 penalty on S1");
    auto* l2_opt = fit_cmd->add_option("--lambda-l2", fit_pen.lambda_l2, "nuclear penalty on L2");
    auto* s2_opt = fit_cmd->add_option("--lambda-s2", fit_pen.lambda_s2, "l1 penalty on S2");
    grid_opt->excludes(l1_opt)->excludes(s1_opt)->excludes(l2_opt)->excludes(s2_opt);
    fit_cmd
        ->add_option("--criterion", fit_criterion, "selection criterion for --grid")
        ->check(CLI::IsMember({"aic", "oracle-rank", "oracle-support"}))
        ->needs(grid_opt);
    fit_cmd->add_option("--truth", fit_truth, "ground-truth model for oracle criteria")
        ->needs(grid_opt);

    // forecast
    auto* fc = app.add_subcommand("forecast", "forecast h steps ahead from a fitted model");
    std::string fc_model, fc_data, fc_out;
    long fc_h = 0;
    fc->add_option("--model", fc_model, "model path (JSON)")->required();
    fc->add_option("--data", fc_data, "input series (CSV)")->required();
    fc->add_option("--horizon", fc_h, "number of steps ahead (>= 1)")->required();
    fc->add_option("--out", fc_out, "output series fragment (stdout when omitted)");

    // backtest
    auto* bt = app.add_subcommand("backtest", "rolling-origin forecast comparison");
    std::string bt_data, bt_grid, bt_out;
    std::string bt_horizons = "1";
    std::string bt_models = "additive_mar,sparse_var";
    long bt_window = 10;
    bt->add_option("--data", bt_data, "input series (CSV)")->required();
    bt->add_option("--grid", bt_grid, "grid spec for tuning")->required();
    bt->add_option("--horizon", bt_horizons, "comma-separated horizons (default 1)");
    bt->add_option("--models", bt_models,
                   "comma-separated models (default additive_mar,sparse_var)");
    bt->add_option("--window", bt_window, "number of held-out origins (default 10)");
    bt->add_option("--out", bt_out, "report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUserError;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_config, sim_out, sim_seed_opt->count() > 0, sim_seed);
        if (fit_cmd->parsed())
            return run_fit(fit_data, fit_out, fit_report, fit_grid, fit_criterion,
                           fit_truth, fit_pen);
        if (fc->parsed()) return run_forecast(fc_model, fc_data, fc_h, fc_out);
        if (bt->parsed())
            return run_backtest(bt_data, bt_horizons, bt_models, bt_grid, bt_window, bt_out);
    } catch (const addmar::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const addmar::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const addmar::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const addmar::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}

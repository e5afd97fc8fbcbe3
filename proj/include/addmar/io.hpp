#pragma once

// File formats: the long-format series table (CSV), the model document
// (JSON), and simulation configuration parsing.  Writers emit byte-stable
// output; parsers validate exhaustively and report the first offense.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "addmar/datagen.hpp"
#include "addmar/errors.hpp"
#include "addmar/types.hpp"

namespace addmar {

namespace detail {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading " + path);
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing " + path);
}

// Round-trip-safe decimal rendering (17 significant digits).
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline long parse_long_field(std::string_view field, long line) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
    if (ec != std::errc{} || ptr != field.end())
        throw ParseError("expected an integer, got '" + std::string(field) + "'", line);
    return value;
}

inline double parse_double_field(std::string_view field, long line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
    if (ec != std::errc{} || ptr != field.end())
        throw ParseError("expected a number, got '" + std::string(field) + "'", line);
    if (!std::isfinite(value))
        throw ParseError("value must be finite, got '" + std::string(field) + "'", line);
    return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SeriesFile: header "t,i,j,value", one row per cell, complete lattice
// ---------------------------------------------------------------------------

// Renders rows ascending in t, then i, then j.  `t_offset` shifts the emitted
// time indices, which lets forecasts append to an existing timeline.
inline std::string to_csv(const MatrixSeries& series, Index t_offset = 0) {
    if (series.data.empty())
        throw std::invalid_argument("to_csv: series must be nonempty");
    const Index d1 = series.rows(), d2 = series.cols();
    std::string out = "t,i,j,value\n";
    for (Index t = 0; t < series.size(); ++t) {
        const Matrix& y = series.data[static_cast<std::size_t>(t)];
        if (y.rows() != d1 || y.cols() != d2)
            throw DimensionError("to_csv: observations must share one shape");
        for (Index i = 0; i < d1; ++i) {
            for (Index j = 0; j < d2; ++j) {
                if (!std::isfinite(y(i, j)))
                    throw std::invalid_argument("to_csv: values must be finite");
                out += std::to_string(t_offset + t);
                out += ',';
                out += std::to_string(i);
                out += ',';
                out += std::to_string(j);
                out += ',';
                out += detail::format_value(y(i, j));
                out += '\n';
            }
        }
    }
    return out;
}

inline void write_series(const std::string& path, const MatrixSeries& series,
                         Index t_offset = 0) {
    detail::write_text_file(path, to_csv(series, t_offset));
}

inline MatrixSeries parse_series(const std::string& path) {
    const std::string text = detail::read_text_file(path);

    struct Row {
        long t, i, j;
        double v;
        long line;
    };
    std::vector<Row> rows;
    bool header_seen = false;
    long line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (nl == std::string::npos ? text.size() : nl) - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (!header_seen) {
            if (line != "t,i,j,value")
                throw ParseError("expected header 't,i,j,value'", line_no);
            header_seen = true;
            continue;
        }

        std::string_view fields[4];
        std::size_t start = 0;
        int n_fields = 0;
        for (std::size_t k = 0; k <= line.size(); ++k) {
            if (k == line.size() || line[k] == ',') {
                if (n_fields == 4)
                    throw ParseError("expected 4 comma-separated fields", line_no);
                fields[n_fields++] = line.substr(start, k - start);
                start = k + 1;
            }
        }
        if (n_fields != 4) throw ParseError("expected 4 comma-separated fields", line_no);

        Row r;
        r.t = detail::parse_long_field(fields[0], line_no);
        r.i = detail::parse_long_field(fields[1], line_no);
        r.j = detail::parse_long_field(fields[2], line_no);
        r.v = detail::parse_double_field(fields[3], line_no);
        r.line = line_no;
        if (r.t < 0 || r.i < 0 || r.j < 0)
            throw ParseError("indices must be non-negative", line_no);
        rows.push_back(r);
    }
    if (!header_seen) throw ParseError("empty file: expected header 't,i,j,value'", 1);
    if (rows.empty()) throw ParseError("no data rows after the header");

    long max_t = 0, max_i = 0, max_j = 0;
    for (const Row& r : rows) {
        max_t = std::max(max_t, r.t);
        max_i = std::max(max_i, r.i);
        max_j = std::max(max_j, r.j);
    }
    const long T = max_t + 1, d1 = max_i + 1, d2 = max_j + 1;
    if (d1 > 100000 || d2 > 100000 || max_t > (1L << 40))
        throw ParseError("index range implausibly large for a dense series file");

    const auto key = [d1, d2](long t, long i, long j) {
        return (t * d1 + i) * d2 + j;
    };
    std::unordered_set<long> seen;
    seen.reserve(rows.size() * 2);
    for (const Row& r : rows) {
        if (!seen.insert(key(r.t, r.i, r.j)).second)
            throw ParseError("duplicate cell (t=" + std::to_string(r.t) +
                                 ", i=" + std::to_string(r.i) +
                                 ", j=" + std::to_string(r.j) + ")",
                             r.line);
    }
    // Every slot before the first gap is occupied, so this probe loop runs at
    // most rows.size() + 1 times before it either finds the gap or finishes.
    if (static_cast<long>(rows.size()) != T * d1 * d2) {
        for (long t = 0; t < T; ++t)
            for (long i = 0; i < d1; ++i)
                for (long j = 0; j < d2; ++j)
                    if (!seen.count(key(t, i, j)))
                        throw ParseError("missing cell (t=" + std::to_string(t) +
                                         ", i=" + std::to_string(i) +
                                         ", j=" + std::to_string(j) + ")");
    }

    MatrixSeries out;
    out.data.assign(static_cast<std::size_t>(T), Matrix::Zero(d1, d2));
    for (const Row& r : rows)
        out.data[static_cast<std::size_t>(r.t)](r.i, r.j) = r.v;
    return out;
}

// ---------------------------------------------------------------------------
// ModelFile (JSON, format_version 1)
// ---------------------------------------------------------------------------

struct ModelFile {
    AdditiveMarParams params;
    Penalties penalties{};
    int outer_iters = 0;
    bool converged = false;
    double objective = 0.0;
};

namespace detail {

using nlohmann::json;

inline void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                        const char* ctx) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok)
            throw ParseError(std::string(ctx) + ": unknown key '" + item.key() + "'");
    }
}

inline const json& require_key(const json& obj, const char* name, const char* ctx) {
    const auto it = obj.find(name);
    if (it == obj.end())
        throw ParseError(std::string(ctx) + ": missing key '" + name + "'");
    return *it;
}

inline double get_finite(const json& v, const char* what) {
    if (!v.is_number())
        throw ParseError(std::string(what) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(std::string(what) + " must be finite");
    return d;
}

inline long get_integer(const json& v, const char* what) {
    if (!v.is_number_integer())
        throw ParseError(std::string(what) + " must be an integer");
    return v.get<long>();
}

inline std::vector<double> flat_rowmajor(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

inline Matrix unflat_rowmajor(const json& arr, Index d, const char* name) {
    if (!arr.is_array())
        throw ParseError(std::string(name) + " must be a flat array");
    if (static_cast<Index>(arr.size()) != d * d)
        throw ParseError(std::string(name) + " must hold exactly " +
                         std::to_string(d * d) + " values");
    Matrix m(d, d);
    Index k = 0;
    for (const auto& v : arr) {
        m(k / d, k % d) = get_finite(v, name);
        ++k;
    }
    return m;
}

}  // namespace detail

inline void write_model(const std::string& path, const ModelFile& m) {
    check_square(m.params.S1, m.params.L1.rows(), "write_model: S1");
    check_square(m.params.S2, m.params.L2.rows(), "write_model: S2");
    detail::json j;
    j["format_version"] = 1;
    j["d1"] = m.params.L1.rows();
    j["d2"] = m.params.L2.rows();
    j["L1"] = detail::flat_rowmajor(m.params.L1);
    j["S1"] = detail::flat_rowmajor(m.params.S1);
    j["L2"] = detail::flat_rowmajor(m.params.L2);
    j["S2"] = detail::flat_rowmajor(m.params.S2);
    j["penalties"] = {{"lambda_l1", m.penalties.lambda_l1},
                      {"lambda_s1", m.penalties.lambda_s1},
                      {"lambda_l2", m.penalties.lambda_l2},
                      {"lambda_s2", m.penalties.lambda_s2}};
    j["solver"] = {{"outer_iters", m.outer_iters},
                   {"converged", m.converged},
                   {"objective", m.objective}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline ModelFile parse_model(const std::string& path) {
    const std::string text = detail::read_text_file(path);
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw ParseError(std::string("invalid model document: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("model document must be an object");
    detail::expect_keys(j,
                        {"format_version", "d1", "d2", "L1", "S1", "L2", "S2",
                         "penalties", "solver"},
                        "ModelFile");

    const long version =
        detail::get_integer(detail::require_key(j, "format_version", "ModelFile"),
                            "format_version");
    if (version != 1)
        throw ParseError("unsupported format_version " + std::to_string(version));

    const long d1 = detail::get_integer(detail::require_key(j, "d1", "ModelFile"), "d1");
    const long d2 = detail::get_integer(detail::require_key(j, "d2", "ModelFile"), "d2");
    if (d1 < 1 || d2 < 1) throw ParseError("d1 and d2 must be positive");

    ModelFile out;
    out.params.L1 =
        detail::unflat_rowmajor(detail::require_key(j, "L1", "ModelFile"), d1, "L1");
    out.params.S1 =
        detail::unflat_rowmajor(detail::require_key(j, "S1", "ModelFile"), d1, "S1");
    out.params.L2 =
        detail::unflat_rowmajor(detail::require_key(j, "L2", "ModelFile"), d2, "L2");
    out.params.S2 =
        detail::unflat_rowmajor(detail::require_key(j, "S2", "ModelFile"), d2, "S2");

    const detail::json& pen = detail::require_key(j, "penalties", "ModelFile");
    if (!pen.is_object()) throw ParseError("penalties must be an object");
    detail::expect_keys(pen, {"lambda_l1", "lambda_s1", "lambda_l2", "lambda_s2"},
                        "penalties");
    out.penalties.lambda_l1 =
        detail::get_finite(detail::require_key(pen, "lambda_l1", "penalties"), "lambda_l1");
    out.penalties.lambda_s1 =
        detail::get_finite(detail::require_key(pen, "lambda_s1", "penalties"), "lambda_s1");
    out.penalties.lambda_l2 =
        detail::get_finite(detail::require_key(pen, "lambda_l2", "penalties"), "lambda_l2");
    out.penalties.lambda_s2 =
        detail::get_finite(detail::require_key(pen, "lambda_s2", "penalties"), "lambda_s2");
    validate(out.penalties);

    const detail::json& sol = detail::require_key(j, "solver", "ModelFile");
    if (!sol.is_object()) throw ParseError("solver must be an object");
    detail::expect_keys(sol, {"outer_iters", "converged", "objective"}, "solver");
    out.outer_iters = static_cast<int>(detail::get_integer(
        detail::require_key(sol, "outer_iters", "solver"), "outer_iters"));
    if (out.outer_iters < 0) throw ParseError("outer_iters must be >= 0");
    const detail::json& conv = detail::require_key(sol, "converged", "solver");
    if (!conv.is_boolean()) throw ParseError("converged must be a boolean");
    out.converged = conv.get<bool>();
    out.objective =
        detail::get_finite(detail::require_key(sol, "objective", "solver"), "objective");
    return out;
}

// ---------------------------------------------------------------------------
// SimulationConfig (JSON)
// ---------------------------------------------------------------------------

inline SimulationConfig parse_simulation_config(const std::string& path) {
    const std::string text = detail::read_text_file(path);
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw ParseError(std::string("invalid simulation config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("simulation config must be an object");
    detail::expect_keys(j,
                        {"d1", "d2", "T", "R1", "R2", "e1", "e2", "rho_target", "seed",
                         "burn_in", "structure", "noise"},
                        "SimulationConfig");

    SimulationConfig cfg;
    cfg.d1 = detail::get_integer(detail::require_key(j, "d1", "SimulationConfig"), "d1");
    cfg.d2 = detail::get_integer(detail::require_key(j, "d2", "SimulationConfig"), "d2");
    cfg.T = detail::get_integer(detail::require_key(j, "T", "SimulationConfig"), "T");
    if (j.contains("R1")) cfg.R1 = detail::get_integer(j["R1"], "R1");
    if (j.contains("R2")) cfg.R2 = detail::get_integer(j["R2"], "R2");
    if (j.contains("e1")) cfg.e1 = detail::get_finite(j["e1"], "e1");
    if (j.contains("e2")) cfg.e2 = detail::get_finite(j["e2"], "e2");
    if (j.contains("rho_target"))
        cfg.rho_target = detail::get_finite(j["rho_target"], "rho_target");
    if (j.contains("seed")) {
        const detail::json& s = j["seed"];
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<long long>() < 0))
            throw ParseError("seed must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("burn_in")) cfg.burn_in = detail::get_integer(j["burn_in"], "burn_in");
    if (j.contains("structure")) {
        const detail::json& s = j["structure"];
        if (!s.is_string()) throw ParseError("structure must be a string");
        const std::string name = s.get<std::string>();
        if (name == "lowrank_only")
            cfg.structure = TruthStructure::lowrank_only;
        else if (name == "sparse_only")
            cfg.structure = TruthStructure::sparse_only;
        else if (name == "lowrank_plus_sparse")
            cfg.structure = TruthStructure::lowrank_plus_sparse;
        else
            throw ParseError("structure must be one of lowrank_only, sparse_only, "
                             "lowrank_plus_sparse; got '" +
                             name + "'");
    }
    if (j.contains("noise")) {
        const detail::json& n = j["noise"];
        if (!n.is_object()) throw ParseError("noise must be an object");
        detail::expect_keys(n, {"kind", "sigma", "sigma1", "sigma2"}, "noise");
        if (n.contains("kind")) {
            const detail::json& k = n["kind"];
            if (!k.is_string()) throw ParseError("noise.kind must be a string");
            const std::string name = k.get<std::string>();
            if (name == "iid")
                cfg.noise.kind = NoiseSpec::Kind::iid;
            else if (name == "kronecker_sum")
                cfg.noise.kind = NoiseSpec::Kind::kronecker_sum;
            else
                throw ParseError("noise.kind must be 'iid' or 'kronecker_sum'; got '" +
                                 name + "'");
        }
        if (n.contains("sigma")) cfg.noise.sigma = detail::get_finite(n["sigma"], "sigma");
        if (n.contains("sigma1"))
            cfg.noise.sigma1 = detail::unflat_rowmajor(n["sigma1"], cfg.d1, "sigma1");
        if (n.contains("sigma2"))
            cfg.noise.sigma2 = detail::unflat_rowmajor(n["sigma2"], cfg.d2, "sigma2");
    }
    return cfg;
}

}  // namespace addmar

#pragma once

// Panel preprocessing transforms: first differences, log differences, and
// second log differences (growth-rate changes), applied entrywise.

#include <cmath>
#include <stdexcept>
#include <string>

#include "addmar/types.hpp"

namespace addmar {

inline MatrixSeries diff(const MatrixSeries& series) {
    validate(series);
    MatrixSeries out;
    out.data.reserve(static_cast<std::size_t>(series.size() - 1));
    for (Index t = 1; t < series.size(); ++t)
        out.data.push_back(series.data[static_cast<std::size_t>(t)] -
                           series.data[static_cast<std::size_t>(t - 1)]);
    return out;
}

namespace detail {

inline MatrixSeries log_series(const MatrixSeries& series) {
    MatrixSeries out;
    out.data.reserve(series.data.size());
    for (Index t = 0; t < series.size(); ++t) {
        const Matrix& y = series.data[static_cast<std::size_t>(t)];
        for (Index i = 0; i < y.rows(); ++i)
            for (Index j = 0; j < y.cols(); ++j)
                if (!(y(i, j) > 0.0))
                    throw std::invalid_argument(
                        "log transform needs positive entries; offending cell (t=" +
                        std::to_string(t) + ", i=" + std::to_string(i) +
                        ", j=" + std::to_string(j) + ")");
        out.data.push_back(y.array().log().matrix());
    }
    return out;
}

}  // namespace detail

inline MatrixSeries diff_log(const MatrixSeries& series) {
    validate(series);
    return diff(detail::log_series(series));
}

inline MatrixSeries diff2_log(const MatrixSeries& series) {
    validate(series);
    if (series.size() < 3)
        throw std::invalid_argument("diff2_log: need at least three observations");
    return diff(diff_log(series));
}

}  // namespace addmar

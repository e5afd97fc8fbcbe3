#pragma once

// Proximal operators of the two penalties: entrywise l1 and nuclear norm.

#include "addmar/linalg.hpp"
#include "addmar/types.hpp"

namespace addmar {

// prox of tau ||.||_1: sign(m) .* max(|m| - tau, 0). Exact zeros below tau.
inline Matrix soft_threshold(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("soft_threshold: tau must be >= 0");
    if (!m.allFinite()) throw NumericError("soft_threshold: non-finite input");
    return m.unaryExpr([tau](double v) {
        const double mag = std::abs(v) - tau;
        return mag > 0.0 ? std::copysign(mag, v) : 0.0;
    });
}

struct SvtResult {
    Matrix matrix;
    // Count of singular values strictly above max(tau, numerical cutoff), so tau = 0
    // reports the numerical rank instead of counting FP noise.
    int rank = 0;
    double nuclear_norm = 0.0;  // of `matrix`; free from the thresholded spectrum
};

// prox of tau ||.||_*: soft-threshold the singular values.
inline SvtResult singular_value_threshold(const Matrix& m, double tau) {
    if (!(tau >= 0.0))
        throw std::invalid_argument("singular_value_threshold: tau must be >= 0");
    if (!m.allFinite()) throw NumericError("singular_value_threshold: non-finite input");

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();

    SvtResult out;
    const double cut = sv.size() > 0 ? std::max(tau, rank_cutoff(sv(0), m.rows(), m.cols()))
                                     : tau;
    Vector thr(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cut) ++out.rank;
        thr(i) = std::max(sv(i) - tau, 0.0);
        out.nuclear_norm += thr(i);
    }
    out.matrix = svd.matrixU() * thr.asDiagonal() * svd.matrixV().transpose();
    return out;
}

}  // namespace addmar

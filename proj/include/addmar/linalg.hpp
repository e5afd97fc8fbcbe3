#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

#include "addmar/types.hpp"

namespace addmar {

inline Vector singular_values(const Matrix& m) {
    return Eigen::BDCSVD<Matrix>(m).singularValues();
}

inline double nuclear_norm(const Matrix& m) { return singular_values(m).sum(); }

inline double l1_norm(const Matrix& m) { return m.cwiseAbs().sum(); }

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Singular values at or below sigma_max * max(rows, cols) * 1e-10 count as zero.
inline double rank_cutoff(double sigma_max, Index nrows, Index ncols) {
    return sigma_max * static_cast<double>(std::max(nrows, ncols)) * 1e-10;
}

// Largest eigenvalue of a symmetric PSD matrix (Gram matrices, covariances).
inline double spectral_max(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Column-stacking vec and its inverse; the convention everywhere in this codebase.
inline Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Index nrows, Index ncols) {
    if (v.size() != nrows * ncols) throw DimensionError("unvec: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), nrows, ncols);
}

}  // namespace addmar

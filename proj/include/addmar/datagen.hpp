#pragma once

// Synthetic data generation for additive matrix autoregressions: structured
// truth draws (low-rank, sparse), joint spectral-radius control, separable
// noise, and full trajectory simulation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "addmar/errors.hpp"
#include "addmar/linalg.hpp"
#include "addmar/rng.hpp"
#include "addmar/types.hpp"

namespace addmar {

// ---------------------------------------------------------------------------
// Noise specification
// ---------------------------------------------------------------------------

struct NoiseSpec {
    enum class Kind { iid, kronecker_sum };

    Kind kind = Kind::kronecker_sum;

    // iid: every entry N(0, sigma^2).
    double sigma = 1.0;

    // kronecker_sum: vec(E) ~ N(0, Sigma) with
    //   Sigma = sigma1 (x) I_{d2} + I_{d1} (x) sigma2   (column-stacked vec).
    // Empty factors default to 0.5 * I, giving Sigma = I.
    Matrix sigma1;
    Matrix sigma2;
};

enum class TruthStructure { lowrank_only, sparse_only, lowrank_plus_sparse };

struct SimulationConfig {
    Index d1 = 0;
    Index d2 = 0;
    Index T = 0;

    // Ranks of the low-rank components and densities of the sparse ones.
    Index R1 = 0;
    Index R2 = 0;
    double e1 = 0.0;
    double e2 = 0.0;

    double rho_target = 0.8;
    NoiseSpec noise;
    std::uint64_t seed = 1;
    Index burn_in = 200;
    TruthStructure structure = TruthStructure::lowrank_plus_sparse;
};

inline void validate(const SimulationConfig& cfg) {
    if (cfg.d1 < 1 || cfg.d2 < 1)
        throw std::invalid_argument("simulate: dimensions must be positive");
    if (cfg.T < 2) throw std::invalid_argument("simulate: need T >= 2");
    if (cfg.R1 < 0 || cfg.R1 > cfg.d1 || cfg.R2 < 0 || cfg.R2 > cfg.d2)
        throw std::invalid_argument("simulate: rank must lie in [0, d]");
    if (!(cfg.e1 >= 0.0 && cfg.e1 <= 1.0) || !(cfg.e2 >= 0.0 && cfg.e2 <= 1.0))
        throw std::invalid_argument("simulate: density must lie in [0, 1]");
    if (!(cfg.rho_target > 0.0 && cfg.rho_target < 1.0))
        throw std::invalid_argument("simulate: rho_target must lie in (0, 1)");
    if (cfg.burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
}

// ---------------------------------------------------------------------------
// Structured truth components
// ---------------------------------------------------------------------------

// Random d x d matrix of exact rank r: draw entries U(0,1), factor, and zero
// out d - r randomly chosen singular values.  The draw count is independent
// of r so different ranks at the same seed share the underlying factors.
inline Matrix gen_lowrank(Index d, Index r, Rng& rng) {
    if (d < 1) throw std::invalid_argument("gen_lowrank: dimension must be positive");
    if (r < 0 || r > d) throw std::invalid_argument("gen_lowrank: rank must lie in [0, d]");

    Matrix base(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) base(i, j) = rng.uniform01();

    Eigen::BDCSVD<Matrix> svd(base, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();

    std::vector<Index> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    rng.shuffle(idx);
    for (Index k = 0; k < d - r; ++k) sv(idx[static_cast<std::size_t>(k)]) = 0.0;

    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

// Random d x d sparse matrix: round(e * d^2) uniformly chosen positions with
// magnitudes U(0.1, 1) and independent random signs.
inline Matrix gen_sparse(Index d, double e, Rng& rng) {
    if (d < 1) throw std::invalid_argument("gen_sparse: dimension must be positive");
    if (!(e >= 0.0 && e <= 1.0))
        throw std::invalid_argument("gen_sparse: density must lie in [0, 1]");

    const Index cells = d * d;
    const Index nnz = static_cast<Index>(std::llround(e * static_cast<double>(cells)));

    std::vector<Index> idx(static_cast<std::size_t>(cells));
    std::iota(idx.begin(), idx.end(), Index{0});
    rng.shuffle(idx);

    Matrix m = Matrix::Zero(d, d);
    for (Index k = 0; k < nnz; ++k) {
        const Index cell = idx[static_cast<std::size_t>(k)];
        const double mag = 0.1 + 0.9 * rng.uniform01();
        m(cell % d, cell / d) = rng.coin() ? mag : -mag;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Stationarity control
// ---------------------------------------------------------------------------

// Spectral radius of I_{d2} (x) A + B (x) I_{d1}, the vectorized one-step
// map.  Its eigenvalues are exactly the pairwise sums a_i + b_j of the
// eigenvalues of A and B, so no Kronecker product is ever formed.
inline double kron_sum_spectral_radius(const Matrix& a, const Matrix& b) {
    check_square(a, a.rows(), "kron_sum_spectral_radius: row map");
    check_square(b, b.rows(), "kron_sum_spectral_radius: column map");

    Eigen::EigenSolver<Matrix> ea(a, /*computeEigenvectors=*/false);
    Eigen::EigenSolver<Matrix> eb(b, /*computeEigenvectors=*/false);
    if (ea.info() != Eigen::Success || eb.info() != Eigen::Success)
        throw NumericError("kron_sum_spectral_radius: eigendecomposition failed");

    double radius = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.rows(); ++j)
            radius = std::max(radius, std::abs(ea.eigenvalues()(i) + eb.eigenvalues()(j)));
    return radius;
}

// Common shrink factor c = min(1, rho_target / rho).  Scaling both maps by c
// scales every eigenvalue sum by c, so the joint radius lands exactly on the
// target when shrinking is needed and nothing moves otherwise.
inline double stabilize_factor(const Matrix& a, const Matrix& b, double rho_target) {
    if (!(rho_target > 0.0 && rho_target <= 1.0))
        throw std::invalid_argument("stabilize: rho_target must lie in (0, 1]");
    const double rho = kron_sum_spectral_radius(a, b);
    if (rho <= rho_target) return 1.0;
    return rho_target / rho;
}

inline std::pair<Matrix, Matrix> stabilize(const Matrix& a, const Matrix& b,
                                           double rho_target) {
    const double c = stabilize_factor(a, b, rho_target);
    if (c == 1.0) return {a, b};
    return {c * a, c * b};
}

// ---------------------------------------------------------------------------
// Noise sampling
// ---------------------------------------------------------------------------

class NoiseSampler {
  public:
    NoiseSampler(const NoiseSpec& spec, Index d1, Index d2)
        : d1_(d1), d2_(d2), kind_(spec.kind), sigma_(spec.sigma) {
        if (d1 < 1 || d2 < 1)
            throw std::invalid_argument("NoiseSampler: dimensions must be positive");
        if (kind_ == NoiseSpec::Kind::iid) {
            if (!(sigma_ >= 0.0))
                throw std::invalid_argument("NoiseSampler: sigma must be >= 0");
            return;
        }

        const Matrix s1 = spec.sigma1.size() != 0
                              ? spec.sigma1
                              : Matrix(0.5 * Matrix::Identity(d1, d1));
        const Matrix s2 = spec.sigma2.size() != 0
                              ? spec.sigma2
                              : Matrix(0.5 * Matrix::Identity(d2, d2));
        check_square(s1, d1, "NoiseSampler: sigma1");
        check_square(s2, d2, "NoiseSampler: sigma2");
        require_symmetric(s1, "sigma1");
        require_symmetric(s2, "sigma2");

        const Matrix cov =
            kron(s1, Matrix::Identity(d2, d2)) + kron(Matrix::Identity(d1, d1), s2);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        if (es.info() != Eigen::Success)
            throw NumericError("NoiseSampler: eigendecomposition failed");

        Vector lam = es.eigenvalues();
        const double floor = -1e-10 * std::max(1.0, std::abs(lam(lam.size() - 1)));
        for (Index i = 0; i < lam.size(); ++i) {
            if (lam(i) < floor)
                throw std::invalid_argument(
                    "NoiseSampler: covariance is not positive semidefinite");
            lam(i) = std::sqrt(std::max(lam(i), 0.0));
        }
        factor_ = es.eigenvectors() * lam.asDiagonal();
    }

    Matrix draw(Rng& rng) const {
        if (kind_ == NoiseSpec::Kind::iid) {
            Matrix e(d1_, d2_);
            for (Index j = 0; j < d2_; ++j)
                for (Index i = 0; i < d1_; ++i) e(i, j) = sigma_ * rng.normal();
            return e;
        }
        Vector z(d1_ * d2_);
        for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        return unvec(factor_ * z, d1_, d2_);
    }

  private:
    static void require_symmetric(const Matrix& s, const char* name) {
        const double gap = (s - s.transpose()).cwiseAbs().maxCoeff();
        if (gap > 1e-8 * std::max(1.0, max_abs(s)))
            throw std::invalid_argument(std::string("NoiseSampler: ") + name +
                                        " must be symmetric");
    }

    Index d1_;
    Index d2_;
    NoiseSpec::Kind kind_;
    double sigma_;
    Matrix factor_;  // Sigma^{1/2}, only for kronecker_sum
};

inline Matrix sample_noise(const NoiseSpec& spec, Index d1, Index d2, Rng& rng) {
    return NoiseSampler(spec, d1, d2).draw(rng);
}

// ---------------------------------------------------------------------------
// Trajectory simulation
// ---------------------------------------------------------------------------

struct SimulationResult {
    MatrixSeries series;
    AdditiveMarParams truth;
};

// Draws structured truth, rescales it onto the target joint spectral radius,
// and iterates the recursion from zero through a burn-in before recording T
// observations.  Truth components and noise use separate, independently
// seeded streams, so changing one leaves the others' draws intact.
inline SimulationResult simulate(const SimulationConfig& cfg) {
    validate(cfg);

    const bool with_lowrank = cfg.structure != TruthStructure::sparse_only;
    const bool with_sparse = cfg.structure != TruthStructure::lowrank_only;

    Rng rng_lowrank(cfg.seed, RngStream::truth_lowrank);
    Rng rng_sparse(cfg.seed, RngStream::truth_sparse);
    Rng rng_noise(cfg.seed, RngStream::noise);

    AdditiveMarParams truth = AdditiveMarParams::Zero(cfg.d1, cfg.d2);
    if (with_lowrank) {
        truth.L1 = gen_lowrank(cfg.d1, cfg.R1, rng_lowrank);
        truth.L2 = gen_lowrank(cfg.d2, cfg.R2, rng_lowrank);
    }
    if (with_sparse) {
        truth.S1 = gen_sparse(cfg.d1, cfg.e1, rng_sparse);
        truth.S2 = gen_sparse(cfg.d2, cfg.e2, rng_sparse);
    }

    const double c = stabilize_factor(truth.row_map(), truth.col_map(), cfg.rho_target);
    truth.L1 *= c;
    truth.S1 *= c;
    truth.L2 *= c;
    truth.S2 *= c;

    const Matrix a = truth.row_map();
    const Matrix bt = truth.col_map().transpose();
    NoiseSampler sampler(cfg.noise, cfg.d1, cfg.d2);

    Matrix y = Matrix::Zero(cfg.d1, cfg.d2);
    for (Index t = 0; t < cfg.burn_in; ++t)
        y = a * y + y * bt + sampler.draw(rng_noise);

    SimulationResult out;
    out.truth = std::move(truth);
    out.series.data.reserve(static_cast<std::size_t>(cfg.T));
    out.series.data.push_back(y);
    for (Index t = 1; t < cfg.T; ++t) {
        y = a * y + y * bt + sampler.draw(rng_noise);
        out.series.data.push_back(y);
    }
    return out;
}

}  // namespace addmar

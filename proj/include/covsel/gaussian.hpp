#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "covsel/dataset.hpp"
#include "covsel/rng.hpp"

namespace covsel {

/// Covariance estimate (or exact covariance) with the sample size that
/// produced it; n_source = 0 marks an exact/true matrix.
struct CovarianceMatrix {
  Matrix s;
  int n_source = 0;

  int p() const { return static_cast<int>(s.rows()); }
};

/// A positive-definite covariance and its precision, kept consistent.
struct SpdPair {
  Matrix sigma;
  Matrix kappa;

  int p() const { return static_cast<int>(sigma.rows()); }

  static SpdPair from_sigma(Matrix sigma);
  static SpdPair from_kappa(Matrix kappa);
};

inline Matrix symmetrized(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

/// log det of a symmetric positive-definite matrix via Cholesky
/// (2 * sum of log diagonal of the factor). Throws if not PD.
inline double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_det_spd: matrix is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline Matrix spd_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("spd_inverse: matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return symmetrized(inv);
}

inline SpdPair SpdPair::from_sigma(Matrix sigma) {
  SpdPair out;
  out.kappa = spd_inverse(sigma);
  out.sigma = std::move(sigma);
  return out;
}

inline SpdPair SpdPair::from_kappa(Matrix kappa) {
  SpdPair out;
  out.sigma = spd_inverse(kappa);
  out.kappa = std::move(kappa);
  return out;
}

/// (1/n) X^T X of the column-centered data. Centering is always applied;
/// the result is symmetric PSD.
inline CovarianceMatrix empirical_covariance(const Dataset& data) {
  data.validate();
  const int n = data.n();
  Matrix centered = data.values.rowwise() - data.values.colwise().mean();
  CovarianceMatrix out;
  out.s = symmetrized((centered.transpose() * centered) / double(n));
  out.n_source = n;
  return out;
}

/// Gaussian cross-entropy 0.5 * (<ref, kappa> - log det kappa); the
/// (p/2) log(2 pi) constant is dropped throughout, so values are
/// comparable only at fixed p.
inline double cross_entropy(const Matrix& ref, const SpdPair& model) {
  if (ref.rows() != model.sigma.rows())
    throw std::invalid_argument("cross_entropy: dimension mismatch");
  const double dot = (ref.array() * model.kappa.array()).sum();
  return 0.5 * (dot - log_det_spd(model.kappa));
}

inline double cross_entropy(const CovarianceMatrix& ref, const SpdPair& model) {
  return cross_entropy(ref.s, model);
}

inline double kl_divergence(const SpdPair& truth, const SpdPair& model) {
  return cross_entropy(truth.sigma, model) - cross_entropy(truth.sigma, truth);
}

/// n i.i.d. draws from N(0, sigma), via the Cholesky factor applied to
/// standard normals. Deterministic for a given seed.
inline Dataset sample_gaussian(const SpdPair& model, int n,
                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_gaussian: n must be >= 1");
  Eigen::LLT<Matrix> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_gaussian: sigma is not positive definite");
  const Matrix l = llt.matrixL();
  const int p = model.p();
  Rng rng(seed);
  Matrix x(n, p);
  Vector z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    x.row(i) = (l * z).transpose();
  }
  return Dataset::from_matrix(std::move(x));
}

// --- validation helpers (used by tests and I/O) ---

inline bool is_symmetric(const Matrix& m, double tol = 1e-10) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline void validate_spd_pair(const SpdPair& pair, double inv_tol = 1e-8,
                              double sym_tol = 1e-10) {
  if (!is_symmetric(pair.sigma, sym_tol) || !is_symmetric(pair.kappa, sym_tol))
    throw std::invalid_argument("SpdPair: matrices are not symmetric");
  const Matrix prod = pair.sigma * pair.kappa;
  if ((prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() >
      inv_tol)
    throw std::invalid_argument("SpdPair: sigma * kappa differs from identity");
  if (min_eigenvalue(pair.sigma) <= 0.0)
    throw std::invalid_argument("SpdPair: sigma is not positive definite");
}

}  // namespace covsel

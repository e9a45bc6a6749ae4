#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "covsel/dataset.hpp"

namespace covsel {

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Cyclic coordinate descent for
///     min_beta  0.5 beta' Q beta - b' beta + rho ||beta||_1
/// with Q symmetric positive (semi-)definite with strictly positive
/// diagonal. Soft-thresholding produces exact zeros.
inline Vector lasso_cd(const Matrix& q, const Vector& b, double rho,
                       Vector beta, double tol = 1e-9, int max_iter = 1000) {
  const int m = static_cast<int>(b.size());
  if (beta.size() != m) beta = Vector::Zero(m);
  Vector qbeta = q * beta;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_change = 0.0;
    for (int k = 0; k < m; ++k) {
      const double old = beta(k);
      const double gradient_part = b(k) - (qbeta(k) - q(k, k) * old);
      const double updated = soft_threshold(gradient_part, rho) / q(k, k);
      if (updated != old) {
        beta(k) = updated;
        qbeta += (updated - old) * q.col(k);
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change <= tol) break;
  }
  return beta;
}

}  // namespace covsel

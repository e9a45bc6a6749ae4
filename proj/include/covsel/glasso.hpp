#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "covsel/gaussian.hpp"
#include "covsel/graph.hpp"
#include "covsel/lasso.hpp"
#include "covsel/mle.hpp"

namespace covsel {

struct GlassoConfig {
  double rho = 0.1;
  double tol = 1e-5;    // on the mean absolute change of sigma per sweep
  int max_iter = 200;
  double ridge = 1e-6;  // added to S before solving; the diagonal itself
                        // is unpenalized

  void validate() const {
    if (rho < 0.0) throw std::invalid_argument("GlassoConfig: rho must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("GlassoConfig: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("GlassoConfig: max_iter must be >= 1");
  }
};

struct GlassoSolution {
  SpdPair model;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // last sweep's mean absolute sigma change
};

namespace detail {

struct GlassoState {
  Matrix w;     // current covariance iterate
  Matrix beta;  // column j holds the lasso coefficients for vertex j
};

inline GlassoSolution glasso_core(const Matrix& s_ridged, double rho,
                                  double tol, int max_iter,
                                  GlassoState& state) {
  const int p = static_cast<int>(s_ridged.rows());
  Matrix& w = state.w;
  Matrix& beta = state.beta;

  GlassoSolution out;
  std::vector<int> others(static_cast<std::size_t>(p - 1));
  Matrix w11(p - 1, p - 1);
  Vector s12(p - 1), beta_j(p - 1), w12(p - 1);

  auto column_pass = [&](int j, bool update_w) {
    int idx = 0;
    for (int i = 0; i < p; ++i)
      if (i != j) others[static_cast<std::size_t>(idx++)] = i;
    for (int a = 0; a < p - 1; ++a) {
      const int ia = others[static_cast<std::size_t>(a)];
      s12(a) = s_ridged(ia, j);
      beta_j(a) = beta(ia, j);
      for (int b = 0; b < p - 1; ++b)
        w11(a, b) = w(ia, others[static_cast<std::size_t>(b)]);
    }
    beta_j = lasso_cd(w11, s12, rho, beta_j);
    for (int a = 0; a < p - 1; ++a)
      beta(others[static_cast<std::size_t>(a)], j) = beta_j(a);
    if (update_w) {
      w12 = w11 * beta_j;
      for (int a = 0; a < p - 1; ++a) {
        const int ia = others[static_cast<std::size_t>(a)];
        w(ia, j) = w12(a);
        w(j, ia) = w12(a);
      }
    }
  };

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Matrix w_before = w;
    for (int j = 0; j < p; ++j) column_pass(j, true);
    out.iterations = iter;
    out.residual = (w - w_before).cwiseAbs().mean();
    if (out.residual <= tol) {
      out.converged = true;
      break;
    }
  }

  // recompute every column's coefficients against the final iterate, so
  // the extracted precision is consistent with one single w
  for (int j = 0; j < p; ++j) column_pass(j, false);

  Matrix kappa = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    double dot = 0.0;
    for (int i = 0; i < p; ++i)
      if (i != j) dot += w(i, j) * beta(i, j);
    const double schur = w(j, j) - dot;
    if (!(schur > 0.0))
      throw std::runtime_error("glasso_solve: lost positive definiteness");
    const double kjj = 1.0 / schur;
    kappa(j, j) = kjj;
    for (int i = 0; i < p; ++i)
      if (i != j) kappa(i, j) = -beta(i, j) * kjj;
  }
  // a coefficient is kept only when both of its directed regressions
  // kept it; borderline one-sided survivors are solver noise
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      if (kappa(i, j) == 0.0 || kappa(j, i) == 0.0) {
        kappa(i, j) = kappa(j, i) = 0.0;
      } else {
        const double v = 0.5 * (kappa(i, j) + kappa(j, i));
        kappa(i, j) = kappa(j, i) = std::abs(v) > 1e-8 ? v : 0.0;
      }
    }

  out.model.sigma = spd_inverse(kappa);
  out.model.kappa = std::move(kappa);
  return out;
}

}  // namespace detail

/// Block coordinate descent for the l1-penalized Gaussian likelihood
/// (the classical GLASSO scheme): sweep over columns, each one a lasso
/// subproblem on the current covariance iterate. The diagonal is not
/// penalized; a small ridge is added to S up front so low-penalty solves
/// stay well-posed. At the solution, |s_ij - sigma_ij| <= rho off the
/// diagonal with equality (and matching sign of kappa_ij) on nonzeros,
/// and sigma_ii = s_ii + ridge.
inline GlassoSolution glasso_solve(const CovarianceMatrix& s,
                                   const GlassoConfig& cfg) {
  cfg.validate();
  const int p = s.p();
  const Matrix s_ridged = s.s + cfg.ridge * Matrix::Identity(p, p);
  detail::GlassoState state{s_ridged, Matrix::Zero(p, p)};
  return detail::glasso_core(s_ridged, cfg.rho, cfg.tol, cfg.max_iter, state);
}

struct KktReport {
  double max_stationarity_violation = 0.0;  // includes the diagonal match
  double max_sign_violation = 0.0;  // |sigma_ij - s_ij - rho sign(kappa_ij)|
                                    // over nonzero kappa_ij
};

/// Stationarity certificate for a reported solution, checked against the
/// ridged input matrix. Independent of how the solution was produced.
inline KktReport glasso_kkt(const Matrix& s_ridged, const SpdPair& model,
                            double rho, double zero_tol = 1e-8) {
  const int p = static_cast<int>(s_ridged.rows());
  KktReport report;
  for (int i = 0; i < p; ++i) {
    report.max_stationarity_violation =
        std::max(report.max_stationarity_violation,
                 std::abs(model.sigma(i, i) - s_ridged(i, i)));
    for (int j = i + 1; j < p; ++j) {
      const double diff = model.sigma(i, j) - s_ridged(i, j);
      if (std::abs(model.kappa(i, j)) > zero_tol) {
        const double sign = model.kappa(i, j) > 0.0 ? 1.0 : -1.0;
        report.max_sign_violation =
            std::max(report.max_sign_violation, std::abs(diff - rho * sign));
      } else {
        report.max_stationarity_violation = std::max(
            report.max_stationarity_violation, std::abs(diff) - rho);
      }
    }
  }
  return report;
}

struct PathPoint {
  double rho = 0.0;
  SpdPair raw;
  bool raw_converged = false;
  Graph graph;
  MleFit refit;
};

/// Log-spaced penalty grid from max |s_ij| (everything thresholded) down
/// two decades.
inline std::vector<double> default_rho_grid(const CovarianceMatrix& s,
                                            int count = 20) {
  const int p = s.p();
  double top = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) top = std::max(top, std::abs(s.s(i, j)));
  if (top <= 0.0) top = 1.0;
  std::vector<double> rhos;
  const double bottom = top / 100.0;
  for (int k = 0; k < count; ++k) {
    const double f = count == 1 ? 0.0 : double(k) / double(count - 1);
    rhos.push_back(top * std::exp(std::log(bottom / top) * f));
  }
  return rhos;
}

/// Solve a descending penalty path with warm starts; each point also
/// carries the graph read off the penalized precision and its
/// constrained-MLE refit on that graph.
inline std::vector<PathPoint> glasso_path(const CovarianceMatrix& s,
                                          std::vector<double> rhos,
                                          const MleConfig& mle_cfg,
                                          const GlassoConfig& base_cfg = {}) {
  if (rhos.empty())
    throw std::invalid_argument("glasso_path: empty penalty grid");
  for (double r : rhos)
    if (!(r > 0.0))
      throw std::invalid_argument("glasso_path: penalties must be positive");
  std::sort(rhos.begin(), rhos.end(), std::greater<>());

  const int p = s.p();
  const Matrix s_ridged = s.s + base_cfg.ridge * Matrix::Identity(p, p);
  detail::GlassoState state{s_ridged, Matrix::Zero(p, p)};

  std::vector<PathPoint> path;
  const MleFit* warm = nullptr;
  for (double rho : rhos) {
    PathPoint point;
    point.rho = rho;
    GlassoSolution sol =
        detail::glasso_core(s_ridged, rho, base_cfg.tol, base_cfg.max_iter, state);
    point.raw = std::move(sol.model);
    point.raw_converged = sol.converged;
    point.graph = graph_of_precision(point.raw.kappa);
    point.refit = constrained_mle(s, point.graph, mle_cfg,
                                  warm != nullptr ? &warm->model : nullptr);
    path.push_back(std::move(point));
    warm = &path.back().refit;
  }
  return path;
}

}  // namespace covsel

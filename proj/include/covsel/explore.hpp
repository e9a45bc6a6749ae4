#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covsel/dataset.hpp"
#include "covsel/gaussian.hpp"
#include "covsel/graph.hpp"
#include "covsel/lasso.hpp"
#include "covsel/mle.hpp"
#include "covsel/rng.hpp"

namespace covsel {

struct SplitConfig {
  double validation_fraction = 0.3;  // train -> validation / exploration
  double evaluation_fraction = 0.3;  // exploration -> learning / evaluation,
                                     // re-drawn every step
  std::uint64_t seed = 0;

  void validate() const {
    if (!(validation_fraction > 0.05 && validation_fraction < 0.5))
      throw std::invalid_argument(
          "SplitConfig: validation_fraction must be in (0.05, 0.5)");
    if (!(evaluation_fraction > 0.05 && evaluation_fraction < 0.5))
      throw std::invalid_argument(
          "SplitConfig: evaluation_fraction must be in (0.05, 0.5)");
  }
};

// size of the held-out part; both parts must keep at least 2 rows
inline int split_size(int n, double fraction) {
  int k = static_cast<int>(std::lround(fraction * n));
  k = std::max(k, 2);
  if (n - k < 2)
    throw std::invalid_argument("split: not enough observations to split");
  return k;
}

struct InitConfig {
  enum class Method { Nodewise, File };
  Method method = Method::Nodewise;
  double penalty_multiplier = 1.0;
  std::string path;  // edge-list file, for Method::File

  void validate() const {
    if (!(penalty_multiplier > 0.0))
      throw std::invalid_argument("InitConfig: penalty_multiplier must be > 0");
  }
};

struct StepLog {
  int t = 0;
  std::vector<int> learning_rows;    // original row indices
  std::vector<int> evaluation_rows;
  bool mutual = false;               // candidates are mutual selections
  std::vector<Edge> candidates;
  std::vector<double> scores;        // evaluation CE per candidate
  Edge chosen{-1, -1};
};

/// Nested family of graphs produced by the composite loop, with the
/// exploration-set MLE of every graph and a full per-step audit trail.
struct ExplorationTrace {
  int p = 0;
  std::vector<Graph> graphs;
  std::vector<MleFit> fits;
  std::vector<StepLog> step_logs;
  std::vector<int> validation_rows;
  std::vector<int> exploration_rows;
};

namespace detail {

inline Matrix centered_columns(const Matrix& x) {
  return x.rowwise() - x.colwise().mean();
}

inline Vector column_sd(const Matrix& centered) {
  return (centered.array().square().colwise().sum() / double(centered.rows()))
      .sqrt()
      .transpose();
}

}  // namespace detail

/// Least-squares residual of one column on a set of neighbour columns,
/// all centered first. Rank-deficient neighbourhoods (possible whenever
/// |neighbors| >= n) fall back to the minimum-norm solution, with
/// singular values below 1e-10 of the largest treated as zero.
inline Vector residualize(const Dataset& data, int target,
                          const std::vector<int>& neighbors) {
  const int n = data.n();
  for (int v : neighbors)
    if (v == target)
      throw std::invalid_argument("residualize: target among neighbors");
  Vector y = data.values.col(target);
  y.array() -= y.mean();
  if (neighbors.empty()) return y;
  Matrix a(n, static_cast<Eigen::Index>(neighbors.size()));
  for (std::size_t k = 0; k < neighbors.size(); ++k)
    a.col(static_cast<Eigen::Index>(k)) = data.values.col(neighbors[k]);
  a = detail::centered_columns(a);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return y - a * svd.solve(y);
}

/// First variable a LARS run would activate: the candidate with the
/// largest absolute correlation with the target. Ties go to the smallest
/// vertex index.
inline int lars_first_choice(const Vector& target, const Dataset& data,
                             const std::vector<int>& candidates) {
  if (candidates.empty())
    throw std::invalid_argument("lars_first_choice: no candidates");
  Vector t = target;
  t.array() -= t.mean();
  const double t_norm = t.norm();
  if (t_norm == 0.0)
    throw std::runtime_error("lars_first_choice: target has zero variance");
  std::vector<int> order = candidates;
  std::sort(order.begin(), order.end());
  int best = -1;
  double best_abs = -1.0;
  for (int v : order) {
    Vector c = data.values.col(v);
    c.array() -= c.mean();
    const double c_norm = c.norm();
    const double corr = c_norm == 0.0 ? 0.0 : std::abs(t.dot(c) / (t_norm * c_norm));
    if (corr > best_abs) {
      best_abs = corr;
      best = v;
    }
  }
  return best;
}

/// Neighbourhood-selection initializer: one lasso regression per node on
/// standardized predictors with penalty
///     rho_a = penalty_multiplier * sd(X_a) * sqrt(2 log(p) / n),
/// keeping edge (a,b) only when both directions kept each other (AND
/// rule). Produces the sparse, high-quality starting graphs the
/// composite loop needs.
inline Graph nodewise_init(const Dataset& data, const InitConfig& cfg) {
  cfg.validate();
  data.validate();
  const int n = data.n();
  const int p = data.p();
  const Matrix x = detail::centered_columns(data.values);
  const Vector sd = detail::column_sd(x);

  Matrix xs = x;
  for (int j = 0; j < p; ++j)
    if (sd(j) > 0.0) xs.col(j) /= sd(j);

  const Matrix gram = (xs.transpose() * xs) / double(n);
  const double level = std::sqrt(2.0 * std::log(double(p)) / double(n));

  Matrix coef = Matrix::Zero(p, p);  // coef(b, a): predictor b in regression of a
  std::vector<int> others(static_cast<std::size_t>(p - 1));
  for (int a = 0; a < p; ++a) {
    int idx = 0;
    for (int v = 0; v < p; ++v)
      if (v != a) others[static_cast<std::size_t>(idx++)] = v;
    Matrix q(p - 1, p - 1);
    Vector b(p - 1);
    for (int r = 0; r < p - 1; ++r) {
      const int vr = others[static_cast<std::size_t>(r)];
      b(r) = (xs.col(vr).dot(x.col(a))) / double(n);
      for (int c = 0; c < p - 1; ++c)
        q(r, c) = gram(vr, others[static_cast<std::size_t>(c)]);
    }
    const double rho_a = cfg.penalty_multiplier * sd(a) * level;
    const Vector beta = lasso_cd(q, b, rho_a, Vector::Zero(p - 1));
    for (int r = 0; r < p - 1; ++r)
      coef(others[static_cast<std::size_t>(r)], a) = beta(r);
  }

  Graph g = Graph::empty(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (coef(i, j) != 0.0 && coef(j, i) != 0.0) g.edges.emplace_back(i, j);
  return g;
}

struct StepOutcome {
  StepLog log;
  Graph next_graph;
  MleFit learning_fit;  // chosen graph fitted on the learning rows
  bool terminated = false;
};

/// One composite step. The exploration rows are re-partitioned into
/// learning and evaluation rows (seed derived from the master seed and
/// t); every vertex proposes its best next neighbour from a one-step
/// LARS on the residual of its current neighbourhood regression; mutual
/// selections take priority; the surviving candidates are fitted on the
/// learning rows and the edge with the lowest evaluation cross-entropy
/// wins (ties to the lexicographically smallest edge).
inline StepOutcome explore_step(const Dataset& data,
                                const std::vector<int>& exploration_rows,
                                const Graph& current, int t,
                                const SplitConfig& split,
                                const MleConfig& mle_cfg,
                                const MleFit* warm = nullptr) {
  const int p = current.p;
  if (current.is_full())
    throw std::invalid_argument("explore_step: graph already fully connected");

  const int n_expl = static_cast<int>(exploration_rows.size());
  const int n_eval = split_size(n_expl, split.evaluation_fraction);
  Rng rng(derive_seed(split.seed, SeedStream::StepSplit,
                      static_cast<std::uint64_t>(t)));
  auto [learn_rel, eval_rel] = split_indices(n_expl, n_eval, rng);

  StepOutcome out;
  out.log.t = t;
  for (int r : learn_rel) out.log.learning_rows.push_back(exploration_rows[r]);
  for (int r : eval_rel) out.log.evaluation_rows.push_back(exploration_rows[r]);

  const Dataset learn = data.rows(out.log.learning_rows);
  const Dataset eval = data.rows(out.log.evaluation_rows);
  const CovarianceMatrix s_learn = empirical_covariance(learn);
  const CovarianceMatrix s_eval = empirical_covariance(eval);

  const Matrix learn_centered = detail::centered_columns(learn.values);
  const Vector learn_sd = detail::column_sd(learn_centered);

  // each vertex proposes its best next neighbour
  std::vector<int> choice(static_cast<std::size_t>(p), -1);
  const auto adj = current.adjacency_lists();
  for (int a = 0; a < p; ++a) {
    const auto& nbrs = adj[static_cast<std::size_t>(a)];
    std::vector<int> rest;
    for (int v = 0; v < p; ++v)
      if (v != a && !std::binary_search(nbrs.begin(), nbrs.end(), v))
        rest.push_back(v);
    if (rest.empty()) continue;  // saturated node
    const Vector resid = residualize(learn, a, nbrs);
    const double resid_sd =
        std::sqrt(resid.squaredNorm() / double(resid.size()));
    if (resid_sd <= 1e-8 * (learn_sd(a) + 1e-300)) continue;  // fully explained
    choice[static_cast<std::size_t>(a)] = lars_first_choice(resid, learn, rest);
  }

  std::vector<Edge> mutual, all;
  for (int a = 0; a < p; ++a) {
    const int c = choice[static_cast<std::size_t>(a)];
    if (c < 0) continue;
    all.push_back(make_edge(a, c));
    if (choice[static_cast<std::size_t>(c)] == a) mutual.push_back(make_edge(a, c));
  }
  auto dedup = [](std::vector<Edge>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedup(mutual);
  dedup(all);

  out.log.mutual = !mutual.empty();
  out.log.candidates = out.log.mutual ? std::move(mutual) : std::move(all);
  if (out.log.candidates.empty()) {
    out.terminated = true;
    return out;
  }

  // score every candidate by the evaluation-set cross-entropy of its
  // learning-set MLE; all candidate fits extend the same base graph
  const MleFit base = constrained_mle(s_learn, current, mle_cfg, warm != nullptr ? &warm->model : nullptr);
  int best = -1;
  double best_score = 0.0;
  MleFit best_fit;
  for (std::size_t k = 0; k < out.log.candidates.size(); ++k) {
    const auto& e = out.log.candidates[k];
    MleFit fit = constrained_mle(s_learn, current.with_edge(e.first, e.second),
                                 mle_cfg, &base.model);
    const double score = cross_entropy(s_eval, fit.model);
    out.log.scores.push_back(score);
    if (best < 0 || score < best_score) {
      best = static_cast<int>(k);
      best_score = score;
      best_fit = std::move(fit);
    }
  }
  out.log.chosen = out.log.candidates[static_cast<std::size_t>(best)];
  out.next_graph = current.with_edge(out.log.chosen.first, out.log.chosen.second);
  out.learning_fit = std::move(best_fit);
  return out;
}

/// Full composite exploration: initial graph, validation/exploration
/// split, then `steps` single-edge extensions. Every graph in the trace
/// carries its exploration-set MLE. Deterministic for a given
/// split.seed.
inline ExplorationTrace run_composite(const Dataset& data, const Graph& initial,
                                      const SplitConfig& split, int steps,
                                      const MleConfig& mle_cfg) {
  data.validate();
  split.validate();
  if (initial.p != data.p())
    throw std::invalid_argument("run_composite: init graph dimension mismatch");
  if (steps < 0)
    throw std::invalid_argument("run_composite: steps must be >= 0");

  ExplorationTrace trace;
  trace.p = data.p();

  const int n_val = split_size(data.n(), split.validation_fraction);
  Rng rng(derive_seed(split.seed, SeedStream::ValidationSplit));
  auto [expl_rows, val_rows] = split_indices(data.n(), n_val, rng);
  trace.validation_rows = std::move(val_rows);
  trace.exploration_rows = std::move(expl_rows);

  const Dataset expl = data.rows(trace.exploration_rows);
  const CovarianceMatrix s_expl = empirical_covariance(expl);

  trace.graphs.push_back(initial);
  trace.fits.push_back(constrained_mle(s_expl, initial, mle_cfg));

  for (int t = 1; t <= steps; ++t) {
    const Graph& current = trace.graphs.back();
    if (current.is_full()) break;
    StepOutcome step = explore_step(data, trace.exploration_rows, current, t,
                                    split, mle_cfg, &trace.fits.back());
    if (step.terminated) break;
    trace.step_logs.push_back(std::move(step.log));
    trace.fits.push_back(constrained_mle(s_expl, step.next_graph, mle_cfg,
                                         &trace.fits.back().model));
    trace.graphs.push_back(std::move(step.next_graph));
  }
  return trace;
}

inline ExplorationTrace run_composite(const Dataset& data,
                                      const InitConfig& init,
                                      const SplitConfig& split, int steps,
                                      const MleConfig& mle_cfg) {
  Graph g0;
  switch (init.method) {
    case InitConfig::Method::Nodewise:
      g0 = nodewise_init(data, init);
      break;
    case InitConfig::Method::File:
      g0 = read_edge_list(init.path, data.p());
      break;
  }
  return run_composite(data, g0, split, steps, mle_cfg);
}

/// Default step budget: 3p steps, capped by the edges still missing.
inline int default_steps(int p, int initial_edges) {
  return std::min(3 * p, p * (p - 1) / 2 - initial_edges);
}

}  // namespace covsel

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "covsel/explore.hpp"
#include "covsel/gaussian.hpp"
#include "covsel/glasso.hpp"
#include "covsel/mle.hpp"
#include "covsel/select.hpp"
#include "covsel/simulate.hpp"

namespace covsel {

struct BenchSpec {
  int p = 30;
  int n = 30;
  double edge_prob = 0.05;
  std::optional<HubSpec> hub;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods{"composite", "glasso_path", "nodewise_init"};
  int rho_count = 20;
  int steps = -1;  // <= 0: 3p rule
  int n_holdout = 0;  // 0: same as n
  SplitConfig split;
  MleConfig mle;
  InitConfig init;
  int threads = 1;

  void validate() const {
    if (seeds.empty()) throw std::invalid_argument("BenchSpec: no seeds");
    if (n < 4) throw std::invalid_argument("BenchSpec: n must be >= 4");
    if (p < 2) throw std::invalid_argument("BenchSpec: p must be >= 2");
    if (rho_count < 1) throw std::invalid_argument("BenchSpec: rho_count >= 1");
    for (const auto& m : methods)
      if (m != "composite" && m != "glasso_path" && m != "nodewise_init")
        throw std::invalid_argument("BenchSpec: unknown method " + m);
  }
};

/// One candidate model of one method on one seed. All models are
/// refitted on the full per-seed dataset before scoring, so complexity /
/// performance frontiers are comparable across methods.
struct FrontierPoint {
  std::string method;
  std::uint64_t seed = 0;
  int index = 0;
  int edge_count = 0;
  double kl_truth = 0.0;
  double ce_holdout = 0.0;
  double wall_time_ms = 0.0;  // per-method solve time, repeated on each row
  bool selected = false;
  std::string data_hash;
};

inline std::string fnv1a_hex(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      const unsigned char* bytes = reinterpret_cast<const unsigned char*>(&v);
      for (std::size_t b = 0; b < sizeof(double); ++b) {
        h ^= bytes[b];
        h *= 1099511628211ULL;
      }
    }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::vector<FrontierPoint> bench_one_seed(const BenchSpec& spec,
                                                 std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  GraphModelSpec model_spec;
  model_spec.p = spec.p;
  model_spec.edge_prob = spec.edge_prob;
  model_spec.hub = spec.hub;
  model_spec.seed = derive_seed(seed, SeedStream::BenchExperiment);
  Experiment exp = make_experiment(model_spec, spec.n, seed);
  const std::string hash = fnv1a_hex(exp.data.values);

  const int n_holdout = spec.n_holdout > 0 ? spec.n_holdout : spec.n;
  const Dataset holdout = sample_gaussian(
      exp.truth, n_holdout, derive_seed(seed, SeedStream::BenchHoldout));
  const CovarianceMatrix s_holdout = empirical_covariance(holdout);
  const CovarianceMatrix s_full = empirical_covariance(exp.data);

  std::vector<FrontierPoint> points;
  auto push_point = [&](const std::string& method, int index,
                        const MleFit& fit, double ms, bool selected) {
    FrontierPoint pt;
    pt.method = method;
    pt.seed = seed;
    pt.index = index;
    pt.edge_count = fit.graph.edge_count();
    pt.kl_truth = kl_divergence(exp.truth, fit.model);
    pt.ce_holdout = cross_entropy(s_holdout, fit.model);
    pt.wall_time_ms = ms;
    pt.selected = selected;
    pt.data_hash = hash;
    points.push_back(std::move(pt));
  };

  for (const auto& method : spec.methods) {
    if (method == "composite") {
      SplitConfig split = spec.split;
      split.seed = seed;
      const auto t0 = clock::now();
      Graph g0 = spec.init.method == InitConfig::Method::File
                     ? read_edge_list(spec.init.path, spec.p)
                     : nodewise_init(exp.data, spec.init);
      const int steps = spec.steps > 0
                            ? spec.steps
                            : default_steps(spec.p, g0.edge_count());
      ExplorationTrace trace =
          run_composite(exp.data, g0, split, steps, spec.mle);
      const CovarianceMatrix s_val =
          empirical_covariance(exp.data.rows(trace.validation_rows));
      const int chosen = select_cvce(trace, s_val);
      const double ms = std::chrono::duration<double, std::milli>(
                            clock::now() - t0)
                            .count();
      // frontier rows are full-data refits of the explored graphs
      MleFit prev;
      for (std::size_t t = 0; t < trace.graphs.size(); ++t) {
        MleFit refit = constrained_mle(s_full, trace.graphs[t], spec.mle,
                                       t == 0 ? nullptr : &prev.model);
        push_point(method, static_cast<int>(t), refit, ms,
                   static_cast<int>(t) == chosen);
        prev = std::move(refit);
      }
    } else if (method == "glasso_path") {
      const auto t0 = clock::now();
      const auto rhos = default_rho_grid(s_full, spec.rho_count);
      GlassoConfig gcfg;
      gcfg.ridge = spec.mle.lambda;
      const auto path = glasso_path(s_full, rhos, spec.mle, gcfg);
      const double ms = std::chrono::duration<double, std::milli>(
                            clock::now() - t0)
                            .count();
      for (std::size_t k = 0; k < path.size(); ++k)
        push_point(method, static_cast<int>(k), path[k].refit, ms, false);
    } else {  // nodewise_init
      const auto t0 = clock::now();
      const Graph g = nodewise_init(exp.data, spec.init);
      const MleFit fit = constrained_mle(s_full, g, spec.mle);
      const double ms = std::chrono::duration<double, std::milli>(
                            clock::now() - t0)
                            .count();
      push_point(method, 0, fit, ms, true);
    }
  }
  return points;
}

}  // namespace detail

/// Run every requested method on a shared dataset per seed. Seeds may run
/// in parallel; output order (and content, timing aside) is independent
/// of the thread count.
inline std::vector<FrontierPoint> run_bench(const BenchSpec& spec) {
  spec.validate();
  const int n_seeds = static_cast<int>(spec.seeds.size());
  std::vector<std::vector<FrontierPoint>> slots(
      static_cast<std::size_t>(n_seeds));
  const int workers = std::max(1, std::min(spec.threads, n_seeds));
  if (workers == 1) {
    for (int k = 0; k < n_seeds; ++k)
      slots[static_cast<std::size_t>(k)] =
          detail::bench_one_seed(spec, spec.seeds[static_cast<std::size_t>(k)]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < n_seeds; k = next.fetch_add(1))
          slots[static_cast<std::size_t>(k)] = detail::bench_one_seed(
              spec, spec.seeds[static_cast<std::size_t>(k)]);
      });
    for (auto& t : pool) t.join();
  }
  std::vector<FrontierPoint> all;
  for (auto& s : slots)
    for (auto& pt : s) all.push_back(std::move(pt));
  return all;
}

/// Per (method, seed), the method's own choice: the selected point when
/// the method has a selection step, otherwise its best point by KL.
inline std::vector<FrontierPoint> representative_points(
    const std::vector<FrontierPoint>& points) {
  std::map<std::pair<std::string, std::uint64_t>, FrontierPoint> best;
  for (const auto& pt : points) {
    const auto key = std::make_pair(pt.method, pt.seed);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, pt);
      continue;
    }
    const bool replace = pt.selected != it->second.selected
                             ? pt.selected
                             : (!pt.selected && pt.kl_truth < it->second.kl_truth);
    if (replace) it->second = pt;
  }
  std::vector<FrontierPoint> out;
  for (auto& [key, pt] : best) out.push_back(std::move(pt));
  return out;
}

struct SummaryRow {
  std::string method;
  int count = 0;
  double kl_mean = 0.0, kl_sd = 0.0;
  double edge_mean = 0.0, edge_sd = 0.0;
  double time_mean_ms = 0.0, time_sd_ms = 0.0;
};

/// Population mean / standard deviation per method over the given points.
inline std::vector<SummaryRow> summarize(const std::vector<FrontierPoint>& points) {
  if (points.empty()) throw std::invalid_argument("summarize: no points");
  std::map<std::string, std::vector<const FrontierPoint*>> groups;
  for (const auto& pt : points) groups[pt.method].push_back(&pt);
  auto mean_sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= double(v.size());
    return std::make_pair(mean, std::sqrt(var));
  };
  std::vector<SummaryRow> rows;
  for (const auto& [method, pts] : groups) {
    std::vector<double> kl, edges, time;
    for (const auto* pt : pts) {
      kl.push_back(pt->kl_truth);
      edges.push_back(double(pt->edge_count));
      time.push_back(pt->wall_time_ms);
    }
    SummaryRow row;
    row.method = method;
    row.count = static_cast<int>(pts.size());
    std::tie(row.kl_mean, row.kl_sd) = mean_sd(kl);
    std::tie(row.edge_mean, row.edge_sd) = mean_sd(edges);
    std::tie(row.time_mean_ms, row.time_sd_ms) = mean_sd(time);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace covsel

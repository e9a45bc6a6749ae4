#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "covsel/gaussian.hpp"
#include "covsel/graph.hpp"
#include "covsel/rng.hpp"

namespace covsel {

/// Connectivity presets: expected degrees of roughly 1.5, 3 and 6.
enum class Connectivity { Sparse, Medium, Dense };

inline double edge_probability(Connectivity c, int p) {
  double base = 0.0;
  switch (c) {
    case Connectivity::Sparse: base = 1.5; break;
    case Connectivity::Medium: base = 3.0; break;
    case Connectivity::Dense: base = 6.0; break;
  }
  return std::min(0.99, base / double(p));
}

inline Connectivity connectivity_from_string(const std::string& s) {
  if (s == "sparse") return Connectivity::Sparse;
  if (s == "medium") return Connectivity::Medium;
  if (s == "dense") return Connectivity::Dense;
  throw std::invalid_argument("unknown connectivity preset: " + s);
}

struct HubSpec {
  int center = 0;
  int degree = 0;
};

struct GraphModelSpec {
  int p = 0;
  double edge_prob = 0.0;
  std::optional<HubSpec> hub;
  double off_diag_low = 0.2;
  double off_diag_high = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (p < 2) throw std::invalid_argument("GraphModelSpec: p must be >= 2");
    if (!(edge_prob > 0.0 && edge_prob < 1.0))
      throw std::invalid_argument(
          "GraphModelSpec: edge probability must be in (0,1)");
    if (!(off_diag_low > 0.0 && off_diag_low <= off_diag_high))
      throw std::invalid_argument(
          "GraphModelSpec: need 0 < off_diag_low <= off_diag_high");
    if (hub) {
      if (hub->center < 0 || hub->center >= p)
        throw std::invalid_argument("GraphModelSpec: hub center out of range");
      if (hub->degree < 1 || hub->degree > p - 1)
        throw std::invalid_argument("GraphModelSpec: hub degree out of range");
    }
  }
};

/// Draw a sparse graph and a compatible precision matrix. Off-diagonal
/// entries on the edges are uniform in +-[low, high]; the diagonal is
/// set to the absolute row sum plus 0.5, so kappa is strictly diagonally
/// dominant and therefore PD with no rejection step. The sparsity
/// pattern of kappa is exactly the returned graph.
inline std::pair<Graph, SpdPair> random_true_model(const GraphModelSpec& spec) {
  spec.validate();
  const int p = spec.p;
  Graph g = Graph::empty(p);

  {
    Rng rng(derive_seed(spec.seed, SeedStream::GraphEdges));
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (rng.uniform() < spec.edge_prob) g.edges.emplace_back(i, j);
  }
  if (spec.hub) {
    Rng rng(derive_seed(spec.seed, SeedStream::HubTargets));
    std::vector<int> others;
    for (int v = 0; v < p; ++v)
      if (v != spec.hub->center) others.push_back(v);
    shuffle(others, rng);
    for (int k = 0; k < spec.hub->degree; ++k)
      g.add_edge(spec.hub->center, others[static_cast<std::size_t>(k)]);
  }

  Matrix kappa = Matrix::Zero(p, p);
  {
    Rng rng(derive_seed(spec.seed, SeedStream::PrecisionCoeffs));
    for (const auto& [i, j] : g.edges) {
      const double mag = spec.off_diag_low +
                         rng.uniform() * (spec.off_diag_high - spec.off_diag_low);
      const double value = rng.uniform() < 0.5 ? mag : -mag;
      kappa(i, j) = value;
      kappa(j, i) = value;
    }
  }
  for (int i = 0; i < p; ++i)
    kappa(i, i) = kappa.row(i).cwiseAbs().sum() + 0.5;

  return {std::move(g), SpdPair::from_kappa(std::move(kappa))};
}

struct Experiment {
  Graph truth_graph;
  SpdPair truth;
  Dataset data;
};

inline Experiment make_experiment(const GraphModelSpec& spec, int n,
                                  std::uint64_t sample_seed) {
  if (n < 2) throw std::invalid_argument("make_experiment: n must be >= 2");
  auto [graph, model] = random_true_model(spec);
  Dataset data =
      sample_gaussian(model, n, derive_seed(sample_seed, SeedStream::Sampling));
  return Experiment{std::move(graph), std::move(model), std::move(data)};
}

}  // namespace covsel

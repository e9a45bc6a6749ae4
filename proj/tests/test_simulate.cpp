#include <catch2/catch_amalgamated.hpp>

#include "covsel/simulate.hpp"

using namespace covsel;

TEST_CASE("vanishing edge probability gives a diagonal model") {
  GraphModelSpec spec;
  spec.p = 5;
  spec.edge_prob = 1e-9;
  spec.seed = 3;
  auto [graph, model] = random_true_model(spec);
  REQUIRE(graph.edge_count() == 0);
  REQUIRE(graph_of_precision(model.kappa).edge_count() == 0);
}

TEST_CASE("hub spec forces the hub degree") {
  GraphModelSpec spec;
  spec.p = 6;
  spec.edge_prob = 1e-9;
  spec.hub = HubSpec{0, 5};
  spec.seed = 4;
  auto [graph, model] = random_true_model(spec);
  REQUIRE(graph.degree(0) == 5);
}

TEST_CASE("generated precision is PD with the exact sparsity pattern") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GraphModelSpec spec;
    spec.p = 12;
    spec.edge_prob = 0.2;
    spec.seed = seed;
    auto [graph, model] = random_true_model(spec);
    REQUIRE(min_eigenvalue(model.kappa) > 0.0);
    REQUIRE(graph_of_precision(model.kappa) == graph);
    REQUIRE(is_symmetric(model.kappa, 1e-12));
    validate_spd_pair(model);
  }
}

TEST_CASE("average degree grows with edge probability") {
  const int p = 15;
  const double probs[] = {0.05, 0.12, 0.3, 0.6};
  double prev = -1.0;
  for (double prob : probs) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      GraphModelSpec spec;
      spec.p = p;
      spec.edge_prob = prob;
      spec.seed = seed;
      total += random_true_model(spec).first.edge_count();
    }
    REQUIRE(total > prev);
    prev = total;
  }
}

TEST_CASE("make_experiment shapes and determinism") {
  GraphModelSpec spec;
  spec.p = 30;
  spec.edge_prob = edge_probability(Connectivity::Sparse, 30);
  spec.seed = 9;
  Experiment a = make_experiment(spec, 30, 9);
  REQUIRE(a.data.n() == 30);
  REQUIRE(a.data.p() == 30);

  Experiment b = make_experiment(spec, 30, 9);
  REQUIRE((a.data.values.array() == b.data.values.array()).all());
  REQUIRE(a.truth_graph == b.truth_graph);

  GraphModelSpec spec50 = spec;
  spec50.p = 50;
  spec50.edge_prob = edge_probability(Connectivity::Sparse, 50);
  Experiment c = make_experiment(spec50, 30, 9);
  REQUIRE(c.data.n() == 30);
  REQUIRE(c.data.p() == 50);
}

TEST_CASE("spec validation") {
  GraphModelSpec spec;
  spec.p = 5;
  spec.edge_prob = 0.0;
  REQUIRE_THROWS_AS(random_true_model(spec), std::invalid_argument);
  spec.edge_prob = 0.5;
  spec.off_diag_low = 0.0;
  REQUIRE_THROWS_AS(random_true_model(spec), std::invalid_argument);
  spec.off_diag_low = 0.2;
  spec.hub = HubSpec{5, 1};
  REQUIRE_THROWS_AS(random_true_model(spec), std::invalid_argument);
}

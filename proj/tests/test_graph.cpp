#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "covsel/gaussian.hpp"
#include "covsel/graph.hpp"
#include "covsel/rng.hpp"

using namespace covsel;

TEST_CASE("graph_of_precision: identity gives the empty graph") {
  REQUIRE(graph_of_precision(Matrix::Identity(4, 4)).edge_count() == 0);
}

TEST_CASE("graph_of_precision: tridiagonal gives the chain") {
  const int p = 6;
  Matrix k = Matrix::Identity(p, p);
  for (int i = 0; i + 1 < p; ++i) k(i, i + 1) = k(i + 1, i) = 0.5;
  Graph g = graph_of_precision(k, 1e-8);
  REQUIRE(g.edge_count() == p - 1);
  for (int i = 0; i + 1 < p; ++i) REQUIRE(g.has_edge(i, i + 1));
}

TEST_CASE("project_onto_graph: full graph is identity, empty keeps diagonal") {
  Rng rng(3);
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = rng.normal();
  REQUIRE((project_onto_graph(m, Graph::full(4)) - m).cwiseAbs().maxCoeff() == 0.0);
  const Matrix d = project_onto_graph(m, Graph::empty(4));
  REQUIRE((d.diagonal() - m.diagonal()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((d - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("project_onto_graph equals the entrywise mask oracle") {
  Rng rng(17);
  const int p = 7;
  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
  Graph g = Graph::empty(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (rng.uniform() < 0.4) g.edges.emplace_back(i, j);
  const Matrix projected = project_onto_graph(m, g);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const bool keep = i == j || g.has_edge(i, j);
      REQUIRE(projected(i, j) == (keep ? m(i, j) : 0.0));
    }
}

TEST_CASE("project_onto_graph is idempotent and linear") {
  Rng rng(19);
  const int p = 5;
  Matrix a(p, p), b(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  Graph g = Graph::empty(p);
  g.add_edge(0, 3);
  g.add_edge(1, 2);
  const Matrix pa = project_onto_graph(a, g);
  REQUIRE((project_onto_graph(pa, g) - pa).cwiseAbs().maxCoeff() == 0.0);
  const Matrix lin = project_onto_graph(2.0 * a + 3.0 * b, g);
  const Matrix sum = 2.0 * pa + 3.0 * project_onto_graph(b, g);
  REQUIRE((lin - sum).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("graph read back from a projected matrix stays inside the graph") {
  Rng rng(23);
  const int p = 6;
  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
  Graph g = Graph::empty(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (rng.uniform() < 0.3) g.edges.emplace_back(i, j);
  const Graph back = graph_of_precision(project_onto_graph(symmetrized(m), g));
  REQUIRE(back.is_subgraph_of(g));
}

TEST_CASE("compare_graphs") {
  Graph truth = Graph::empty(5);
  truth.add_edge(0, 1);
  truth.add_edge(1, 2);
  truth.add_edge(3, 4);

  SECTION("graph against itself") {
    auto m = compare_graphs(truth, truth);
    REQUIRE(m.precision == 1.0);
    REQUIRE(m.recall == 1.0);
    REQUIRE(m.hamming == 0.0);
  }
  SECTION("empty estimate has zero recall") {
    auto m = compare_graphs(Graph::empty(5), truth);
    REQUIRE(m.recall == 0.0);
    REQUIRE(m.false_negative == 3);
  }
  SECTION("hand-counted mixed case") {
    Graph est = Graph::empty(5);
    est.add_edge(0, 1);
    est.add_edge(1, 2);
    est.add_edge(2, 3);  // extra
    auto m = compare_graphs(est, truth);  // misses (3,4)
    REQUIRE(m.true_positive == 2);
    REQUIRE(m.false_positive == 1);
    REQUIRE(m.false_negative == 1);
    REQUIRE(m.hamming == 2.0);
  }
  SECTION("dimension mismatch") {
    REQUIRE_THROWS_AS(compare_graphs(Graph::empty(4), truth),
                      std::invalid_argument);
  }
}

TEST_CASE("graph guards") {
  Graph g = Graph::empty(4);
  REQUIRE_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_edge(0, 4), std::invalid_argument);
  g.add_edge(2, 0);
  REQUIRE(g.has_edge(0, 2));
  g.add_edge(0, 2);  // duplicate is a no-op
  REQUIRE(g.edge_count() == 1);
}

TEST_CASE("edge list round trip") {
  Graph g = Graph::empty(6);
  g.add_edge(0, 5);
  g.add_edge(2, 3);
  std::istringstream in(edge_list_string(g));
  Graph back = parse_edge_list(in, 6);
  REQUIRE(back == g);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covsel/dataset.hpp"

namespace covsel {

using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

/// Undirected graph on p vertices; no self-loops. Edges are stored
/// normalized (i < j), sorted and unique.
struct Graph {
  int p = 0;
  std::vector<Edge> edges;

  static Graph empty(int p) { return Graph{p, {}}; }

  static Graph full(int p) {
    Graph g{p, {}};
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) g.edges.emplace_back(i, j);
    return g;
  }

  int edge_count() const { return static_cast<int>(edges.size()); }

  bool has_edge(int a, int b) const {
    return std::binary_search(edges.begin(), edges.end(), make_edge(a, b));
  }

  void add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("Graph: self-loops are forbidden");
    if (a < 0 || b < 0 || a >= p || b >= p)
      throw std::invalid_argument("Graph: vertex out of range");
    const Edge e = make_edge(a, b);
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e) edges.insert(it, e);
  }

  Graph with_edge(int a, int b) const {
    Graph g = *this;
    g.add_edge(a, b);
    return g;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (const auto& [i, j] : edges) {
      if (i == v) out.push_back(j);
      else if (j == v) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::vector<int>> adjacency_lists() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(p));
    for (const auto& [i, j] : edges) {
      adj[static_cast<std::size_t>(i)].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(i);
    }
    return adj;
  }

  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  bool is_full() const { return edge_count() == p * (p - 1) / 2; }

  bool is_subgraph_of(const Graph& other) const {
    return std::includes(other.edges.begin(), other.edges.end(),
                         edges.begin(), edges.end());
  }

  bool operator==(const Graph& other) const = default;
};

struct GraphMetrics {
  int true_positive = 0;
  int false_positive = 0;
  int false_negative = 0;
  double precision = 0.0;
  double recall = 0.0;
  double hamming = 0.0;
};

/// Read a graph off a precision-like matrix: edge (i,j) iff |m_ij| above
/// the threshold. The 1e-8 default only guards against round-off; sparse
/// solver outputs carry exact zeros.
inline Graph graph_of_precision(const Matrix& m, double threshold = 1e-8) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("graph_of_precision: matrix must be square");
  Graph g{static_cast<int>(m.rows()), {}};
  for (int i = 0; i < g.p; ++i)
    for (int j = i + 1; j < g.p; ++j)
      if (std::abs(m(i, j)) > threshold) g.edges.emplace_back(i, j);
  return g;
}

/// Orthogonal projection onto the edge set plus the diagonal: entries on
/// E_g (both triangles) and on the diagonal are kept, the rest zeroed.
inline Matrix project_onto_graph(const Matrix& m, const Graph& g) {
  if (m.rows() != m.cols() || m.rows() != g.p)
    throw std::invalid_argument("project_onto_graph: dimension mismatch");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  out.diagonal() = m.diagonal();
  for (const auto& [i, j] : g.edges) {
    out(i, j) = m(i, j);
    out(j, i) = m(j, i);
  }
  return out;
}

// Edge-list text format: one "i j" pair per line, 0-indexed.
inline std::string edge_list_string(const Graph& g) {
  std::ostringstream out;
  for (const auto& [i, j] : g.edges) out << i << ' ' << j << '\n';
  return out.str();
}

inline Graph parse_edge_list(std::istream& in, int p) {
  Graph g = Graph::empty(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int a = 0, b = 0;
    if (!(ls >> a >> b))
      throw std::invalid_argument("edge list: malformed line: " + line);
    g.add_edge(a, b);
  }
  return g;
}

inline Graph read_edge_list(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("edge list: cannot open " + path);
  return parse_edge_list(in, p);
}

inline GraphMetrics compare_graphs(const Graph& estimate, const Graph& truth) {
  if (estimate.p != truth.p)
    throw std::invalid_argument("compare_graphs: vertex count mismatch");
  GraphMetrics m;
  for (const auto& e : estimate.edges)
    if (truth.has_edge(e.first, e.second)) ++m.true_positive;
  m.false_positive = estimate.edge_count() - m.true_positive;
  m.false_negative = truth.edge_count() - m.true_positive;
  m.precision = estimate.edge_count() > 0
                    ? double(m.true_positive) / estimate.edge_count()
                    : 1.0;
  m.recall = truth.edge_count() > 0
                 ? double(m.true_positive) / truth.edge_count()
                 : 1.0;
  m.hamming = m.false_positive + m.false_negative;
  return m;
}

}  // namespace covsel

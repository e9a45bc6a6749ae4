#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covsel/dataset.hpp"
#include "covsel/explore.hpp"
#include "covsel/gaussian.hpp"
#include "covsel/graph.hpp"
#include "covsel/mle.hpp"
#include "covsel/select.hpp"

namespace covsel {

using nlohmann::json;

/// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Write-to-temp-then-rename, so consumers never observe partial files.
inline void atomic_write_file(const std::string& path,
                              const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path())
    std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

// ---- CSV ----

inline std::string dataset_csv_string(const Dataset& data) {
  std::ostringstream out;
  for (int j = 0; j < data.p(); ++j) {
    if (j > 0) out << ',';
    out << data.column_names[static_cast<std::size_t>(j)];
  }
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      if (j > 0) out << ',';
      out << fmt_g17(data.values(i, j));
    }
    out << '\n';
  }
  return out.str();
}

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  atomic_write_file(path, dataset_csv_string(data));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset CSV: " + path);
  std::string line;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names = split_csv_line(line);
    break;
  }
  if (names.empty())
    throw std::invalid_argument("dataset CSV has no header: " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = split_csv_line(line);
    if (cells.size() != names.size())
      throw std::invalid_argument("dataset CSV: ragged row in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      std::size_t used = 0;
      const double v = std::stod(c, &used);
      if (used != c.size())
        throw std::invalid_argument("dataset CSV: bad number '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return Dataset::from_matrix(std::move(m), std::move(names));
}

inline void write_edge_list(const std::string& path, const Graph& g) {
  atomic_write_file(path, edge_list_string(g));
}

// ---- JSON ----

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("JSON matrix must be a non-empty array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("JSON matrix is ragged");
    for (Eigen::Index jj = 0; jj < cols; ++jj)
      m(i, jj) = row.at(static_cast<std::size_t>(jj)).get<double>();
  }
  return m;
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges) edges.push_back(json::array({i, j}));
  return json{{"p", g.p}, {"edges", std::move(edges)}};
}

inline Graph graph_from_json(const json& j) {
  Graph g = Graph::empty(j.at("p").get<int>());
  for (const auto& e : j.at("edges"))
    g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

inline json spd_pair_to_json(const SpdPair& pair) {
  return json{{"p", pair.p()},
              {"sigma", matrix_to_json(pair.sigma)},
              {"kappa", matrix_to_json(pair.kappa)}};
}

inline SpdPair spd_pair_from_json(const json& j) {
  SpdPair pair;
  pair.sigma = matrix_from_json(j.at("sigma"));
  if (j.contains("kappa")) {
    pair.kappa = matrix_from_json(j.at("kappa"));
  } else {
    pair.kappa = spd_inverse(pair.sigma);
  }
  return pair;
}

inline json mle_fit_to_json(const MleFit& fit) {
  return json{{"model", spd_pair_to_json(fit.model)},
              {"graph", graph_to_json(fit.graph)},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"residual", fit.residual}};
}

inline MleFit mle_fit_from_json(const json& j) {
  MleFit fit;
  fit.model = spd_pair_from_json(j.at("model"));
  fit.graph = graph_from_json(j.at("graph"));
  fit.iterations = j.at("iterations").get<int>();
  fit.converged = j.at("converged").get<bool>();
  fit.residual = j.at("residual").get<double>();
  return fit;
}

inline json step_log_to_json(const StepLog& log) {
  json candidates = json::array();
  for (const auto& [i, j] : log.candidates)
    candidates.push_back(json::array({i, j}));
  return json{{"t", log.t},
              {"learning_rows", log.learning_rows},
              {"evaluation_rows", log.evaluation_rows},
              {"mutual", log.mutual},
              {"candidates", std::move(candidates)},
              {"scores", log.scores},
              {"chosen", json::array({log.chosen.first, log.chosen.second})}};
}

inline StepLog step_log_from_json(const json& j) {
  StepLog log;
  log.t = j.at("t").get<int>();
  log.learning_rows = j.at("learning_rows").get<std::vector<int>>();
  log.evaluation_rows = j.at("evaluation_rows").get<std::vector<int>>();
  log.mutual = j.at("mutual").get<bool>();
  for (const auto& e : j.at("candidates"))
    log.candidates.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  log.scores = j.at("scores").get<std::vector<double>>();
  log.chosen = {j.at("chosen").at(0).get<int>(), j.at("chosen").at(1).get<int>()};
  return log;
}

inline json trace_to_json(const ExplorationTrace& trace) {
  json graphs = json::array();
  for (const auto& g : trace.graphs) graphs.push_back(graph_to_json(g));
  json fits = json::array();
  for (const auto& f : trace.fits) fits.push_back(mle_fit_to_json(f));
  json steps = json::array();
  for (const auto& s : trace.step_logs) steps.push_back(step_log_to_json(s));
  return json{{"p", trace.p},
              {"graphs", std::move(graphs)},
              {"fits", std::move(fits)},
              {"steps", std::move(steps)},
              {"validation_rows", trace.validation_rows},
              {"exploration_rows", trace.exploration_rows}};
}

inline ExplorationTrace trace_from_json(const json& j) {
  ExplorationTrace trace;
  trace.p = j.at("p").get<int>();
  for (const auto& g : j.at("graphs")) trace.graphs.push_back(graph_from_json(g));
  for (const auto& f : j.at("fits")) trace.fits.push_back(mle_fit_from_json(f));
  for (const auto& s : j.at("steps"))
    trace.step_logs.push_back(step_log_from_json(s));
  trace.validation_rows = j.at("validation_rows").get<std::vector<int>>();
  trace.exploration_rows = j.at("exploration_rows").get<std::vector<int>>();
  return trace;
}

inline json selection_report_to_json(const SelectionReport& report) {
  json candidates = json::array();
  for (const auto& c : report.candidates) {
    json jc{{"index", c.index},
            {"edge_count", c.edge_count},
            {"cvce", c.cvce}};
    if (c.tce) jc["tce"] = *c.tce;
    if (c.ggmsc) jc["ggmsc"] = *c.ggmsc;
    if (c.kl) jc["kl"] = *c.kl;
    candidates.push_back(std::move(jc));
  }
  json chosen{{"cvce", report.cvce_choice}};
  if (report.tce_choice) chosen["tce"] = *report.tce_choice;
  if (report.ggmsc_choice) chosen["ggmsc"] = *report.ggmsc_choice;
  json out{{"candidates", std::move(candidates)},
           {"chosen", std::move(chosen)},
           {"ggmsc_penalty",
            report.penalty_used == GgmscPenaltyKind::Edkhi ? "edkhi"
                                                           : "simplified"},
           {"ce_note", "cross-entropies omit the (p/2) log(2 pi) constant"}};
  if (report.bounds) {
    const auto& b = *report.bounds;
    out["bounds"] = json{{"sigma_inf", b.sigma_inf},
                         {"d_max", b.d_max},
                         {"bound1", b.bound1},
                         {"bound2_over_c", b.bound2_over_c},
                         {"cvce_index", b.cvce_index},
                         {"oracle_index", b.oracle_index},
                         {"empirical_regret", b.empirical_regret}};
  }
  return out;
}

inline std::string selection_report_csv(const SelectionReport& report) {
  std::ostringstream out;
  out << "index,edges,cvce,tce,ggmsc,kl\n";
  for (const auto& c : report.candidates) {
    out << c.index << ',' << c.edge_count << ',' << fmt_g17(c.cvce) << ',';
    out << (c.tce ? fmt_g17(*c.tce) : "") << ',';
    out << (c.ggmsc ? fmt_g17(*c.ggmsc) : "") << ',';
    out << (c.kl ? fmt_g17(*c.kl) : "") << '\n';
  }
  return out.str();
}

}  // namespace covsel

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace covsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n observations (rows) of a p-dimensional vector, with named columns.
struct Dataset {
  Matrix values;
  std::vector<std::string> column_names;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }

  static Dataset from_matrix(Matrix m, std::vector<std::string> names = {}) {
    Dataset d;
    d.values = std::move(m);
    if (names.empty()) {
      names.reserve(static_cast<std::size_t>(d.p()));
      for (int j = 0; j < d.p(); ++j) names.push_back("x" + std::to_string(j));
    }
    d.column_names = std::move(names);
    return d;
  }

  void validate() const {
    if (n() < 2 || p() < 2)
      throw std::invalid_argument("dataset must have n >= 2 and p >= 2");
    if (!values.allFinite())
      throw std::invalid_argument("dataset contains non-finite entries");
    if (column_names.size() != static_cast<std::size_t>(p()))
      throw std::invalid_argument("dataset column name count mismatch");
  }

  Dataset rows(const std::vector<int>& idx) const {
    Dataset out;
    out.values.resize(static_cast<Eigen::Index>(idx.size()), values.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
      out.values.row(static_cast<Eigen::Index>(i)) = values.row(idx[i]);
    out.column_names = column_names;
    return out;
  }
};

}  // namespace covsel

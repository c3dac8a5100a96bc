#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gvb/polymat.hpp"

namespace gvb::test {

/// Spectral radius of a CSR matrix via a dense eigen-decomposition.
inline double dense_radius(const CsrMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  const auto d = m.dense();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = d[static_cast<std::size_t>(i * n + j)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  double r = 0;
  for (Eigen::Index i = 0; i < n; ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Dense matrix from nested rows, for comparing against hand-written tables.
inline std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

}  // namespace gvb::test

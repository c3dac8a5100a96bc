#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gvb/polymat.hpp"

namespace gvb {

/// Serial runs the reference kernels; parallel uses the OpenMP kernels.
enum class ExecPolicy { serial, parallel };

/// Power iterations on smaller matrices always run the serial kernels.
inline constexpr std::size_t parallel_min_dim = 2048;

struct SolverConfig {
  double power_tol = 1e-10;
  int power_max_iter = 100000;
  double newton_tol = 1e-8;
  int newton_max_iter = 100;
  ExecPolicy exec = ExecPolicy::parallel;

  /// Throws invalid-parameters on nonpositive tolerances or caps.
  void check() const;
};

struct Partials {
  double x = 0, y = 0, xx = 0, yy = 0, xy = 0;
};

struct EigenPack {
  double lambda = 0;
  std::optional<double> d1;  // lambda'
  std::optional<double> d2;  // lambda''
  std::optional<Partials> partials;
  std::vector<double> eigvec;
  int iterations = 0;
};

namespace kernels {

/// y = M x
void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, ExecPolicy policy);
double dot(std::span<const double> a, std::span<const double> b, ExecPolicy policy);
double norm2(std::span<const double> a, ExecPolicy policy);

}  // namespace kernels

/// Largest period among the strongly connected components of the pattern.
int pattern_period(const CsrMatrix& m);

/// Dominant eigenvalue only.
EigenPack power_iteration(const CsrMatrix& m, const SolverConfig& cfg);

/// Dominant eigenvalue and its derivative along a parameter with dM = m1.
EigenPack power_I(const CsrMatrix& m, const CsrMatrix& m1, const SolverConfig& cfg);

/// Adds the second derivative (d2M = m2).
EigenPack power_II(const CsrMatrix& m, const CsrMatrix& m1, const CsrMatrix& m2, const SolverConfig& cfg);

/// Bivariate version: first and second partials in x and y.
EigenPack power_III(const CsrMatrix& m, const CsrMatrix& mx, const CsrMatrix& my, const CsrMatrix& mxx,
                    const CsrMatrix& myy, const CsrMatrix& mxy, const SolverConfig& cfg);

/// Evaluates a univariate polynomial matrix and its derivatives at `t`
/// and runs the matching power iteration (order 0, 1 or 2).
EigenPack eigen_at(const SparsePolyMatrix& m, double t, int order, const SolverConfig& cfg);

}  // namespace gvb

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "gvb/eigen.hpp"
#include "gvb/gvcore.hpp"
#include "gvb/graphs.hpp"
#include "gvb/polymat.hpp"
#include "gvb/product.hpp"

namespace gvb {

/// Λ(z;C) with derivatives in z.
struct LambdaC {
  double value = 0, d1 = 0, d2 = 0;
};

/// Λ(x,y;D) with first and second partials.
struct LambdaD {
  double value = 0, x = 0, y = 0, xx = 0, yy = 0, xy = 0;
};

/// Source of Λ(z;C) and Λ(x,y;D) for the MR machinery.
///
/// Limits use k = 0 for x -> 0 (C(0), constant x-coefficient of D) and
/// k = 2 for x -> ∞ (z-coefficient of C, x²-coefficient of D).
class MrModel {
 public:
  virtual ~MrModel() = default;
  virtual int symbol_length() const = 0;
  virtual double capacity(const SolverConfig& cfg) const = 0;
  virtual LambdaC c_at(double z, int order, const SolverConfig& cfg) const = 0;
  /// order 0: value; 1: value, x, y; 2: everything.
  virtual LambdaD d_at(double x, double y, int order, const SolverConfig& cfg) const = 0;
  /// Δ(x) = Λ_y(x,1)/(sΛ(x,1)).
  virtual double Delta(double x, const SolverConfig& cfg) const;

  /// Λ of the limit C; nullopt when it vanishes.
  virtual std::optional<double> c_limit(int k, const SolverConfig& cfg) const = 0;
  /// Λ, Λ_y, Λ_yy of the limit D at y.
  virtual LambdaY d_limit(int k, double y, int order, const SolverConfig& cfg) const = 0;
  /// Whether the boundary x♯ ∈ {0, ∞} is realised through the limit
  /// matrices rather than a finite scan proxy.
  virtual bool exact_limits() const { return false; }
  /// Smallest root in (0,1) of the limiting G2 equation, when known.
  virtual std::optional<double> limit_y(int /*k*/, const SolverConfig&) const { return std::nullopt; }
};

class MatrixMrModel final : public MrModel {
 public:
  MatrixMrModel(const LabelledGraph& g, const EdgeSubset& subset);
  explicit MatrixMrModel(const LabelledGraph& g);

  int symbol_length() const override { return 1; }
  double capacity(const SolverConfig& cfg) const override;
  LambdaC c_at(double z, int order, const SolverConfig& cfg) const override;
  LambdaD d_at(double x, double y, int order, const SolverConfig& cfg) const override;
  double Delta(double x, const SolverConfig& cfg) const override;
  std::optional<double> c_limit(int k, const SolverConfig& cfg) const override;
  LambdaY d_limit(int k, double y, int order, const SolverConfig& cfg) const override;

  const SparsePolyMatrix& C() const { return c_; }
  const SparsePolyMatrix& D() const { return d_; }

 private:
  SparsePolyMatrix a_, c_, c1_, c2_, d_, dx_, dy_, dxx_, dyy_, dxy_;
};

/// Single-state model: C = (|ℰ|-|𝒫|) + |𝒫|z and D = Σ(α_t x² + β_t x + γ_t) y^t.
class ScalarMrModel final : public MrModel {
 public:
  ScalarMrModel(Poly alpha, Poly beta, Poly gamma, double edges, double subset, int s);

  int symbol_length() const override { return s_; }
  double capacity(const SolverConfig&) const override;
  LambdaC c_at(double z, int order, const SolverConfig& cfg) const override;
  LambdaD d_at(double x, double y, int order, const SolverConfig& cfg) const override;
  std::optional<double> c_limit(int k, const SolverConfig& cfg) const override;
  LambdaY d_limit(int k, double y, int order, const SolverConfig& cfg) const override;
  bool exact_limits() const override { return true; }
  std::optional<double> limit_y(int k, const SolverConfig& cfg) const override;

  double edges() const { return e_; }
  double subset() const { return p_; }

 private:
  Poly alpha_, beta_, gamma_, d_, dx_, dy_, dxx_, dyy_, dxy_;
  double e_, p_;
  int s_;
};

/// Scalar model for a single-state graph and edge subset 𝒫.
std::unique_ptr<ScalarMrModel> make_scalar_mr_model(const LabelledGraph& g, const EdgeSubset& subset);

/// Default 𝒫: edges labelled "1" when s = 1, minimum-weight labels otherwise.
EdgeSubset default_subset(const LabelledGraph& g);

/// Scalar model for single-state graphs, matrix model otherwise (s = 1 only).
std::unique_ptr<MrModel> make_mr_model(const LabelledGraph& g, const EdgeSubset& subset);
std::unique_ptr<MrModel> make_mr_model(const LabelledGraph& g);

/// p(x) = xΛ'(x;C)/Λ(x;C).
double mr_p(const MrModel& m, double x, const SolverConfig& cfg = {});

/// Residuals (G1, G2, G3) with z = x; G3 = yΛ_y - δsΛ.
std::array<double, 3> mr_G(const MrModel& m, double p, double x, double y, double delta,
                           const SolverConfig& cfg = {});

using Mat3 = std::array<std::array<double, 3>, 3>;

/// ∂(G1,G2,G3)/∂(p,x,y).
Mat3 mr_jacobian(const MrModel& m, double p, double x, double y, double delta, const SolverConfig& cfg = {});

/// Solves J u = b by Gaussian elimination with partial pivoting.
std::optional<std::array<double, 3>> solve3(const Mat3& j, const std::array<double, 3>& b);

struct ScanConfig {
  double x_lo = 1e-2;
  double x_hi = 1e2;
  int points = 61;
};

struct XSharp {
  enum class Kind { decreasing, increasing, interior_max };
  Kind kind = Kind::interior_max;
  /// Maximiser of Δ; 0 or +inf when the exact limit is used.
  double x_sharp = 1;
  /// Finite x used to sample the parametric segment.
  double x_grid_end = 1;
  /// Scan window; the stationary branch may leave [1, x♯] before reaching x♯.
  double x_lo = 1e-2, x_hi = 1e2;
  double delta_max_mr = 0;
  bool at_limit = false;
};

const char* to_string(XSharp::Kind k);

XSharp classify_xsharp(const MrModel& m, const ScanConfig& scan = {}, const SolverConfig& cfg = {});

struct MrPointResult {
  double delta = 0;
  double p_star = 0;
  double x_star = 1;  // may be 0 or +inf for limits
  double y_star = 0;
  double rate = 0;
  bool clamped = false;  // rate is R_LB (Step 2B or boundary segment)
  bool via_newton = false;
  int newton_iterations = 0;
};

/// One sample of the parametric segment at a given x.
struct MrSample {
  double x = 1, p = 0, y = 0, delta = 0, rate = 0;
  int newton_iterations = 0;
  bool y_at_one = false;  // G2(x,·) has no root below 1
};

/// Smallest root y(x) of G2(x,·) in (0,1); sets y_at_one when there is none.
MrSample mr_sample_at_x(const MrModel& m, double x, double cap, const SolverConfig& cfg = {});

/// Boundary segment sample at fixed x♯ (or its limit) and y.
CurvePoint mr_lb_point(const MrModel& m, const XSharp& xs, double y, const SolverConfig& cfg = {});

MrPointResult mr_fixed_delta(const MrModel& m, double delta, const SolverConfig& cfg = {},
                             const ScanConfig& scan = {});
/// Same, reusing a classification of x♯ (for sweeps over many δ).
MrPointResult mr_fixed_delta(const MrModel& m, double delta, const XSharp& xs, const SolverConfig& cfg = {});
MrPointResult mr_fixed_delta(const LabelledGraph& g, double delta, const SolverConfig& cfg = {},
                             const ScanConfig& scan = {});

struct MrCurve {
  std::vector<CurvePoint> points;  // sorted by δ
  XSharp xsharp;
  int failures = 0;
  int newton_iterations = 0;
};

MrCurve mr_curve(const MrModel& m, int n_points, const SolverConfig& cfg = {}, const ScanConfig& scan = {});
MrCurve mr_curve(const LabelledGraph& g, int n_points, const SolverConfig& cfg = {}, const ScanConfig& scan = {});

}  // namespace gvb

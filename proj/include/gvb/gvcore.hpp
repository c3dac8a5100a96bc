#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gvb/eigen.hpp"
#include "gvb/graphs.hpp"
#include "gvb/polymat.hpp"

namespace gvb {

enum class Segment { parametric, lb_tail, zero_tail };
const char* to_string(Segment s);

struct CurvePoint {
  Segment segment;
  double param;
  double delta;
  double rate;
};

struct GvPointResult {
  double delta = 0;
  double y_star = 0;
  double T_tilde = 0;
  double capacity = 0;
  double rate = 0;
  int newton_iterations = 0;
};

/// Dominant eigenvalue of B(y) with up to two derivatives.
struct LambdaY {
  double value = 0, d1 = 0, d2 = 0;
  int iterations = 0;
};

/// Source of Λ(y;B) for the GV machinery. The matrix model runs power
/// iterations; the scalar model evaluates a single polynomial.
class GvModel {
 public:
  virtual ~GvModel() = default;
  virtual int symbol_length() const = 0;
  /// log2 of the dominant eigenvalue of the adjacency matrix, per bit.
  virtual double capacity(const SolverConfig& cfg) const = 0;
  virtual LambdaY lambda(double y, int order, const SolverConfig& cfg) const = 0;
};

class MatrixGvModel final : public GvModel {
 public:
  /// Any graph accepted by build_T; single-state graphs reduce to 1x1.
  explicit MatrixGvModel(const LabelledGraph& g);
  int symbol_length() const override { return s_; }
  double capacity(const SolverConfig& cfg) const override;
  LambdaY lambda(double y, int order, const SolverConfig& cfg) const override;
  const SparsePolyMatrix& B() const { return b_; }
  const SparsePolyMatrix& A() const { return a_; }

 private:
  int s_;
  SparsePolyMatrix a_, b_, b1_, b2_;
};

class ScalarGvModel final : public GvModel {
 public:
  /// `b` is Σ α_t y^t; `edges` is |ℰ|.
  ScalarGvModel(Poly b, double edges, int s);
  int symbol_length() const override { return s_; }
  double capacity(const SolverConfig&) const override;
  LambdaY lambda(double y, int order, const SolverConfig& cfg) const override;

 private:
  Poly b_, b1_, b2_;
  double edges_;
  int s_;
};

/// Model for a graph: scalar for single-state presentations, matrix otherwise.
std::unique_ptr<GvModel> make_gv_model(const LabelledGraph& g);

double capacity(const LabelledGraph& g, const SolverConfig& cfg = {});

/// F(y) = yΛ'(y) - δ s Λ(y) and its derivative (1-δs)Λ' + yΛ''.
double gv_F(const GvModel& m, double delta, double y, const SolverConfig& cfg = {});
double gv_Fprime(const GvModel& m, double delta, double y, const SolverConfig& cfg = {});

double delta_max_gv(const GvModel& m, const SolverConfig& cfg = {});
double delta_max_gv(const LabelledGraph& g, const SolverConfig& cfg = {});

GvPointResult gv_fixed_delta(const GvModel& m, double delta, const SolverConfig& cfg = {});
GvPointResult gv_fixed_delta(const LabelledGraph& g, double delta, const SolverConfig& cfg = {});

/// Parametric curve (δ(y), ρ(y)) on a uniform y grid. The first point is the
/// exact (0, Cap); a zero-tail point at δ = 1 closes the curve.
std::vector<CurvePoint> gv_curve(const GvModel& m, int n_points, const SolverConfig& cfg = {});
std::vector<CurvePoint> gv_curve(const LabelledGraph& g, int n_points, const SolverConfig& cfg = {});

/// δ(y) and ρ_GV(y) at one y in (0,1].
CurvePoint gv_curve_point(const GvModel& m, double y, double cap, const SolverConfig& cfg = {});

inline constexpr double y_floor = 1e-9;

double binary_entropy(double p);

/// max(0, Cap - H(δ)).
double simple_lb(double capacity, double delta);
std::vector<CurvePoint> simple_lb_curve(double capacity, int n_points);

/// Linear interpolation of the rate at δ over points sorted by δ.
double rate_at(const std::vector<CurvePoint>& curve, double delta);

/// Sorts by δ (stable, keeps segment order for ties).
void sort_by_delta(std::vector<CurvePoint>& curve);

/// Σ over words x of length n (in bits) of the number of words within
/// distance d-1 of x. Exhaustive; n*s bits capped at 14.
std::uint64_t brute_force_T(const LabelledGraph& g, int n, int d);

/// Words of n symbols readable from some path, as bit masks (first bit most significant).
std::vector<std::uint32_t> enumerate_words(const LabelledGraph& g, int n);

}  // namespace gvb

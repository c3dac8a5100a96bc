#include "gvb/gvcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>

#include "gvb/error.hpp"
#include "gvb/product.hpp"
#include "gvb/singlestate.hpp"

namespace gvb {

const char* to_string(Segment s) {
  switch (s) {
    case Segment::parametric: return "parametric";
    case Segment::lb_tail: return "lb-tail";
    case Segment::zero_tail: return "zero-tail";
  }
  return "unknown";
}

MatrixGvModel::MatrixGvModel(const LabelledGraph& g)
    : s_(g.symbol_length()),
      a_(adjacency_matrix(g)),
      b_(build_B(g)),
      b1_(b_.derivative(Var::y, 1)),
      b2_(b_.derivative(Var::y, 2)) {}

double MatrixGvModel::capacity(const SolverConfig& cfg) const {
  return std::log2(power_iteration(a_.eval(1.0), cfg).lambda) / s_;
}

LambdaY MatrixGvModel::lambda(double y, int order, const SolverConfig& cfg) const {
  const CsrMatrix m = b_.eval(y);
  EigenPack e;
  if (order <= 0)
    e = power_iteration(m, cfg);
  else if (order == 1)
    e = power_I(m, b1_.eval(y), cfg);
  else
    e = power_II(m, b1_.eval(y), b2_.eval(y), cfg);
  return {e.lambda, e.d1.value_or(0.0), e.d2.value_or(0.0), e.iterations};
}

ScalarGvModel::ScalarGvModel(Poly b, double edges, int s)
    : b_(std::move(b)), b1_(b_.derivative(false, 1)), b2_(b_.derivative(false, 2)), edges_(edges), s_(s) {
  if (edges_ <= 0 || s_ <= 0) throw Error(ErrorKind::invalid_parameters, "scalar model needs |E| > 0 and s > 0");
}

double ScalarGvModel::capacity(const SolverConfig&) const { return std::log2(edges_) / s_; }

LambdaY ScalarGvModel::lambda(double y, int order, const SolverConfig&) const {
  if (y < 0) throw Error(ErrorKind::domain_error, "negative evaluation point");
  LambdaY out{b_.eval(0, y), 0, 0, 0};
  if (order >= 1) out.d1 = b1_.eval(0, y);
  if (order >= 2) out.d2 = b2_.eval(0, y);
  if (!(out.value > 0)) throw Error(ErrorKind::numeric_failure, "polynomial is not positive");
  return out;
}

std::unique_ptr<GvModel> make_gv_model(const LabelledGraph& g) {
  if (g.single_state()) {
    const DistanceProfile prof = distance_profile(g.labels());
    return std::make_unique<ScalarGvModel>(profile_poly(prof.alpha), static_cast<double>(g.num_edges()),
                                           g.symbol_length());
  }
  if (g.symbol_length() != 1)
    throw Error(ErrorKind::unsupported_configuration, "multi-state graphs must have s = 1");
  return std::make_unique<MatrixGvModel>(g);
}

double capacity(const LabelledGraph& g, const SolverConfig& cfg) {
  if (g.single_state()) return std::log2(static_cast<double>(g.num_edges())) / g.symbol_length();
  return std::log2(power_iteration(adjacency_matrix(g).eval(1.0), cfg).lambda) / g.symbol_length();
}

double gv_F(const GvModel& m, double delta, double y, const SolverConfig& cfg) {
  const auto l = m.lambda(y, 1, cfg);
  return y * l.d1 - delta * m.symbol_length() * l.value;
}

double gv_Fprime(const GvModel& m, double delta, double y, const SolverConfig& cfg) {
  const auto l = m.lambda(y, 2, cfg);
  return (1 - delta * m.symbol_length()) * l.d1 + y * l.d2;
}

double delta_max_gv(const GvModel& m, const SolverConfig& cfg) {
  const auto l = m.lambda(1.0, 1, cfg);
  return l.d1 / (m.symbol_length() * l.value);
}

double delta_max_gv(const LabelledGraph& g, const SolverConfig& cfg) { return delta_max_gv(*make_gv_model(g), cfg); }

GvPointResult gv_fixed_delta(const GvModel& m, double delta, const SolverConfig& cfg) {
  cfg.check();
  if (!(delta >= 0 && delta <= 1)) throw Error(ErrorKind::invalid_parameters, "delta must lie in [0,1]");
  const int s = m.symbol_length();
  GvPointResult r;
  r.delta = delta;
  r.capacity = m.capacity(cfg);
  if (delta == 0) {
    r.y_star = 0;
    r.T_tilde = r.capacity;
    r.rate = r.capacity;
    return r;
  }
  if (delta >= delta_max_gv(m, cfg)) {
    r.y_star = 1;
    r.T_tilde = 2 * r.capacity;
    r.rate = 0;
    return r;
  }

  auto F = [&](double y) { return gv_F(m, delta, y, cfg); };
  double y = 0.5;
  int clamps = 0;
  bool converged = false;
  int it = 0;
  for (; it < cfg.newton_max_iter && !converged; ++it) {
    const auto l = m.lambda(y, 2, cfg);
    const double f = y * l.d1 - delta * s * l.value;
    const double fp = (1 - delta * s) * l.d1 + y * l.d2;
    if (!(fp > 0) || !std::isfinite(f)) break;
    double next = y - f / fp;
    if (next > 1) {
      next = 1;
      ++clamps;
    } else if (next <= 0) {
      next = y_floor;
      ++clamps;
    } else {
      clamps = 0;
    }
    if (clamps >= 3) break;
    converged = std::abs(next - y) <= cfg.newton_tol;
    y = next;
  }
  r.newton_iterations = it;
  if (!converged) {
    // F(0) < 0 < F(1) below δ_max and the root is unique.
    double lo = y_floor, hi = 1.0;
    if (F(lo) > 0) throw Error(ErrorKind::numeric_failure, "F does not change sign on (0,1]");
    int bis = 0;
    while (hi - lo > cfg.newton_tol * 1e-3 && bis < 200) {
      const double mid = 0.5 * (lo + hi);
      (F(mid) < 0 ? lo : hi) = mid;
      ++bis;
    }
    if (hi - lo > cfg.newton_tol)
      throw NoConvergence("bisection on F did not converge", 0.5 * (lo + hi), bis);
    y = 0.5 * (lo + hi);
    r.newton_iterations += bis;
  }
  const auto l = m.lambda(y, 0, cfg);
  r.y_star = y;
  r.T_tilde = (-delta * s * std::log2(y) + std::log2(l.value)) / s;
  r.rate = 2 * r.capacity - r.T_tilde;
  return r;
}

GvPointResult gv_fixed_delta(const LabelledGraph& g, double delta, const SolverConfig& cfg) {
  return gv_fixed_delta(*make_gv_model(g), delta, cfg);
}

CurvePoint gv_curve_point(const GvModel& m, double y, double cap, const SolverConfig& cfg) {
  const auto l = m.lambda(y, 1, cfg);
  const int s = m.symbol_length();
  const double delta = y * l.d1 / (s * l.value);
  const double rho = 2 * cap + delta * std::log2(y) - std::log2(l.value) / s;
  return {Segment::parametric, y, delta, std::max(0.0, rho)};
}

std::vector<CurvePoint> gv_curve(const GvModel& m, int n_points, const SolverConfig& cfg) {
  cfg.check();
  if (n_points < 2) throw Error(ErrorKind::invalid_parameters, "a curve needs at least 2 points");
  const double cap = m.capacity(cfg);
  std::vector<CurvePoint> pts(static_cast<std::size_t>(n_points));
  SolverConfig inner = cfg;
  inner.exec = ExecPolicy::serial;
  const bool par = cfg.exec == ExecPolicy::parallel;
  std::exception_ptr failure;
#pragma omp parallel for if (par) schedule(dynamic)
  for (int i = 1; i < n_points; ++i) {
    const double y = y_floor + (1.0 - y_floor) * i / (n_points - 1);
    try {
      pts[static_cast<std::size_t>(i)] = gv_curve_point(m, y, cap, inner);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  pts.back().rate = 0;  // ρ(1) = 0 exactly
  // The y_floor sample is replaced by its exact limit (0, Cap).
  pts.front() = {Segment::parametric, 0.0, 0.0, cap};
  std::vector<CurvePoint> out = std::move(pts);
  if (out.back().delta < 1) out.push_back({Segment::zero_tail, 1.0, 1.0, 0.0});
  return out;
}

std::vector<CurvePoint> gv_curve(const LabelledGraph& g, int n_points, const SolverConfig& cfg) {
  return gv_curve(*make_gv_model(g), n_points, cfg);
}

double binary_entropy(double p) {
  if (p <= 0 || p >= 1) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double simple_lb(double capacity, double delta) {
  if (!(delta >= 0 && delta <= 1)) throw Error(ErrorKind::invalid_parameters, "delta must lie in [0,1]");
  return std::max(0.0, capacity - binary_entropy(std::min(delta, 0.5)));
}

std::vector<CurvePoint> simple_lb_curve(double capacity, int n_points) {
  if (n_points < 2) throw Error(ErrorKind::invalid_parameters, "a curve needs at least 2 points");
  std::vector<CurvePoint> out;
  for (int i = 0; i < n_points; ++i) {
    const double d = 0.5 * i / (n_points - 1);
    out.push_back({Segment::parametric, d, d, simple_lb(capacity, d)});
  }
  out.push_back({Segment::zero_tail, 1.0, 1.0, 0.0});
  return out;
}

double rate_at(const std::vector<CurvePoint>& curve, double delta) {
  if (curve.empty()) throw Error(ErrorKind::invalid_parameters, "empty curve");
  if (delta <= curve.front().delta) return curve.front().rate;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    if (delta <= b.delta) {
      if (b.delta == a.delta) return std::max(a.rate, b.rate);
      const double t = (delta - a.delta) / (b.delta - a.delta);
      return a.rate + t * (b.rate - a.rate);
    }
  }
  return curve.back().rate;
}

void sort_by_delta(std::vector<CurvePoint>& curve) {
  std::stable_sort(curve.begin(), curve.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.delta < b.delta; });
}

std::vector<std::uint32_t> enumerate_words(const LabelledGraph& g, int n) {
  const int s = g.symbol_length();
  if (n < 0 || n * s > 14) throw Error(ErrorKind::size_limit, "exhaustive enumeration is limited to 14 bits");
  // words[v] = words of the current length ending at v
  std::vector<std::vector<std::uint32_t>> words(g.num_states(), std::vector<std::uint32_t>{0});
  for (int k = 0; k < n; ++k) {
    std::vector<std::vector<std::uint32_t>> next(g.num_states());
    for (const auto& e : g.edges()) {
      const auto lab = static_cast<std::uint32_t>(std::stoul(e.label, nullptr, 2));
      for (std::uint32_t w : words[e.from]) next[e.to].push_back((w << s) | lab);
    }
    for (auto& v : next) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    words = std::move(next);
  }
  std::vector<std::uint32_t> all;
  for (const auto& v : words) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::uint64_t brute_force_T(const LabelledGraph& g, int n, int d) {
  const auto words = enumerate_words(g, n);
  if (d <= 0) return 0;
  std::uint64_t total = 0;
  for (std::uint32_t a : words)
    for (std::uint32_t b : words) total += std::popcount(a ^ b) <= d - 1;
  return total;
}

}  // namespace gvb

#include "gvb/mrcore.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "gvb/error.hpp"
#include "gvb/singlestate.hpp"

namespace gvb {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Scan-and-refine for the smallest sign change of f on [lo, hi).
template <class F>
std::optional<double> smallest_root(F f, double lo, double hi, int grid, double tol) {
  double a = lo, fa = f(a);
  if (fa == 0) return a;
  for (int k = 1; k <= grid; ++k) {
    double b = lo + (hi - lo) * k / grid;
    const double fb = f(b);
    if (fb == 0) return b;
    if ((fa < 0) != (fb < 0)) {
      for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm < 0) == (fa < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

double rate_formula(double c_value, double delta, int s, double y, double d_value) {
  const double log_y = y > 0 ? std::log2(y) : 0.0;  // δ log y -> 0 as y -> 0 only with δ = 0
  return (2 * std::log2(c_value) + delta * s * log_y - std::log2(d_value)) / s;
}

}  // namespace

double MrModel::Delta(double x, const SolverConfig& cfg) const {
  const auto d = d_at(x, 1.0, 1, cfg);
  return d.y / (symbol_length() * d.value);
}

// ---------------------------------------------------------------------------

MatrixMrModel::MatrixMrModel(const LabelledGraph& g, const EdgeSubset& subset)
    : a_(adjacency_matrix(g)),
      c_(build_C(g, subset)),
      c1_(c_.derivative(Var::z, 1)),
      c2_(c_.derivative(Var::z, 2)),
      d_(build_D(g, subset)),
      dx_(d_.derivative(Var::x, 1)),
      dy_(d_.derivative(Var::y, 1)),
      dxx_(d_.derivative(Var::x, 2)),
      dyy_(d_.derivative(Var::y, 2)),
      dxy_(d_.derivative(Var::x, 1).derivative(Var::y, 1)) {
  if (g.symbol_length() != 1)
    throw Error(ErrorKind::unsupported_configuration, "the matrix MR path needs s = 1");
}

MatrixMrModel::MatrixMrModel(const LabelledGraph& g) : MatrixMrModel(g, ones_subset(g)) {}

double MatrixMrModel::capacity(const SolverConfig& cfg) const {
  return std::log2(power_iteration(a_.eval(1.0), cfg).lambda);
}

LambdaC MatrixMrModel::c_at(double z, int order, const SolverConfig& cfg) const {
  const CsrMatrix m = c_.eval(z);
  EigenPack e = order <= 0   ? power_iteration(m, cfg)
                : order == 1 ? power_I(m, c1_.eval(z), cfg)
                             : power_II(m, c1_.eval(z), c2_.eval(z), cfg);
  return {e.lambda, e.d1.value_or(0), e.d2.value_or(0)};
}

LambdaD MatrixMrModel::d_at(double x, double y, int order, const SolverConfig& cfg) const {
  const CsrMatrix m = d_.eval(x, y);
  if (order <= 0) return {power_iteration(m, cfg).lambda};
  const EigenPack e = power_III(m, dx_.eval(x, y), dy_.eval(x, y), dxx_.eval(x, y), dyy_.eval(x, y),
                                dxy_.eval(x, y), cfg);
  const Partials& p = *e.partials;
  return {e.lambda, p.x, p.y, p.xx, p.yy, p.xy};
}

double MatrixMrModel::Delta(double x, const SolverConfig& cfg) const {
  const EigenPack e = power_I(d_.eval(x, 1.0), dy_.eval(x, 1.0), cfg);
  return *e.d1 / e.lambda;
}

std::optional<double> MatrixMrModel::c_limit(int k, const SolverConfig& cfg) const {
  const CsrMatrix m = k == 0 ? c_.eval(0.0) : c1_.eval(0.0);
  if (m.nnz() == 0) return std::nullopt;
  try {
    return power_iteration(m, cfg).lambda;
  } catch (const Error&) {
    return std::nullopt;  // nilpotent: the limit has no positive eigenvalue
  }
}

LambdaY MatrixMrModel::d_limit(int k, double y, int order, const SolverConfig& cfg) const {
  const EigenPack e = eigen_at(d_.coefficient_matrix(k), y, order, cfg);
  return {e.lambda, e.d1.value_or(0), e.d2.value_or(0), e.iterations};
}

// ---------------------------------------------------------------------------

ScalarMrModel::ScalarMrModel(Poly alpha, Poly beta, Poly gamma, double edges, double subset, int s)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), gamma_(std::move(gamma)), e_(edges), p_(subset), s_(s) {
  if (!(e_ > 0) || p_ < 0 || p_ > e_ || s_ <= 0)
    throw Error(ErrorKind::invalid_parameters, "scalar MR model needs 0 <= |P| <= |E| and s > 0");
  for (const auto& [poly, xe] : {std::pair{&alpha_, 2}, std::pair{&beta_, 1}, std::pair{&gamma_, 0}})
    for (const auto& t : poly->terms()) d_ += Poly::monomial(t.coeff, xe, t.b);
  dx_ = d_.derivative(true, 1);
  dy_ = d_.derivative(false, 1);
  dxx_ = d_.derivative(true, 2);
  dyy_ = d_.derivative(false, 2);
  dxy_ = dx_.derivative(false, 1);
}

double ScalarMrModel::capacity(const SolverConfig&) const { return std::log2(e_) / s_; }

LambdaC ScalarMrModel::c_at(double z, int, const SolverConfig&) const {
  if (z < 0) throw Error(ErrorKind::domain_error, "negative evaluation point");
  return {e_ - p_ + p_ * z, p_, 0.0};
}

LambdaD ScalarMrModel::d_at(double x, double y, int order, const SolverConfig&) const {
  if (x < 0 || y < 0) throw Error(ErrorKind::domain_error, "negative evaluation point");
  LambdaD out{d_.eval(x, y)};
  if (!(out.value > 0)) throw Error(ErrorKind::numeric_failure, "polynomial is not positive");
  if (order >= 1) {
    out.x = dx_.eval(x, y);
    out.y = dy_.eval(x, y);
  }
  if (order >= 2) {
    out.xx = dxx_.eval(x, y);
    out.yy = dyy_.eval(x, y);
    out.xy = dxy_.eval(x, y);
  }
  return out;
}

std::optional<double> ScalarMrModel::c_limit(int k, const SolverConfig&) const {
  const double v = k == 0 ? e_ - p_ : p_;
  if (!(v > 0)) return std::nullopt;
  return v;
}

LambdaY ScalarMrModel::d_limit(int k, double y, int order, const SolverConfig&) const {
  const Poly& f = k == 0 ? gamma_ : alpha_;
  LambdaY out{f.eval(0, y), 0, 0, 0};
  if (!(out.value > 0)) throw Error(ErrorKind::numeric_failure, "limit polynomial is not positive");
  if (order >= 1) out.d1 = f.derivative(false, 1).eval(0, y);
  if (order >= 2) out.d2 = f.derivative(false, 2).eval(0, y);
  return out;
}

std::optional<double> ScalarMrModel::limit_y(int k, const SolverConfig&) const {
  // Leading (x -> ∞) or constant (x -> 0) coefficient of the G2 equation
  // multiplied through by C(x).
  const double q = e_ - p_;
  auto h = [&](double y) {
    return k == 0 ? q * beta_.eval(0, y) - 2 * p_ * gamma_.eval(0, y)
                  : 2 * q * alpha_.eval(0, y) - p_ * beta_.eval(0, y);
  };
  return smallest_root(h, y_floor, 1.0 - 1e-9, 400, 1e-15);
}

std::unique_ptr<ScalarMrModel> make_scalar_mr_model(const LabelledGraph& g, const EdgeSubset& subset) {
  if (!g.single_state()) throw Error(ErrorKind::invalid_parameters, "scalar MR model needs a single-state graph");
  if (subset.size() != g.num_edges()) throw Error(ErrorKind::invalid_parameters, "edge subset size mismatch");
  const DistanceProfile prof = partition_profile(g.labels(), subset);
  return std::make_unique<ScalarMrModel>(profile_poly(prof.alpha), profile_poly(prof.beta), profile_poly(prof.gamma),
                                         static_cast<double>(prof.edges), static_cast<double>(prof.subset),
                                         g.symbol_length());
}

EdgeSubset default_subset(const LabelledGraph& g) {
  if (g.symbol_length() == 1) return ones_subset(g);
  int min_weight = g.symbol_length();
  for (const auto& e : g.edges()) min_weight = std::min<int>(min_weight, std::count(e.label.begin(), e.label.end(), '1'));
  EdgeSubset out;
  for (const auto& e : g.edges()) out.push_back(std::count(e.label.begin(), e.label.end(), '1') == min_weight);
  return out;
}

std::unique_ptr<MrModel> make_mr_model(const LabelledGraph& g, const EdgeSubset& subset) {
  if (g.single_state()) return make_scalar_mr_model(g, subset);
  if (g.symbol_length() != 1)
    throw Error(ErrorKind::unsupported_configuration, "MR bounds for multi-state graphs need s = 1");
  return std::make_unique<MatrixMrModel>(g, subset);
}

std::unique_ptr<MrModel> make_mr_model(const LabelledGraph& g) { return make_mr_model(g, default_subset(g)); }

// ---------------------------------------------------------------------------

double mr_p(const MrModel& m, double x, const SolverConfig& cfg) {
  const auto c = m.c_at(x, 1, cfg);
  return x * c.d1 / c.value;
}

std::array<double, 3> mr_G(const MrModel& m, double p, double x, double y, double delta, const SolverConfig& cfg) {
  const auto c = m.c_at(x, 1, cfg);
  const auto d = m.d_at(x, y, 1, cfg);
  const int s = m.symbol_length();
  return {x * c.d1 - p * c.value, x * d.x - 2 * p * d.value, y * d.y - delta * s * d.value};
}

Mat3 mr_jacobian(const MrModel& m, double p, double x, double y, double delta, const SolverConfig& cfg) {
  const auto c = m.c_at(x, 2, cfg);
  const auto d = m.d_at(x, y, 2, cfg);
  const double ds = delta * m.symbol_length();
  Mat3 j{};
  j[0] = {-c.value, c.d1 + x * c.d2 - p * c.d1, 0.0};
  j[1] = {-2 * d.value, d.x + x * d.xx - 2 * p * d.x, x * d.xy - 2 * p * d.y};
  j[2] = {0.0, y * d.xy - ds * d.x, d.y + y * d.yy - ds * d.y};
  return j;
}

std::optional<std::array<double, 3>> solve3(const Mat3& j, const std::array<double, 3>& b) {
  double a[3][4];
  double scale = 0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      a[r][c] = j[r][c];
      scale = std::max(scale, std::abs(j[r][c]));
    }
    a[r][3] = b[r];
  }
  if (!(scale > 0)) return std::nullopt;
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) <= 1e-14 * scale) return std::nullopt;
    if (piv != c)
      for (int k = 0; k < 4; ++k) std::swap(a[c][k], a[piv][k]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::array<double, 3> u{};
  for (int r = 2; r >= 0; --r) {
    double v = a[r][3];
    for (int k = r + 1; k < 3; ++k) v -= a[r][k] * u[k];
    u[r] = v / a[r][r];
  }
  return u;
}

const char* to_string(XSharp::Kind k) {
  switch (k) {
    case XSharp::Kind::decreasing: return "decreasing";
    case XSharp::Kind::increasing: return "increasing";
    case XSharp::Kind::interior_max: return "interior-max";
  }
  return "unknown";
}

namespace {

std::optional<double> limit_Delta(const MrModel& m, int k, const SolverConfig& cfg) {
  if (!m.exact_limits() || !m.c_limit(k, cfg)) return std::nullopt;
  try {
    const auto d = m.d_limit(k, 1.0, 1, cfg);
    return d.d1 / (m.symbol_length() * d.value);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

XSharp classify_xsharp(const MrModel& m, const ScanConfig& scan, const SolverConfig& cfg) {
  if (!(scan.x_lo > 0) || !(scan.x_hi > scan.x_lo) || scan.x_lo > 1 || scan.x_hi < 1 || scan.points < 3)
    throw Error(ErrorKind::invalid_parameters, "scan needs 0 < x_lo <= 1 <= x_hi and at least 3 points");
  const int n = scan.points;
  const double llo = std::log(scan.x_lo), lhi = std::log(scan.x_hi);
  auto x_of = [&](double t) { return std::exp(t); };
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = m.Delta(x_of(llo + (lhi - llo) * i / (n - 1)), cfg);
  const auto best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());

  XSharp xs;
  xs.x_lo = scan.x_lo;
  xs.x_hi = scan.x_hi;
  if (best == 0 || best == n - 1) {
    const bool left = best == 0;
    xs.kind = left ? XSharp::Kind::decreasing : XSharp::Kind::increasing;
    xs.x_grid_end = left ? scan.x_lo : scan.x_hi;
    xs.x_sharp = xs.x_grid_end;
    xs.delta_max_mr = vals[static_cast<std::size_t>(best)];
    if (auto lim = limit_Delta(m, left ? 0 : 2, cfg)) {
      xs.at_limit = true;
      xs.x_sharp = left ? 0.0 : inf;
      xs.delta_max_mr = std::max(xs.delta_max_mr, *lim);
    }
    return xs;
  }
  // Golden-section search on log x around the grid maximum.
  double a = llo + (lhi - llo) * (best - 1) / (n - 1);
  double b = llo + (lhi - llo) * (best + 1) / (n - 1);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = m.Delta(x_of(c), cfg), fd = m.Delta(x_of(d), cfg);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = m.Delta(x_of(c), cfg);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = m.Delta(x_of(d), cfg);
    }
  }
  xs.kind = XSharp::Kind::interior_max;
  xs.x_sharp = x_of(0.5 * (a + b));
  xs.x_grid_end = xs.x_sharp;
  xs.delta_max_mr = std::max({m.Delta(xs.x_sharp, cfg), vals[static_cast<std::size_t>(best)]});
  return xs;
}

MrSample mr_sample_at_x(const MrModel& m, double x, double cap, const SolverConfig& cfg) {
  MrSample out;
  out.x = x;
  out.p = mr_p(m, x, cfg);
  const int s = m.symbol_length();
  if (x == 1.0) {
    // y = 0 is the smallest root of G2(1,·): the δ = 0 endpoint.
    out.y = 0;
    out.delta = 0;
    out.rate = cap;
    return out;
  }
  const double p = out.p;
  auto g2 = [&](double y) {
    const auto d = m.d_at(x, y, 1, cfg);
    return x * d.x - 2 * p * d.value;
  };
  // Bracket the smallest root on a uniform grid that stops short of y = 1
  // (always a root, by the tensor identity).
  constexpr int grid = 40;
  double a = y_floor, ga = g2(a), b = 0, gb = 0;
  bool found = ga == 0;
  if (found) b = a;
  for (int k = 1; k < grid && !found; ++k) {
    b = y_floor + (1 - y_floor) * k / grid;
    gb = g2(b);
    if (gb == 0 || (ga < 0) != (gb < 0)) {
      found = true;
      break;
    }
    a = b;
    ga = gb;
  }
  double y;
  if (!found) {
    out.y_at_one = true;
    y = 1.0;
  } else if (gb == 0) {
    y = b;
  } else {
    // Safeguarded Newton inside [a, b].
    y = a - ga * (b - a) / (gb - ga);
    bool ok = false;
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      const auto d = m.d_at(x, y, 2, cfg);
      const double g = x * d.x - 2 * p * d.value;
      const double gp = x * d.xy - 2 * p * d.y;
      ++out.newton_iterations;
      if (g == 0) {
        ok = true;
        break;
      }
      if ((g < 0) == (ga < 0)) {
        a = y;
        ga = g;
      } else {
        b = y;
      }
      double next = gp != 0 ? y - g / gp : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const bool done = std::abs(next - y) <= cfg.newton_tol * 1e-2 || b - a <= 1e-15;
      y = next;
      if (done) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NoConvergence("root of G2 did not converge", y, out.newton_iterations);
  }
  const auto c = m.c_at(x, 0, cfg);
  const auto d = m.d_at(x, y, 1, cfg);
  out.y = y;
  out.delta = y * d.y / (s * d.value);
  out.rate = std::max(0.0, rate_formula(c.value, out.delta, s, y, d.value));
  if (out.y_at_one) out.rate = 0;
  return out;
}

CurvePoint mr_lb_point(const MrModel& m, const XSharp& xs, double y, const SolverConfig& cfg) {
  const int s = m.symbol_length();
  double c_value, d_value, d_y;
  if (xs.at_limit) {
    const int k = xs.x_sharp == 0 ? 0 : 2;
    const auto cl = m.c_limit(k, cfg);
    if (!cl) throw Error(ErrorKind::unsupported_configuration, "limit matrix of C vanishes");
    const auto dl = m.d_limit(k, y, 1, cfg);
    c_value = *cl;
    d_value = dl.value;
    d_y = dl.d1;
  } else {
    c_value = m.c_at(xs.x_sharp, 0, cfg).value;
    const auto d = m.d_at(xs.x_sharp, y, 1, cfg);
    d_value = d.value;
    d_y = d.y;
  }
  const double delta = y * d_y / (s * d_value);
  double rate = std::max(0.0, rate_formula(c_value, delta, s, y, d_value));
  if (y >= 1.0) rate = 0;
  return {Segment::lb_tail, y, delta, rate};
}

namespace {

// One point of the stationary branch G1 = G2 = 0, parametrised by y.
struct BranchNode {
  double y = 0, x = 1, p = 0, delta = 0, rate = 0;
};

struct Branch {
  enum class End { x_sharp, y_one, stalled };
  std::vector<BranchNode> nodes;
  End end = End::stalled;
  int newton_iterations = 0;
};

void finish_node(const MrModel& m, BranchNode& n, const SolverConfig& cfg) {
  const int s = m.symbol_length();
  const auto c = m.c_at(n.x, 0, cfg);
  const auto d = m.d_at(n.x, n.y, 1, cfg);
  n.delta = n.y * d.y / (s * d.value);
  n.rate = std::max(0.0, rate_formula(c.value, n.delta, s, n.y, d.value));
}

// Newton in t = log x on h(x) = x Λ_x - 2 p(x) Λ at fixed y, with p(x) from G1.
std::optional<BranchNode> solve_at_y(const MrModel& m, double y, double x0, const SolverConfig& cfg, int* iters) {
  double t = std::log(x0);
  try {
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      const double x = std::exp(t);
      const auto c = m.c_at(x, 2, cfg);
      const auto d = m.d_at(x, y, 2, cfg);
      ++*iters;
      const double p = x * c.d1 / c.value;
      const double dp = (c.d1 + x * c.d2) / c.value - x * c.d1 * c.d1 / (c.value * c.value);
      const double h = (x * d.x - 2 * p * d.value) / d.value;
      const double hx = (d.x + x * d.xx - 2 * dp * d.value - 2 * p * d.x) / d.value - h * d.x / d.value;
      const double ht = x * hx;
      if (!(ht != 0) || !std::isfinite(ht)) return std::nullopt;
      const double step = std::clamp(-h / ht, -0.5, 0.5);
      t += step;
      if (std::abs(step) <= cfg.newton_tol * 1e-2) {
        BranchNode n;
        n.y = y;
        n.x = std::exp(t);
        n.p = mr_p(m, n.x, cfg);
        finish_node(m, n, cfg);
        return n;
      }
    }
  } catch (const Error& e) {
    if (!e.is_numeric()) throw;
  }
  return std::nullopt;
}

// Warm start for y between two neighbouring nodes.
double guess_x(const std::vector<BranchNode>& nodes, double y) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), y, [](const BranchNode& n, double v) { return n.y < v; });
  if (it == nodes.begin()) return nodes.front().x;
  if (it == nodes.end()) return nodes.back().x;
  const auto& a = *(it - 1);
  const auto& b = *it;
  const double w = b.y > a.y ? (y - a.y) / (b.y - a.y) : 0.0;
  return std::exp((1 - w) * std::log(a.x) + w * std::log(b.x));
}

// Follow the branch from (x, y) = (1, 0). It may fold through the far side of
// x = 1 before heading to x♯, so x is not a usable parameter; y is.
Branch trace_branch(const MrModel& m, const XSharp& xs, const SolverConfig& cfg) {
  Branch br;
  BranchNode start;
  start.p = mr_p(m, 1.0, cfg);
  start.rate = m.capacity(cfg);
  br.nodes.push_back(start);
  const double target = std::log(xs.x_grid_end);
  if (std::abs(target) < 1e-12) {
    br.end = Branch::End::x_sharp;
    return br;
  }
  const double side = target > 0 ? 1.0 : -1.0;
  const double t_lo = std::log(xs.x_lo), t_hi = std::log(xs.x_hi);
  constexpr double y_top = 1 - 1e-9;
  double dy = 1e-3;
  while (true) {
    const auto& last = br.nodes.back();
    const double y = std::min(last.y + dy, y_top);
    double x0 = last.x;
    if (br.nodes.size() >= 2) {
      const auto& prev = br.nodes[br.nodes.size() - 2];
      const double slope = (std::log(last.x) - std::log(prev.x)) / (last.y - prev.y);
      x0 = std::exp(std::log(last.x) + slope * (y - last.y));
    }
    auto n = solve_at_y(m, y, x0, cfg, &br.newton_iterations);
    const bool ok = n && std::abs(std::log(n->x) - std::log(last.x)) <= 0.25 && n->p >= 0 && n->p <= 1;
    if (!ok) {
      dy *= 0.5;
      if (dy < 1e-10) {
        if (last.y > 1 - 1e-6) break;
        br.end = Branch::End::stalled;
        return br;
      }
      continue;
    }
    const double tn = std::log(n->x);
    if ((tn - target) * side >= 0) {
      // Crossed x♯: bisect y for x(y) = x♯.
      double a = last.y, b = n->y, xa = last.x;
      BranchNode hit = *n;
      for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
        const double mid = 0.5 * (a + b);
        auto mn = solve_at_y(m, mid, xa, cfg, &br.newton_iterations);
        if (!mn) break;
        if ((std::log(mn->x) - target) * side >= 0) {
          b = mid;
          hit = *mn;
        } else {
          a = mid;
          xa = mn->x;
        }
      }
      hit.x = xs.x_grid_end;
      hit.p = mr_p(m, hit.x, cfg);
      finish_node(m, hit, cfg);
      br.nodes.push_back(hit);
      br.end = Branch::End::x_sharp;
      return br;
    }
    if (tn < t_lo || tn > t_hi) {
      br.end = Branch::End::stalled;
      return br;
    }
    br.nodes.push_back(*n);
    if (n->y >= y_top) break;
    dy = std::min(dy * 1.5, 0.02);
  }
  // y = 1 solves G2 for every x; the branch meets that line at Δ(x) with rate 0.
  BranchNode top = br.nodes.back();
  top.y = 1;
  top.delta = m.Delta(top.x, cfg);
  top.rate = 0;
  br.nodes.push_back(top);
  br.end = Branch::End::y_one;
  return br;
}

// Start of the boundary segment: y(x♯) or the root of the limiting G2.
std::optional<double> boundary_y_start(const MrModel& m, const XSharp& xs, const Branch& br, const SolverConfig& cfg) {
  if (br.end != Branch::End::x_sharp) return std::nullopt;
  if (xs.at_limit) return m.limit_y(xs.x_sharp == 0 ? 0 : 2, cfg);
  return br.nodes.back().y;
}

}  // namespace

MrPointResult mr_fixed_delta(const MrModel& m, double delta, const SolverConfig& cfg, const ScanConfig& scan) {
  cfg.check();
  if (!(delta >= 0 && delta <= 1)) throw Error(ErrorKind::invalid_parameters, "delta must lie in [0,1]");
  if (delta == 0) return mr_fixed_delta(m, delta, XSharp{}, cfg);
  return mr_fixed_delta(m, delta, classify_xsharp(m, scan, cfg), cfg);
}

MrPointResult mr_fixed_delta(const MrModel& m, double delta, const XSharp& xs, const SolverConfig& cfg) {
  cfg.check();
  if (!(delta >= 0 && delta <= 1)) throw Error(ErrorKind::invalid_parameters, "delta must lie in [0,1]");
  const int s = m.symbol_length();
  const double cap = m.capacity(cfg);
  MrPointResult r;
  r.delta = delta;
  if (delta == 0) {
    r.p_star = mr_p(m, 1.0, cfg);
    r.x_star = 1;
    r.y_star = 0;
    r.rate = cap;
    return r;
  }
  auto clamp_to_sharp = [&](double y, double rate) {
    r.x_star = xs.x_sharp;
    r.p_star = xs.at_limit ? (xs.x_sharp == 0 ? 0.0 : 1.0) : mr_p(m, xs.x_sharp, cfg);
    r.y_star = y;
    r.rate = rate;
    r.clamped = true;
    return r;
  };
  if (delta >= xs.delta_max_mr) return clamp_to_sharp(1, 0);

  // Damped Newton on (G1, G2, G3) from (p, x, y) = (0.5, 1, 0.5).
  auto merit = [&](double p, double x, double y) {
    const auto c = m.c_at(x, 0, cfg);
    const auto d = m.d_at(x, y, 0, cfg);
    const auto g = mr_G(m, p, x, y, delta, cfg);
    return std::hypot(g[0] / c.value, g[1] / d.value, g[2] / d.value);
  };
  // Matrix models only trust x inside the scan window; far outside it the
  // power iterations crawl.
  double x_min = 0, x_max = inf;
  if (!m.exact_limits()) {
    x_min = xs.x_lo;
    x_max = xs.x_hi;
  }
  double p = 0.5, x = 1.0, y = 0.5;
  int clamps = 0, slow = 0;
  bool converged = false;
  try {
    double f = merit(p, x, y);
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      const auto g = mr_G(m, p, x, y, delta, cfg);
      const auto step = solve3(mr_jacobian(m, p, x, y, delta, cfg), {-g[0], -g[1], -g[2]});
      ++r.newton_iterations;
      if (!step) break;
      double t = 1.0;
      double np = p, nx = x, ny = y, nf = f;
      for (int h = 0; h <= 8; ++h, t *= 0.5) {
        np = p + t * (*step)[0];
        nx = std::clamp(x + t * (*step)[1], x_min, x_max);
        ny = y + t * (*step)[2];
        if (!(nx > 0) || !(ny > 0) || ny > 1) continue;
        nf = merit(np, nx, ny);
        if (nf < f) break;
      }
      if (!(nx > 0) || !(ny > 0) || ny > 1) break;
      clamps = nx == x_min || nx == x_max ? clamps + 1 : 0;
      if (clamps >= 3) break;
      // A crawling merit means a spurious basin; leave it to the branch.
      slow = nf > 0.9 * f && f > 1e-6 ? slow + 1 : 0;
      if (slow >= 5) break;
      const double moved = std::max({std::abs(np - p), std::abs(nx - x), std::abs(ny - y)});
      p = np;
      x = nx;
      y = ny;
      f = nf;
      if (moved <= cfg.newton_tol && f <= 1e-6) {
        converged = true;
        break;
      }
    }
  } catch (const Error& e) {
    if (!e.is_numeric()) throw;
    converged = false;
  }

  // The stationary system has spurious roots (y = 1 for every x, and other
  // sheets of G2 = 0), so the answer is located on the branch through (1, 0)
  // and Newton is credited only when it landed on that same point.
  const Branch br = trace_branch(m, xs, cfg);
  r.newton_iterations += br.newton_iterations;
  const auto& nodes = br.nodes;
  if (br.end == Branch::End::stalled && delta > nodes.back().delta)
    throw NoConvergence("stationary branch stalled before reaching delta", nodes.back().delta, r.newton_iterations);
  if (delta <= nodes.back().delta) {
    std::size_t i = 1;
    while (i + 1 < nodes.size() && nodes[i].delta < delta) ++i;
    BranchNode cur = nodes[i];
    if (br.end == Branch::End::y_one && i + 1 == nodes.size()) {
      // Between the last solved node and the y = 1 line: linear in δ.
      const auto& a = nodes[i - 1];
      const double w = (delta - a.delta) / (cur.delta - a.delta);
      cur.y = a.y + w * (1 - a.y);
      cur.rate = (1 - w) * a.rate;
    } else {
      // Illinois regula falsi on δ(y) - δ between the bracketing nodes.
      double lo = nodes[i - 1].y, hi = nodes[i].y;
      double flo = nodes[i - 1].delta - delta, fhi = nodes[i].delta - delta;
      int side = 0;
      for (int it = 0; it < 200 && hi - lo > 1e-14 && std::abs(cur.delta - delta) > 1e-13; ++it) {
        double yt = fhi != flo ? hi - fhi * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
        if (!(lo < yt && yt < hi)) yt = 0.5 * (lo + hi);
        auto n = solve_at_y(m, yt, guess_x(nodes, yt), cfg, &r.newton_iterations);
        if (!n) throw NoConvergence("stationary branch lost during refinement", yt, r.newton_iterations);
        cur = *n;
        const double ft = cur.delta - delta;
        if ((ft < 0) == (flo < 0)) {
          lo = yt;
          flo = ft;
          if (side == -1) fhi *= 0.5;
          side = -1;
        } else {
          hi = yt;
          fhi = ft;
          if (side == 1) flo *= 0.5;
          side = 1;
        }
      }
    }
    r.p_star = cur.p;
    r.x_star = cur.x;
    r.y_star = cur.y;
    r.rate = cur.rate;
    if (converged && std::abs(x - cur.x) <= 1e-6 * std::max(1.0, cur.x) && std::abs(y - cur.y) <= 1e-6) {
      r.p_star = p;
      r.x_star = x;
      r.y_star = y;
      r.via_newton = true;
      const auto c = m.c_at(x, 0, cfg);
      const auto d = m.d_at(x, y, 0, cfg);
      r.rate = std::max(0.0, rate_formula(c.value, delta, s, y, d.value));
    }
    return r;
  }
  if (br.end == Branch::End::y_one) return clamp_to_sharp(1, 0);
  // Boundary segment at x♯ (or its limit), y from y(x♯) to 1.
  double lo = boundary_y_start(m, xs, br, cfg).value_or(nodes.back().y), hi = 1.0;
  CurvePoint cur = mr_lb_point(m, xs, lo, cfg);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    cur = mr_lb_point(m, xs, mid, cfg);
    (cur.delta < delta ? lo : hi) = mid;
  }
  return clamp_to_sharp(cur.param, cur.rate);
}

MrPointResult mr_fixed_delta(const LabelledGraph& g, double delta, const SolverConfig& cfg, const ScanConfig& scan) {
  return mr_fixed_delta(*make_mr_model(g), delta, cfg, scan);
}

MrCurve mr_curve(const MrModel& m, int n_points, const SolverConfig& cfg, const ScanConfig& scan) {
  cfg.check();
  if (n_points < 2) throw Error(ErrorKind::invalid_parameters, "a curve needs at least 2 points");
  MrCurve out;
  out.xsharp = classify_xsharp(m, scan, cfg);
  const XSharp& xs = out.xsharp;

  // Segment A: the stationary branch, resampled at uniform y.
  const Branch br = trace_branch(m, xs, cfg);
  out.newton_iterations += br.newton_iterations;
  if (br.end == Branch::End::stalled) ++out.failures;
  const auto& nodes = br.nodes;
  const double y_end = nodes.back().y;
  std::vector<std::optional<BranchNode>> samples(static_cast<std::size_t>(n_points));
  std::vector<int> iters(static_cast<std::size_t>(n_points), 0);
  SolverConfig inner = cfg;
  inner.exec = ExecPolicy::serial;
  std::exception_ptr fatal;
#pragma omp parallel for if (cfg.exec == ExecPolicy::parallel) schedule(dynamic)
  for (int i = 0; i < n_points; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      if (i == 0) {
        samples[k] = nodes.front();
      } else if (i == n_points - 1 || nodes.size() == 1) {
        samples[k] = nodes.back();
      } else {
        const double y = y_end * i / (n_points - 1);
        samples[k] = solve_at_y(m, y, guess_x(nodes, y), inner, &iters[k]);
      }
    } catch (...) {
#pragma omp critical
      if (!fatal) fatal = std::current_exception();
    }
  }
  if (fatal) std::rethrow_exception(fatal);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out.newton_iterations += iters[k];
    if (!samples[k]) {
      ++out.failures;
      continue;
    }
    out.points.push_back({Segment::parametric, samples[k]->x, samples[k]->delta, samples[k]->rate});
  }
  if (nodes.size() == 1) out.points.resize(1);

  // Segment B: fixed x♯ (or its limit), y from y(x♯) to 1.
  if (auto y0 = boundary_y_start(m, xs, br, cfg); y0 && *y0 < 1) {
    for (int j = 0; j < n_points; ++j) {
      const double y = *y0 + (1 - *y0) * j / (n_points - 1);
      try {
        out.points.push_back(mr_lb_point(m, xs, y, cfg));
      } catch (const Error& e) {
        if (!e.is_numeric()) throw;
        ++out.failures;
      }
    }
  }
  if (out.points.empty() || out.points.back().delta < 1) out.points.push_back({Segment::zero_tail, 1.0, 1.0, 0.0});
  sort_by_delta(out.points);
  return out;
}

MrCurve mr_curve(const LabelledGraph& g, int n_points, const SolverConfig& cfg, const ScanConfig& scan) {
  return mr_curve(*make_mr_model(g), n_points, cfg, scan);
}

}  // namespace gvb

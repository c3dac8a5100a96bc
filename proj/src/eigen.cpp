#include "gvb/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "gvb/digraph.hpp"
#include "gvb/error.hpp"

namespace gvb {

void SolverConfig::check() const {
  if (!(power_tol > 0) || !(newton_tol > 0))
    throw Error(ErrorKind::invalid_parameters, "tolerances must be positive");
  if (power_max_iter <= 0 || newton_max_iter <= 0)
    throw Error(ErrorKind::invalid_parameters, "iteration caps must be positive");
}

namespace kernels {

namespace serial {

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.n; ++i) {
    double acc = 0.0;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) acc += m.val[k] * x[m.col[k]];
    y[i] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace serial

namespace omp {

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(m.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) acc += m.val[k] * x[m.col[k]];
    y[i] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace omp

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, ExecPolicy policy) {
  if (x.size() != m.n || y.size() != m.n) throw Error(ErrorKind::invalid_parameters, "spmv size mismatch");
  if (policy == ExecPolicy::parallel)
    omp::spmv(m, x, y);
  else
    serial::spmv(m, x, y);
}

double dot(std::span<const double> a, std::span<const double> b, ExecPolicy policy) {
  return policy == ExecPolicy::parallel ? omp::dot(a, b) : serial::dot(a, b);
}

double norm2(std::span<const double> a, ExecPolicy policy) { return std::sqrt(dot(a, a, policy)); }

}  // namespace kernels

int pattern_period(const CsrMatrix& m) {
  Adjacency adj(m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) adj[i].push_back(m.col[k]);
  return max_component_period(adj);
}

namespace {

using Vec = std::vector<double>;

struct Inputs {
  const CsrMatrix* m = nullptr;
  const CsrMatrix* mx = nullptr;
  const CsrMatrix* my = nullptr;
  const CsrMatrix* mxx = nullptr;
  const CsrMatrix* myy = nullptr;
  const CsrMatrix* mxy = nullptr;
};

void check_same_size(const Inputs& in) {
  for (const CsrMatrix* p : {in.mx, in.my, in.mxx, in.myy, in.mxy})
    if (p && p->n != in.m->n) throw Error(ErrorKind::invalid_parameters, "derivative matrix size mismatch");
  if (in.m->n == 0) throw Error(ErrorKind::invalid_parameters, "empty matrix");
}

// Norm carrying the sign of the projection on q.
double signed_norm(const Vec& v, const Vec& q, ExecPolicy policy) {
  const double n = kernels::norm2(v, policy);
  return kernels::dot(v, q, policy) < 0 ? -n : n;
}

bool finite(double v) { return std::isfinite(v); }

EigenPack scalar_case(const Inputs& in) {
  auto value = [](const CsrMatrix* p) { return p ? p->at(0, 0) : 0.0; };
  EigenPack out;
  out.lambda = value(in.m);
  if (!(out.lambda > 0)) throw Error(ErrorKind::numeric_failure, "dominant eigenvalue is not positive");
  if (in.my) {
    Partials d;
    d.x = value(in.mx);
    d.y = value(in.my);
    d.xx = value(in.mxx);
    d.yy = value(in.myy);
    d.xy = value(in.mxy);
    out.partials = d;
  } else {
    if (in.mx) out.d1 = value(in.mx);
    if (in.mxx) out.d2 = value(in.mxx);
  }
  out.eigvec = {1.0};
  out.iterations = 1;
  return out;
}

EigenPack run(const Inputs& in, const SolverConfig& cfg);

std::vector<const CsrMatrix*> all_of(const Inputs& in) { return {in.m, in.mx, in.my, in.mxx, in.myy, in.mxy}; }

CsrMatrix submatrix(const CsrMatrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& local) {
  CsrMatrix out;
  out.n = rows.size();
  out.row_ptr.push_back(0);
  for (std::size_t i : rows) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const std::size_t j = local[a.col[k]];
      if (j == static_cast<std::size_t>(-1)) continue;
      out.col.push_back(j);
      out.val.push_back(a.val[k]);
    }
    out.row_ptr.push_back(out.col.size());
  }
  return out;
}

// Reducible inputs: every matrix is block triangular over the components of
// the joint pattern, so the dominant eigenvalue and its partials are those of
// the dominant diagonal block. Iterating on the blocks avoids the crawl when
// two components have nearly equal radii.
std::optional<EigenPack> by_components(const Inputs& in, const SolverConfig& cfg) {
  const std::size_t n = in.m->n;
  Adjacency adj(n);
  for (const CsrMatrix* a : all_of(in))
    if (a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = a->row_ptr[i]; k < a->row_ptr[i + 1]; ++k) adj[i].push_back(a->col[k]);
  std::size_t ncomp = 0;
  const auto comp = strongly_connected_components(adj, &ncomp);
  if (ncomp <= 1) return std::nullopt;

  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::optional<EigenPack> best;
  std::size_t best_comp = 0;
  int iterations = 0;
  std::vector<std::size_t> local(n, static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < ncomp; ++c) {
    const auto& rows = members[c];
    for (std::size_t i = 0; i < rows.size(); ++i) local[rows[i]] = i;
    std::vector<CsrMatrix> subs;
    for (const CsrMatrix* a : all_of(in)) subs.push_back(a ? submatrix(*a, rows, local) : CsrMatrix{});
    for (std::size_t v : rows) local[v] = static_cast<std::size_t>(-1);
    const CsrMatrix& m0 = subs[0];
    if (std::none_of(m0.val.begin(), m0.val.end(), [](double v) { return v != 0; })) continue;
    Inputs sub;
    const CsrMatrix** slots[] = {&sub.m, &sub.mx, &sub.my, &sub.mxx, &sub.myy, &sub.mxy};
    const auto srcs = all_of(in);
    for (std::size_t k = 0; k < 6; ++k) *slots[k] = srcs[k] ? &subs[k] : nullptr;
    try {
      EigenPack e = run(sub, cfg);
      iterations += e.iterations;
      if (!best || e.lambda > best->lambda) {
        best = std::move(e);
        best_comp = c;
      }
    } catch (const NoConvergence&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric_failure) throw;  // nilpotent block
    }
  }
  if (!best) throw Error(ErrorKind::numeric_failure, "dominant eigenvalue is not positive");

  // Eigenvector: the block's Perron vector, then the components upstream of
  // it (larger ids in Tarjan order) from (λ - M_cc) v_c = M_c,rest v_rest.
  Vec v(n, 0.0);
  for (std::size_t i = 0; i < members[best_comp].size(); ++i) v[members[best_comp][i]] = best->eigvec[i];
  const double lambda = best->lambda;
  const CsrMatrix& m = *in.m;
  for (std::size_t c = best_comp + 1; c < ncomp; ++c) {
    const auto& rows = members[c];
    Vec rhs(rows.size(), 0.0), cur(rows.size(), 0.0), next(rows.size());
    bool any = false;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = m.row_ptr[rows[i]]; k < m.row_ptr[rows[i] + 1]; ++k)
        if (comp[m.col[k]] != c) {
          rhs[i] += m.val[k] * v[m.col[k]];
          any = any || rhs[i] != 0;
        }
    if (!any) continue;
    for (int it = 0; it < cfg.power_max_iter; ++it) {
      double change = 0, size = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double acc = rhs[i];
        for (std::size_t k = m.row_ptr[rows[i]]; k < m.row_ptr[rows[i] + 1]; ++k)
          if (comp[m.col[k]] == c) acc += m.val[k] * v[m.col[k]];
        next[i] = acc / lambda;
        change = std::max(change, std::abs(next[i] - cur[i]));
        size = std::max(size, std::abs(next[i]));
      }
      for (std::size_t i = 0; i < rows.size(); ++i) v[rows[i]] = cur[i] = next[i];
      if (change <= cfg.power_tol * std::max(1.0, size)) break;
    }
  }
  const double norm = kernels::norm2(v, ExecPolicy::serial);
  for (double& x : v) x /= norm;
  best->eigvec = std::move(v);
  best->iterations = iterations;
  return best;
}

EigenPack run(const Inputs& in, const SolverConfig& cfg) {
  cfg.check();
  check_same_size(in);
  if (in.m->n == 1) return scalar_case(in);
  if (auto e = by_components(in, cfg)) return std::move(*e);

  // Thread start-up dominates below a few thousand rows.
  const ExecPolicy pol = in.m->n >= parallel_min_dim ? cfg.exec : ExecPolicy::serial;
  const bool par = pol == ExecPolicy::parallel;
  const std::size_t n = in.m->n;
  const auto sn = static_cast<std::ptrdiff_t>(n);

  // Periodic patterns have several eigenvalues of maximal modulus; a
  // diagonal shift makes the dominant one unique without moving derivatives.
  // Nearly periodic matrices get the same treatment once plain iteration
  // stalls; the fixed points of r and s do not depend on the shift.
  double shift = 0.0;
  if (pattern_period(*in.m) > 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = in.m->row_ptr[i]; k < in.m->row_ptr[i + 1]; ++k) s += in.m->val[k];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    shift = 0.5 * (lo + hi);
  }
  const int stall_check = std::min(cfg.power_max_iter / 4, 300);

  const bool hx = in.mx != nullptr, hy = in.my != nullptr;
  const bool hxx = in.mxx != nullptr, hyy = in.myy != nullptr, hxy = in.mxy != nullptr;

  Vec q(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vec rx(n, 0.0), ry(n, 0.0), sxx(n, 0.0), syy(n, 0.0), sxy(n, 0.0);
  Vec mq(n), mrx(n), mry(n), msxx(n), msyy(n), msxy(n);
  Vec mxq(n), myq(n), mxxq(n), myyq(n), mxyq(n), mxrx(n), mxry(n), myrx(n), myry(n);
  Vec vx(n), vy(n), wxx(n), wyy(n), wxy(n);

  auto apply = [&](const CsrMatrix& a, const Vec& x, Vec& y, bool shifted) {
    kernels::spmv(a, x, y, pol);
    if (shifted && shift != 0.0) {
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) y[i] += shift * x[i];
    }
  };

  double lambda = 0, mux = 0, muy = 0, nuxx = 0, nuyy = 0, nuxy = 0;
  double prev_step = 0;
  int oscillations = 0;
  double prev_mux = 0, prev_muy = 0, prev_nuxx = 0, prev_nuyy = 0, prev_nuxy = 0;

  for (int it = 1; it <= cfg.power_max_iter; ++it) {
    if (it == stall_check && shift == 0.0 && oscillations >= 4) {
      // Restart the derivative recurrences; their transient is lost anyway.
      shift = lambda;
      std::fill(rx.begin(), rx.end(), 0.0);
      std::fill(ry.begin(), ry.end(), 0.0);
      std::fill(sxx.begin(), sxx.end(), 0.0);
      std::fill(syy.begin(), syy.end(), 0.0);
      std::fill(sxy.begin(), sxy.end(), 0.0);
    }
    apply(*in.m, q, mq, true);
    const double prev_lambda = lambda;
    lambda = kernels::norm2(mq, pol);
    // Oscillating iterates point at subdominant eigenvalues on (or near)
    // the spectral circle; monotone ones just converge slowly.
    if (it > stall_check / 2 && it > 2) {
      const double step = lambda - prev_lambda;
      if (step != 0 && prev_step != 0 && (step < 0) != (prev_step < 0)) ++oscillations;
      prev_step = step;
    }
    if (!finite(lambda)) throw Error(ErrorKind::numeric_failure, "non-finite eigenvalue iterate");
    if (!(lambda > 0)) throw Error(ErrorKind::numeric_failure, "dominant eigenvalue is not positive");

    if (hx) {
      apply(*in.mx, q, mxq, false);
      apply(*in.m, rx, mrx, true);
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) vx[i] = mxq[i] + mrx[i] - lambda * rx[i];
      mux = signed_norm(vx, q, pol);
    }
    if (hy) {
      apply(*in.my, q, myq, false);
      apply(*in.m, ry, mry, true);
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) vy[i] = myq[i] + mry[i] - lambda * ry[i];
      muy = signed_norm(vy, q, pol);
    }
    if (hxx) {
      apply(*in.mxx, q, mxxq, false);
      apply(*in.mx, rx, mxrx, false);
      apply(*in.m, sxx, msxx, true);
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i)
        wxx[i] = mxxq[i] + 2 * mxrx[i] + msxx[i] - lambda * sxx[i] - 2 * mux * rx[i];
      nuxx = signed_norm(wxx, q, pol);
    }
    if (hyy) {
      apply(*in.myy, q, myyq, false);
      apply(*in.my, ry, myry, false);
      apply(*in.m, syy, msyy, true);
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i)
        wyy[i] = myyq[i] + 2 * myry[i] + msyy[i] - lambda * syy[i] - 2 * muy * ry[i];
      nuyy = signed_norm(wyy, q, pol);
    }
    if (hxy) {
      apply(*in.mxy, q, mxyq, false);
      apply(*in.mx, ry, mxry, false);
      apply(*in.my, rx, myrx, false);
      apply(*in.m, sxy, msxy, true);
#pragma omp parallel for if (par) schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i)
        wxy[i] = mxyq[i] + mxry[i] + myrx[i] + msxy[i] - lambda * sxy[i] - mux * ry[i] - muy * rx[i];
      nuxy = signed_norm(wxy, q, pol);
    }

    // Updates use the previous q, r, s with the current scalar iterates.
    double diff2 = 0.0;
    const double inv = 1.0 / lambda;
#pragma omp parallel for if (par) reduction(+ : diff2) schedule(static)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
      const double qi = q[i];
      if (hxx) sxx[i] = (wxx[i] + lambda * sxx[i] - nuxx * qi) * inv;
      if (hyy) syy[i] = (wyy[i] + lambda * syy[i] - nuyy * qi) * inv;
      if (hxy) sxy[i] = (wxy[i] + lambda * sxy[i] - nuxy * qi) * inv;
      if (hx) rx[i] = (vx[i] + lambda * rx[i] - mux * qi) * inv;
      if (hy) ry[i] = (vy[i] + lambda * ry[i] - muy * qi) * inv;
      const double qnew = mq[i] * inv;
      diff2 += (qnew - qi) * (qnew - qi);
      q[i] = qnew;
    }

    auto settled = [&](bool has, double cur, double prev) {
      return !has || std::abs(cur - prev) <= 10 * cfg.power_tol * std::max(1.0, std::abs(cur));
    };
    const bool done = std::sqrt(diff2) <= cfg.power_tol && it > 1 && settled(hx, mux, prev_mux) &&
                      settled(hy, muy, prev_muy) && settled(hxx, nuxx, prev_nuxx) &&
                      settled(hyy, nuyy, prev_nuyy) && settled(hxy, nuxy, prev_nuxy);
    for (double v : {mux, muy, nuxx, nuyy, nuxy})
      if (!finite(v)) throw Error(ErrorKind::numeric_failure, "non-finite derivative iterate");
    prev_mux = mux;
    prev_muy = muy;
    prev_nuxx = nuxx;
    prev_nuyy = nuyy;
    prev_nuxy = nuxy;

    if (done) {
      EigenPack out;
      out.lambda = lambda - shift;
      if (!(out.lambda > 0)) throw Error(ErrorKind::numeric_failure, "dominant eigenvalue is not positive");
      if (hy) {
        out.partials = Partials{mux, muy, nuxx, nuyy, nuxy};
      } else {
        if (hx) out.d1 = mux;
        if (hxx) out.d2 = nuxx;
      }
      out.eigvec = std::move(q);
      out.iterations = it;
      return out;
    }
  }
  throw NoConvergence("power iteration did not converge within " + std::to_string(cfg.power_max_iter) +
                          " iterations (last eigenvalue " + std::to_string(lambda - shift) + ")",
                      lambda - shift, cfg.power_max_iter);
}

}  // namespace

EigenPack power_iteration(const CsrMatrix& m, const SolverConfig& cfg) {
  Inputs in;
  in.m = &m;
  return run(in, cfg);
}

EigenPack power_I(const CsrMatrix& m, const CsrMatrix& m1, const SolverConfig& cfg) {
  Inputs in;
  in.m = &m;
  in.mx = &m1;
  return run(in, cfg);
}

EigenPack power_II(const CsrMatrix& m, const CsrMatrix& m1, const CsrMatrix& m2, const SolverConfig& cfg) {
  Inputs in;
  in.m = &m;
  in.mx = &m1;
  in.mxx = &m2;
  return run(in, cfg);
}

EigenPack power_III(const CsrMatrix& m, const CsrMatrix& mx, const CsrMatrix& my, const CsrMatrix& mxx,
                    const CsrMatrix& myy, const CsrMatrix& mxy, const SolverConfig& cfg) {
  Inputs in;
  in.m = &m;
  in.mx = &mx;
  in.my = &my;
  in.mxx = &mxx;
  in.myy = &myy;
  in.mxy = &mxy;
  return run(in, cfg);
}

EigenPack eigen_at(const SparsePolyMatrix& m, double t, int order, const SolverConfig& cfg) {
  if (m.signature() == Signature::xy)
    throw Error(ErrorKind::invalid_parameters, "eigen_at needs a univariate matrix");
  const Var v = m.signature() == Signature::y ? Var::y : Var::z;
  const CsrMatrix m0 = m.eval(t);
  if (order <= 0) return power_iteration(m0, cfg);
  const CsrMatrix m1 = m.derivative(v, 1).eval(t);
  if (order == 1) return power_I(m0, m1, cfg);
  const CsrMatrix m2 = m.derivative(v, 2).eval(t);
  return power_II(m0, m1, m2, cfg);
}

}  // namespace gvb

#include "gvb/polymat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gvb/error.hpp"

namespace gvb {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// falling factorial e (e-1) ... (e-order+1)
double falling(int e, int order) {
  double r = 1.0;
  for (int i = 0; i < order; ++i) r *= e - i;
  return r;
}

}  // namespace

Poly Poly::monomial(double c, int a, int b) {
  if (a < 0 || b < 0) throw Error(ErrorKind::invalid_parameters, "negative exponent");
  Poly p;
  if (c != 0.0) p.terms_.push_back({a, b, c});
  return p;
}

void Poly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& l, const Term& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); });
  std::vector<Term> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().a == t.a && merged.back().b == t.b)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

double Poly::eval(double u, double v) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * ipow(u, t.a) * ipow(v, t.b);
  return s;
}

Poly Poly::derivative(bool in_a, int order) const {
  Poly out;
  for (const auto& t : terms_) {
    const int e = in_a ? t.a : t.b;
    if (e < order) continue;
    Term d = t;
    d.coeff *= falling(e, order);
    (in_a ? d.a : d.b) -= order;
    out.terms_.push_back(d);
  }
  out.normalize();
  return out;
}

Poly Poly::coefficient(int k) const {
  Poly out;
  for (const auto& t : terms_)
    if (t.a == k) out.terms_.push_back({0, t.b, t.coeff});
  out.normalize();
  return out;
}

Poly Poly::fix_a(double u) const {
  Poly out;
  for (const auto& t : terms_) out.terms_.push_back({0, t.b, t.coeff * ipow(u, t.a)});
  out.normalize();
  return out;
}

int Poly::max_a() const noexcept {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.a);
  return m;
}

int Poly::max_b() const noexcept {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.b);
  return m;
}

Poly& Poly::operator+=(const Poly& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

Poly Poly::scaled(double factor) const {
  Poly out = *this;
  for (auto& t : out.terms_) t.coeff *= factor;
  out.normalize();
  return out;
}

std::string Poly::to_string(Signature sig) const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  for (const auto& t : terms_) {
    if (!out.empty()) out += '+';
    std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
    out += buf;
    switch (sig) {
      case Signature::y: out += "*y^" + std::to_string(t.b); break;
      case Signature::z: out += "*z^" + std::to_string(t.a); break;
      case Signature::xy: out += "*x^" + std::to_string(t.a) + "*y^" + std::to_string(t.b); break;
    }
  }
  return out;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return 0.0;
}

std::vector<double> CsrMatrix::dense() const {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out[i * n + col[k]] = val[k];
  return out;
}

SparsePolyMatrix::SparsePolyMatrix(std::size_t n, Signature sig) : sig_(sig), rows_(n) {
  if (n == 0) throw Error(ErrorKind::invalid_parameters, "matrix dimension must be positive");
}

void SparsePolyMatrix::add(std::size_t i, std::size_t j, const Poly& p) {
  if (i >= size() || j >= size()) throw Error(ErrorKind::invalid_parameters, "matrix index out of range");
  if (p.empty()) return;
  auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const auto& e, std::size_t c) { return e.first < c; });
  if (it != r.end() && it->first == j) {
    it->second += p;
    if (it->second.empty()) r.erase(it);
  } else {
    r.insert(it, {j, p});
  }
}

Poly SparsePolyMatrix::entry(std::size_t i, std::size_t j) const {
  for (const auto& [c, p] : rows_.at(i))
    if (c == j) return p;
  return {};
}

std::size_t SparsePolyMatrix::nnz() const noexcept {
  std::size_t k = 0;
  for (const auto& r : rows_) k += r.size();
  return k;
}

bool SparsePolyMatrix::uses_slot_a(Var var) const {
  switch (sig_) {
    case Signature::y:
      if (var != Var::y) throw Error(ErrorKind::invalid_parameters, "variable not in signature");
      return false;
    case Signature::z:
      if (var != Var::z) throw Error(ErrorKind::invalid_parameters, "variable not in signature");
      return true;
    case Signature::xy:
      if (var == Var::z) throw Error(ErrorKind::invalid_parameters, "variable not in signature");
      return var == Var::x;
  }
  return false;
}

CsrMatrix SparsePolyMatrix::eval(double first, double second) const {
  double u = 0.0, v = 0.0;
  switch (sig_) {
    case Signature::y: v = first; break;
    case Signature::z: u = first; break;
    case Signature::xy: u = first; v = second; break;
  }
  if (u < 0.0 || v < 0.0 || std::isnan(u) || std::isnan(v))
    throw Error(ErrorKind::domain_error, "matrix evaluated at a negative point");
  CsrMatrix m;
  m.n = size();
  m.row_ptr.reserve(m.n + 1);
  m.row_ptr.push_back(0);
  for (const auto& r : rows_) {
    for (const auto& [c, p] : r) {
      const double value = p.eval(u, v);
      if (value == 0.0) continue;
      m.col.push_back(c);
      m.val.push_back(value);
    }
    m.row_ptr.push_back(m.val.size());
  }
  return m;
}

SparsePolyMatrix SparsePolyMatrix::derivative(Var var, int order) const {
  if (order < 0) throw Error(ErrorKind::invalid_parameters, "negative derivative order");
  const bool in_a = uses_slot_a(var);
  SparsePolyMatrix out(size(), sig_);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [c, p] : rows_[i]) {
      Poly d = p.derivative(in_a, order);
      if (!d.empty()) out.rows_[i].push_back({c, std::move(d)});
    }
  return out;
}

SparsePolyMatrix SparsePolyMatrix::coefficient_matrix(int k) const {
  if (sig_ != Signature::xy) throw Error(ErrorKind::invalid_parameters, "coefficient_matrix needs a bivariate matrix");
  SparsePolyMatrix out(size(), Signature::y);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [c, p] : rows_[i]) {
      Poly q = p.coefficient(k);
      if (!q.empty()) out.rows_[i].push_back({c, std::move(q)});
    }
  return out;
}

SparsePolyMatrix SparsePolyMatrix::at_x(double x) const {
  if (sig_ != Signature::xy) throw Error(ErrorKind::invalid_parameters, "at_x needs a bivariate matrix");
  if (x < 0.0) throw Error(ErrorKind::domain_error, "matrix evaluated at a negative point");
  SparsePolyMatrix out(size(), Signature::y);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [c, p] : rows_[i]) {
      Poly q = p.fix_a(x);
      if (!q.empty()) out.rows_[i].push_back({c, std::move(q)});
    }
  return out;
}

int SparsePolyMatrix::max_degree(Var var) const {
  const bool in_a = uses_slot_a(var);
  int m = 0;
  for (const auto& r : rows_)
    for (const auto& [c, p] : r) m = std::max(m, in_a ? p.max_a() : p.max_b());
  return m;
}

bool SparsePolyMatrix::operator==(const SparsePolyMatrix& other) const {
  return sig_ == other.sig_ && rows_ == other.rows_;
}

std::string SparsePolyMatrix::dump() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [c, p] : rows_[i]) out << i << ' ' << c << ' ' << p.to_string(sig_) << '\n';
  return out.str();
}

}  // namespace gvb

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>

#include "gvb/graphs.hpp"
#include "gvb/gvcore.hpp"
#include "gvb/mrcore.hpp"
#include "gvb/product.hpp"
#include "support.hpp"

using namespace gvb;

namespace {

using Counts = std::vector<long long>;

std::vector<LabelledGraph> s1_systems() {
  return {build_swcc(3, 2), build_swcc(4, 2), build_swcc(5, 3), build_rll(1, 3),
          build_rll(3, 7),  build_rll(0, 1),  build_rll(2, 4),  build_secc_multistate(3, 2)};
}

// v <- T v with integer polynomial entries; coefficient t of y^t.
std::vector<Counts> multiply(const SparsePolyMatrix& t, const std::vector<Counts>& v) {
  std::vector<Counts> out(v.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (const auto& [j, p] : t.row(i))
      for (const auto& term : p.terms())
        for (std::size_t k = 0; k < v[j].size(); ++k) {
          if (v[j][k] == 0) continue;
          const std::size_t e = k + static_cast<std::size_t>(term.b);
          if (out[i].size() <= e) out[i].resize(e + 1, 0);
          out[i][e] += static_cast<long long>(term.coeff) * v[j][k];
        }
  return out;
}

std::vector<Counts> power_ones(const SparsePolyMatrix& t, int n) {
  std::vector<Counts> v(t.size(), Counts{1});
  for (int k = 0; k < n; ++k) v = multiply(t, v);
  return v;
}

void add_into(Counts& acc, const Counts& c) {
  if (acc.size() < c.size()) acc.resize(c.size(), 0);
  for (std::size_t k = 0; k < c.size(); ++k) acc[k] += c[k];
}

void trim(Counts& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// Label sequences of every length-n path, one entry per path.
std::vector<std::string> path_labels(const LabelledGraph& g, int n) {
  std::vector<std::string> out;
  std::function<void(std::size_t, int, const std::string&)> walk = [&](std::size_t v, int k, const std::string& acc) {
    if (k == n) {
      out.push_back(acc);
      return;
    }
    for (const auto& e : g.edges())
      if (e.from == v) walk(e.to, k + 1, acc + e.label);
  };
  for (std::size_t v = 0; v < g.num_states(); ++v) walk(v, 0, "");
  return out;
}

Counts pair_histogram(const std::vector<std::string>& words) {
  Counts out;
  for (const auto& a : words)
    for (const auto& b : words) {
      const auto d = static_cast<std::size_t>(hamming(a, b));
      if (out.size() <= d) out.resize(d + 1, 0);
      ++out[d];
    }
  trim(out);
  return out;
}

std::string bitstring(unsigned w, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (w >> (n - 1 - i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

bool swcc32_after_11(const std::string& w) {
  const std::string x = "11" + w;
  for (std::size_t i = 0; i + 3 <= x.size(); ++i)
    if (std::count(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(i) + 3, '0') > 1) return false;
  return true;
}

// RLL(1,3) after a one: no adjacent ones, no four zeroes in a row.
bool rll13_after_1(const std::string& w) {
  const std::string x = "1" + w;
  return x.find("11") == std::string::npos && x.find("0000") == std::string::npos;
}

}  // namespace

TEST_CASE("path pair counts from powers of T") {
  for (const auto& g : {build_swcc(3, 2), build_rll(1, 3)}) {
    const auto t = build_T(g);
    for (int n = 1; n <= 8; ++n) {
      Counts symbolic;
      for (const auto& c : power_ones(t, n)) add_into(symbolic, c);
      trim(symbolic);
      CHECK_MESSAGE(symbolic == pair_histogram(path_labels(g, n)), "n=", n);
    }
  }
}

TEST_CASE("word pair counts from a fixed start state") {
  struct Case {
    LabelledGraph g;
    std::size_t start;
    std::function<bool(const std::string&)> admissible;
  };
  const std::vector<Case> cases{{build_swcc(3, 2), 0, swcc32_after_11}, {build_rll(1, 3), 0, rll13_after_1}};
  for (const auto& c : cases) {
    const auto t = build_T(c.g);
    const std::size_t nv = c.g.num_states();
    for (int n = 1; n <= 8; ++n) {
      std::vector<std::string> words;
      for (unsigned w = 0; w < (1u << n); ++w)
        if (auto s = bitstring(w, n); c.admissible(s)) words.push_back(s);
      auto row = power_ones(t, n)[c.start * nv + c.start];
      trim(row);
      CHECK_MESSAGE(row == pair_histogram(words), "n=", n);
    }
  }
}

TEST_CASE("spectral endpoint identities on all bit-serial systems") {
  SolverConfig cfg;
  for (const auto& g : s1_systems()) {
    const auto b = build_B(g);
    const double a = power_iteration(adjacency_matrix(g).eval(0), cfg).lambda;
    CHECK(a == doctest::Approx(test::dense_radius(adjacency_matrix(g).eval(0))).epsilon(1e-9));
    CHECK(test::rel_err(power_iteration(b.eval(1.0), cfg).lambda, a * a) <= 1e-8);
    CHECK(test::rel_err(test::dense_radius(b.eval(0.0)), a) <= 1e-8);
    CHECK(b == reduce_to_B(build_T(g), StatePairIndex(g.num_states())));
    const auto d = build_D(g);
    for (double y : {0.0, 0.5, 1.0}) CHECK(d.eval(1.0, y).dense() == b.eval(y).dense());
    const MatrixMrModel m(g);
    for (double x : {0.5, 1.0, 2.0}) {
      const double c = m.c_at(x, 0, cfg).value;
      CHECK(test::rel_err(m.d_at(x, 1.0, 0, cfg).value, c * c) <= 1e-8);
    }
  }
}

TEST_CASE("bounds are ordered along the curves") {
  for (const auto& g : {build_swcc(3, 2), build_rll(1, 3), build_rll(3, 7)}) {
    const double cap = capacity(g);
    const auto gv = gv_curve(g, 100);
    const auto mr = mr_curve(g, 100);
    for (const auto& p : gv) {
      if (p.segment != Segment::parametric) continue;
      CHECK(p.rate >= simple_lb(cap, p.delta) - 1e-6);
      CHECK(rate_at(mr.points, p.delta) >= p.rate - 1e-6);
    }
    for (const auto& p : mr.points) CHECK(p.rate >= simple_lb(cap, p.delta) - 1e-6);
  }
}

TEST_CASE("symmetric constraint has its MR maximum at x = 1") {
  const LabelledGraph g({"a", "b"}, {{0, 0, "0"}, {0, 1, "1"}, {1, 1, "1"}, {1, 0, "0"}}, 1);
  const MatrixMrModel m(g);
  const double d1 = m.Delta(1.0, {});
  for (double x : {0.3, 0.7, 1.5, 4.0}) {
    CHECK(m.Delta(x, {}) < d1);
    CHECK(m.Delta(x, {}) == doctest::Approx(m.Delta(1 / x, {})).epsilon(1e-8));
  }
}

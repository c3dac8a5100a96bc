#include "gvb/product.hpp"

#include <algorithm>

#include "gvb/error.hpp"

namespace gvb {

namespace {

void require_product_support(const LabelledGraph& g) {
  if (g.symbol_length() != 1 && !g.single_state())
    throw Error(ErrorKind::unsupported_configuration,
                "product matrices need s = 1 unless the graph has a single state");
}

void require_subset(const LabelledGraph& g, const EdgeSubset& subset) {
  if (subset.size() != g.num_edges())
    throw Error(ErrorKind::invalid_parameters, "edge subset size does not match the edge count");
}

std::vector<std::vector<std::size_t>> out_edges(const LabelledGraph& g) {
  std::vector<std::vector<std::size_t>> out(g.num_states());
  const auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) out[edges[k].from].push_back(k);
  return out;
}

}  // namespace

StatePairIndex::StatePairIndex(std::size_t num_states) : n_(num_states) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) pairs_.emplace_back(i, j);
}

std::size_t StatePairIndex::index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw Error(ErrorKind::invalid_parameters, "state index out of range");
  if (i > j) std::swap(i, j);
  // rows before i contribute n + (n-1) + ... + (n-i+1)
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

EdgeSubset ones_subset(const LabelledGraph& g) {
  if (g.symbol_length() != 1)
    throw Error(ErrorKind::unsupported_configuration,
                "default edge subset is defined for s = 1 only; supply P explicitly");
  EdgeSubset out;
  for (const auto& e : g.edges()) out.push_back(e.label == "1");
  return out;
}

SparsePolyMatrix adjacency_matrix(const LabelledGraph& g) {
  SparsePolyMatrix a(g.num_states(), Signature::y);
  for (const auto& e : g.edges()) a.add(e.from, e.to, Poly::constant(1.0));
  return a;
}

SparsePolyMatrix build_T(const LabelledGraph& g) {
  require_product_support(g);
  const std::size_t n = g.num_states();
  SparsePolyMatrix t(n * n, Signature::y);
  const auto edges = g.edges();
  for (const auto& e1 : edges)
    for (const auto& e2 : edges)
      t.add(e1.from * n + e2.from, e1.to * n + e2.to, Poly::monomial(1.0, 0, hamming(e1.label, e2.label)));
  return t;
}

SparsePolyMatrix build_T_xy(const LabelledGraph& g, const EdgeSubset& subset) {
  require_product_support(g);
  require_subset(g, subset);
  const std::size_t n = g.num_states();
  SparsePolyMatrix t(n * n, Signature::xy);
  const auto edges = g.edges();
  for (std::size_t a = 0; a < edges.size(); ++a)
    for (std::size_t b = 0; b < edges.size(); ++b) {
      const auto& e1 = edges[a];
      const auto& e2 = edges[b];
      const int xe = int(subset[a]) + int(subset[b]);
      t.add(e1.from * n + e2.from, e1.to * n + e2.to, Poly::monomial(1.0, xe, hamming(e1.label, e2.label)));
    }
  return t;
}

SparsePolyMatrix reduce_to_B(const SparsePolyMatrix& t, const StatePairIndex& index) {
  const std::size_t n = index.num_states();
  if (t.size() != n * n) throw Error(ErrorKind::invalid_parameters, "product matrix does not match the pair index");
  SparsePolyMatrix b(index.size(), t.signature());
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto [i, j] = index.pair(r);
    // Columns (k,l) and (l,k) land on the same merged column.
    for (const auto& [c, p] : t.row(i * n + j)) b.add(r, index.index(c / n, c % n), p);
  }
  return b;
}

SparsePolyMatrix build_B(const LabelledGraph& g) {
  require_product_support(g);
  const StatePairIndex index(g.num_states());
  const auto out = out_edges(g);
  const auto edges = g.edges();
  SparsePolyMatrix b(index.size(), Signature::y);
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto [i, j] = index.pair(r);
    for (std::size_t a : out[i])
      for (std::size_t c : out[j]) {
        const auto& e1 = edges[a];
        const auto& e2 = edges[c];
        b.add(r, index.index(e1.to, e2.to), Poly::monomial(1.0, 0, hamming(e1.label, e2.label)));
      }
  }
  return b;
}

SparsePolyMatrix build_C(const LabelledGraph& g, const EdgeSubset& subset) {
  require_subset(g, subset);
  SparsePolyMatrix c(g.num_states(), Signature::z);
  const auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k)
    c.add(edges[k].from, edges[k].to, Poly::monomial(1.0, subset[k] ? 1 : 0, 0));
  return c;
}

SparsePolyMatrix build_C(const LabelledGraph& g) { return build_C(g, ones_subset(g)); }

SparsePolyMatrix build_D(const LabelledGraph& g, const EdgeSubset& subset) {
  require_product_support(g);
  require_subset(g, subset);
  const StatePairIndex index(g.num_states());
  const auto out = out_edges(g);
  const auto edges = g.edges();
  SparsePolyMatrix d(index.size(), Signature::xy);
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto [i, j] = index.pair(r);
    for (std::size_t a : out[i])
      for (std::size_t c : out[j]) {
        const auto& e1 = edges[a];
        const auto& e2 = edges[c];
        const int xe = int(subset[a]) + int(subset[c]);
        d.add(r, index.index(e1.to, e2.to), Poly::monomial(1.0, xe, hamming(e1.label, e2.label)));
      }
  }
  return d;
}

SparsePolyMatrix build_D(const LabelledGraph& g) { return build_D(g, ones_subset(g)); }

}  // namespace gvb

#pragma once

#include <cstddef>
#include <vector>

#include "gvb/graphs.hpp"
#include "gvb/polymat.hpp"

namespace gvb {

/// Unordered state pairs (i, j), i <= j, in lexicographic order.
class StatePairIndex {
 public:
  explicit StatePairIndex(std::size_t num_states);

  std::size_t num_states() const noexcept { return n_; }
  std::size_t size() const noexcept { return pairs_.size(); }

  /// Merged index of the ordered pair (i, j); (i, j) and (j, i) coincide.
  std::size_t index(std::size_t i, std::size_t j) const;
  std::pair<std::size_t, std::size_t> pair(std::size_t k) const { return pairs_.at(k); }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Marks which edges belong to the subset P used by the MR matrices.
using EdgeSubset = std::vector<bool>;

/// Default P for s = 1: the edges labelled "1".
EdgeSubset ones_subset(const LabelledGraph& g);

/// Constant matrix counting edges u -> v.
SparsePolyMatrix adjacency_matrix(const LabelledGraph& g);

/// Product-graph distance matrix over ordered pairs, index i*|V| + j.
SparsePolyMatrix build_T(const LabelledGraph& g);

/// Bivariate product matrix before merging: x^{[e1 in P] + [e2 in P]} y^{d_H}.
SparsePolyMatrix build_T_xy(const LabelledGraph& g, const EdgeSubset& subset);

/// Merges equivalent ordered pairs of a product matrix (any signature).
SparsePolyMatrix reduce_to_B(const SparsePolyMatrix& t, const StatePairIndex& index);

/// Reduced distance matrix built directly from edge pairs at each unordered
/// state pair, without forming the full product.
SparsePolyMatrix build_B(const LabelledGraph& g);

/// z^{[e in P]} summed over edges u -> v.
SparsePolyMatrix build_C(const LabelledGraph& g, const EdgeSubset& subset);
SparsePolyMatrix build_C(const LabelledGraph& g);

/// Reduced bivariate matrix built directly from edge pairs.
SparsePolyMatrix build_D(const LabelledGraph& g, const EdgeSubset& subset);
SparsePolyMatrix build_D(const LabelledGraph& g);

}  // namespace gvb

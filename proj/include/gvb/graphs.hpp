#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gvb {

struct Edge {
  std::size_t from;
  std::size_t to;
  std::string label;  // bit string of length s

  bool operator==(const Edge&) const = default;
};

/// A labelled directed graph presenting a binary constrained system.
///
/// Construction checks the structural invariants (nonempty, label alphabet and
/// length, edge endpoints in range, unique state names). Determinism and
/// connectivity are reported by validate() so that parse_graph can surface
/// them as diagnostics; the built-in families are deterministic by
/// construction.
class LabelledGraph {
 public:
  LabelledGraph(std::vector<std::string> states, std::vector<Edge> edges, int symbol_length);

  std::size_t num_states() const noexcept { return states_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  int symbol_length() const noexcept { return symbol_length_; }
  bool single_state() const noexcept { return states_.size() == 1; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::string> states() const noexcept { return states_; }
  const std::string& state_name(std::size_t i) const { return states_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Edge labels in declaration order (useful for single-state graphs).
  std::vector<std::string> labels() const;

 private:
  std::vector<std::string> states_;
  std::vector<Edge> edges_;
  int symbol_length_;
};

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity;
  std::string message;
};

/// Determinism, dead ends, reachability from the first state, and
/// irreducibility / primitivity of the adjacency pattern.
std::vector<Diagnostic> validate(const LabelledGraph& graph);

bool has_errors(std::span<const Diagnostic> diagnostics);

/// Period of the adjacency pattern (gcd of cycle lengths) when the graph is
/// strongly connected; std::nullopt when it is reducible.
std::optional<int> adjacency_period(const LabelledGraph& graph);

/// (L,w) sliding-window constraint: every L consecutive bits carry at least w
/// ones. States record the positions of the most recent w ones inside the
/// window, giving C(L,w) states.
LabelledGraph build_swcc(int window, int weight);

/// (d,k) runlength-limited constraint; state i counts trailing zeroes.
LabelledGraph build_rll(int d, int k);

/// (L,w) subblock-energy constraint as a single state with one self-loop per
/// length-L word of weight at least w (s = L).
LabelledGraph build_secc(int length, int weight);

/// Bit-serial (s = 1) presentation of the same subblock-energy words; states
/// track (position in subblock, weight so far, capped at w).
LabelledGraph build_secc_multistate(int length, int weight);

/// Reads the JSON graph format:
/// { "s": 1, "states": ["a","b"], "edges": [{"from":"a","to":"b","label":"0"}] }
/// Error-level diagnostics raise gvb::Error; warnings are appended to
/// `warnings` when provided.
LabelledGraph parse_graph(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

std::string to_json(const LabelledGraph& graph);

/// Hamming distance between equal-length bit strings.
int hamming(std::string_view a, std::string_view b);

long long binomial(int n, int k);

}  // namespace gvb

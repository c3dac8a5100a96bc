#include "gvb/graphs.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "gvb/digraph.hpp"
#include "gvb/error.hpp"

namespace gvb {

namespace {

Adjacency adjacency_lists(const LabelledGraph& g) {
  Adjacency adj(g.num_states());
  for (const auto& e : g.edges()) adj[e.from].push_back(e.to);
  return adj;
}

std::string bits(unsigned long long value, int width) {
  std::string out(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i)
    if (value >> (width - 1 - i) & 1ULL) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

// Breadth-first construction of a presentation from an implicit automaton.
// Key is the internal state, `step` returns the successor for a bit or nullopt.
template <class Key, class Step, class Name>
LabelledGraph explore(Key start, Step step, Name name) {
  std::map<Key, std::size_t> index;
  std::vector<Key> order;
  std::vector<Edge> edges;
  index.emplace(start, 0);
  order.push_back(start);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Key cur = order[head];
    for (char bit : {'0', '1'}) {
      std::optional<Key> next = step(cur, bit);
      if (!next) continue;
      auto [it, inserted] = index.emplace(*next, order.size());
      if (inserted) order.push_back(*next);
      edges.push_back({head, it->second, std::string(1, bit)});
    }
  }
  std::vector<std::string> names;
  names.reserve(order.size());
  for (const auto& k : order) names.push_back(name(k));
  return LabelledGraph(std::move(names), std::move(edges), 1);
}

}  // namespace

LabelledGraph::LabelledGraph(std::vector<std::string> states, std::vector<Edge> edges, int symbol_length)
    : states_(std::move(states)), edges_(std::move(edges)), symbol_length_(symbol_length) {
  if (symbol_length_ <= 0)
    throw Error(ErrorKind::invalid_graph, "symbol length must be positive");
  if (states_.empty()) throw Error(ErrorKind::invalid_graph, "graph has no states");
  if (edges_.empty()) throw Error(ErrorKind::invalid_graph, "graph has no edges");
  std::set<std::string> seen;
  for (const auto& s : states_)
    if (!seen.insert(s).second) throw Error(ErrorKind::invalid_graph, "duplicate state '" + s + "'");
  for (const auto& e : edges_) {
    if (e.from >= states_.size() || e.to >= states_.size())
      throw Error(ErrorKind::invalid_graph, "edge endpoint out of range");
    if (e.label.size() != static_cast<std::size_t>(symbol_length_))
      throw Error(ErrorKind::invalid_graph, "label '" + e.label + "' does not have length " +
                                                std::to_string(symbol_length_));
    if (e.label.find_first_not_of("01") != std::string::npos)
      throw Error(ErrorKind::invalid_graph, "label '" + e.label + "' is not a bit string");
  }
}

std::optional<std::size_t> LabelledGraph::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string> LabelledGraph::labels() const {
  std::vector<std::string> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(e.label);
  return out;
}

std::vector<Diagnostic> validate(const LabelledGraph& g) {
  using S = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  const std::size_t n = g.num_states();

  std::vector<std::set<std::string>> outgoing(n);
  for (const auto& e : g.edges()) {
    if (!outgoing[e.from].insert(e.label).second)
      out.push_back({S::error, "state '" + g.state_name(e.from) + "' has two outgoing edges labelled '" +
                                   e.label + "' (not deterministic)"});
  }
  for (std::size_t v = 0; v < n; ++v)
    if (outgoing[v].empty())
      out.push_back({S::warning, "state '" + g.state_name(v) + "' has no outgoing edge"});

  const Adjacency adj = adjacency_lists(g);
  const auto seen = reachable_from(adj, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (!seen[v])
      out.push_back({S::warning, "state '" + g.state_name(v) + "' is unreachable from '" +
                                     g.state_name(0) + "'"});

  const auto period = adjacency_period(g);
  if (!period)
    out.push_back({S::warning, "adjacency matrix is reducible; convergence not guaranteed"});
  else if (*period > 1)
    out.push_back({S::warning, "adjacency matrix is imprimitive (period " + std::to_string(*period) +
                                   "); convergence not guaranteed"});
  return out;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
}

std::optional<int> adjacency_period(const LabelledGraph& g) {
  const Adjacency adj = adjacency_lists(g);
  std::size_t count = 0;
  strongly_connected_components(adj, &count);
  if (count != 1) return std::nullopt;
  return max_component_period(adj);
}

LabelledGraph build_swcc(int window, int weight) {
  if (window <= 0 || weight < 0 || weight > window || window > 24)
    throw Error(ErrorKind::invalid_parameters, "swcc requires 0 <= w <= L, 1 <= L <= 24");
  const int L = window;
  const unsigned mask = (1u << L) - 1;
  // Bit i (from the left of the window) marks one of the w most recent ones.
  // The oldest position is the most significant bit.
  const unsigned start = (1u << weight) - 1;
  auto step = [=](unsigned h, char bit) -> std::optional<unsigned> {
    const bool oldest_marked = (h >> (L - 1)) & 1u;
    if (bit == '0') {
      if (oldest_marked && weight > 0) return std::nullopt;
      return (h << 1) & mask;
    }
    unsigned next = ((h << 1) | 1u) & mask;
    if (std::popcount(next) > weight) {
      // drop the oldest mark
      for (int i = L - 1; i >= 0; --i)
        if (next >> i & 1u) {
          next &= ~(1u << i);
          break;
        }
    }
    return next;
  };
  auto name = [=](unsigned h) {
    std::string s = bits(h, L);
    for (char& c : s) {
      if (c == '1') break;
      c = 'x';
    }
    return s;
  };
  return explore<unsigned>(start, step, name);
}

LabelledGraph build_rll(int d, int k) {
  if (d < 0 || k < d) throw Error(ErrorKind::invalid_parameters, "rll requires 0 <= d <= k");
  std::vector<std::string> states;
  std::vector<Edge> edges;
  for (int i = 0; i <= k; ++i) states.push_back(std::to_string(i));
  for (int i = 0; i <= k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (i < k) edges.push_back({u, u + 1, "0"});
    if (i >= d) edges.push_back({u, 0, "1"});
  }
  return LabelledGraph(std::move(states), std::move(edges), 1);
}

LabelledGraph build_secc(int length, int weight) {
  if (length <= 0 || weight < 0 || weight > length || length > 20)
    throw Error(ErrorKind::invalid_parameters, "secc requires 0 <= w <= L, 1 <= L <= 20");
  std::vector<Edge> edges;
  for (unsigned long long word = 0; word < (1ULL << length); ++word)
    if (std::popcount(word) >= weight) edges.push_back({0, 0, bits(word, length)});
  return LabelledGraph({"x"}, std::move(edges), length);
}

LabelledGraph build_secc_multistate(int length, int weight) {
  if (length <= 0 || weight < 0 || weight > length || length > 20)
    throw Error(ErrorKind::invalid_parameters, "secc requires 0 <= w <= L, 1 <= L <= 20");
  const int L = length, w = weight;
  using Key = std::pair<int, int>;  // (position in subblock, weight capped at w)
  auto step = [=](Key k, char bit) -> std::optional<Key> {
    auto [pos, wt] = k;
    const int nwt = std::min(w, wt + (bit == '1' ? 1 : 0));
    // remaining positions after this bit must still reach w
    if (nwt + (L - pos - 1) < w) return std::nullopt;
    if (pos + 1 == L) return Key{0, 0};
    return Key{pos + 1, nwt};
  };
  auto name = [](Key k) { return "p" + std::to_string(k.first) + "w" + std::to_string(k.second); };
  if (w == 0) return LabelledGraph({"x"}, {{0, 0, "0"}, {0, 0, "1"}}, 1);
  return explore<Key>(Key{0, 0}, step, name);
}

LabelledGraph parse_graph(std::string_view text, std::vector<Diagnostic>* warnings) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed graph file: ") + e.what());
  }
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::parse_error, msg); };
  if (!doc.is_object()) fail("graph file must be a JSON object");
  if (!doc.contains("s") || !doc["s"].is_number_integer()) fail("missing integer field 's'");
  if (!doc.contains("states") || !doc["states"].is_array()) fail("missing array field 'states'");
  if (!doc.contains("edges") || !doc["edges"].is_array()) fail("missing array field 'edges'");

  const int s = doc["s"].get<int>();
  if (s <= 0) fail("'s' must be positive");
  std::vector<std::string> states;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& st : doc["states"]) {
    if (!st.is_string()) fail("state identifiers must be strings");
    auto name = st.get<std::string>();
    if (!index.emplace(name, states.size()).second) fail("duplicate state '" + name + "'");
    states.push_back(std::move(name));
  }
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("label"))
      fail("each edge needs 'from', 'to' and 'label'");
    if (!e["from"].is_string() || !e["to"].is_string() || !e["label"].is_string())
      fail("edge fields must be strings");
    const auto from = e["from"].get<std::string>();
    const auto to = e["to"].get<std::string>();
    auto label = e["label"].get<std::string>();
    auto fi = index.find(from), ti = index.find(to);
    if (fi == index.end()) fail("edge references unknown state '" + from + "'");
    if (ti == index.end()) fail("edge references unknown state '" + to + "'");
    if (label.size() != static_cast<std::size_t>(s))
      fail("label '" + label + "' does not have length " + std::to_string(s));
    if (label.find_first_not_of("01") != std::string::npos) fail("label '" + label + "' is not binary");
    edges.push_back({fi->second, ti->second, std::move(label)});
  }
  if (states.empty()) fail("graph has no states");
  if (edges.empty()) fail("graph has no edges");

  LabelledGraph g(std::move(states), std::move(edges), s);
  auto diags = validate(g);
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::error) throw Error(ErrorKind::invalid_graph, d.message);
  if (warnings) warnings->insert(warnings->end(), diags.begin(), diags.end());
  return g;
}

std::string to_json(const LabelledGraph& g) {
  nlohmann::ordered_json doc;
  doc["s"] = g.symbol_length();
  doc["states"] = std::vector<std::string>(g.states().begin(), g.states().end());
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"from", g.state_name(e.from)}, {"to", g.state_name(e.to)}, {"label", e.label}});
  doc["edges"] = std::move(edges);
  return doc.dump(2);
}

int hamming(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  int d = static_cast<int>(std::max(a.size(), b.size()) - n);
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace gvb

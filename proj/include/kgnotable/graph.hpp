#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kgnotable {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr LabelId kInvalidLabel = static_cast<LabelId>(-1);

struct Edge {
  NodeId target;
  LabelId label;
};

struct LoadOptions {
  // Synthesize (object, p^-1, subject) for every input triple. Turn off when
  // the input already carries its own inverse predicates.
  bool synthesize_reverse = true;
  // Suffix naming inverse predicates; "_inv" is the ASCII alternative.
  std::string inverse_suffix = "⁻¹";
  // When set, triples with this predicate assign the subject's node label
  // instead of becoming edges (e.g. "type").
  std::string type_predicate;
};

/// Immutable directed labeled multigraph. Nodes are dense ids in first-seen
/// order; every edge has a reverse twin under the inverse label, so the
/// out-adjacency alone covers both directions.
class KnowledgeGraph {
 public:
  std::size_t node_count() const { return node_names_.size(); }
  std::uint64_t edge_count() const { return static_cast<std::uint64_t>(edges_.size()); }
  std::size_t edge_label_kinds() const { return edge_label_names_.size(); }
  std::size_t node_label_kinds() const { return node_label_names_.size(); }

  const std::string& node_name(NodeId n) const { return node_names_[n]; }
  LabelId node_label(NodeId n) const { return node_label_of_[n]; }
  const std::string& node_label_name(LabelId l) const { return node_label_names_[l]; }

  std::optional<NodeId> find_node(std::string_view name) const {
    auto it = node_ids_.find(std::string(name));
    if (it == node_ids_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<LabelId> find_node_label(std::string_view name) const {
    auto it = node_label_ids_.find(std::string(name));
    if (it == node_label_ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Nodes carrying a given node label, ascending by id.
  std::span<const NodeId> nodes_with_label(LabelId l) const {
    return {label_nodes_[l].data(), label_nodes_[l].size()};
  }

  const std::string& edge_label_name(LabelId l) const { return edge_label_names_[l]; }

  std::optional<LabelId> find_edge_label(std::string_view name) const {
    auto it = edge_label_ids_.find(std::string(name));
    if (it == edge_label_ids_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t edge_label_count(LabelId l) const {
    require_edge_label(l);
    return edge_label_counts_[l];
  }

  LabelId inverse_label(LabelId l) const {
    require_edge_label(l);
    return inverse_of_[l];
  }

  bool label_is_inverse(LabelId l) const {
    require_edge_label(l);
    return is_inverse_[l] != 0;
  }

  std::span<const Edge> out_edges(NodeId n) const {
    return {edges_.data() + offsets_[n], edges_.data() + offsets_[n + 1]};
  }

  /// Out-edges of n restricted to one label; adjacency is sorted by
  /// (label, target), so this is a contiguous slice.
  std::span<const Edge> out_edges(NodeId n, LabelId l) const {
    const Edge* first = edges_.data() + offsets_[n];
    const Edge* last = edges_.data() + offsets_[n + 1];
    auto lo = std::lower_bound(first, last, l,
                               [](const Edge& e, LabelId v) { return e.label < v; });
    auto hi = std::upper_bound(lo, last, l,
                               [](LabelId v, const Edge& e) { return v < e.label; });
    return {lo, hi};
  }

  std::size_t out_degree(NodeId n) const {
    return static_cast<std::size_t>(offsets_[n + 1] - offsets_[n]);
  }

  bool has_edge(NodeId u, NodeId v, LabelId l) const {
    auto es = out_edges(u, l);
    return std::any_of(es.begin(), es.end(), [v](const Edge& e) { return e.target == v; });
  }

  /// Informativeness weight of a label: 1 - |E_l|/|E|, in [0,1).
  double edge_weight(LabelId l) const {
    require_edge_label(l);
    return 1.0 - static_cast<double>(edge_label_counts_[l]) / static_cast<double>(edges_.size());
  }

  /// Sum of edge weights over a node's out-edges; zero marks a dangling row.
  double total_out_weight(NodeId n) const { return out_weight_[n]; }

 private:
  friend KnowledgeGraph load_triples(std::istream&, const LoadOptions&);

  void require_edge_label(LabelId l) const {
    if (l >= edge_label_names_.size()) throw std::invalid_argument("unknown edge label id");
  }

  std::vector<std::string> node_names_;
  std::unordered_map<std::string, NodeId> node_ids_;
  std::vector<LabelId> node_label_of_;
  std::vector<std::string> node_label_names_;
  std::unordered_map<std::string, LabelId> node_label_ids_;
  std::vector<std::vector<NodeId>> label_nodes_;

  std::vector<std::uint64_t> offsets_;  // node_count + 1
  std::vector<Edge> edges_;             // sorted by (label, target) per node

  std::vector<std::string> edge_label_names_;
  std::unordered_map<std::string, LabelId> edge_label_ids_;
  std::vector<std::uint64_t> edge_label_counts_;
  std::vector<LabelId> inverse_of_;
  std::vector<char> is_inverse_;

  std::vector<double> out_weight_;
};

class triple_parse_error : public std::runtime_error {
 public:
  triple_parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t'; });
}

template <typename Map>
inline std::uint32_t intern(Map& ids, std::vector<std::string>& names, const std::string& key) {
  auto it = ids.find(key);
  if (it != ids.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names.size());
  names.push_back(key);
  ids.emplace(key, id);
  return id;
}

}  // namespace detail

/// Parse one triple per line (subject<TAB>predicate<TAB>object), skipping
/// '#' comments and blank lines. Every predicate gets an inverse partner
/// label; reverse edges are materialized unless turned off.
inline KnowledgeGraph load_triples(std::istream& in, const LoadOptions& options = {}) {
  KnowledgeGraph g;
  struct RawTriple {
    NodeId s;
    LabelId p;
    NodeId o;
  };
  std::vector<RawTriple> triples;
  std::vector<std::pair<NodeId, std::string>> type_assignments;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || detail::is_blank(line) || line.front() == '#') continue;

    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos ||
        line.find('\t', t2 + 1) != std::string::npos) {
      throw triple_parse_error(line_no, "expected 3 tab-separated columns");
    }
    std::string subject = line.substr(0, t1);
    std::string predicate = line.substr(t1 + 1, t2 - t1 - 1);
    std::string object = line.substr(t2 + 1);
    if (subject.empty() || predicate.empty() || object.empty()) {
      throw triple_parse_error(line_no, "empty column");
    }

    NodeId s = detail::intern(g.node_ids_, g.node_names_, subject);
    if (!options.type_predicate.empty() && predicate == options.type_predicate) {
      type_assignments.emplace_back(s, object);
      continue;
    }
    NodeId o = detail::intern(g.node_ids_, g.node_names_, object);
    LabelId p = detail::intern(g.edge_label_ids_, g.edge_label_names_, predicate);
    triples.push_back({s, p, o});
  }
  if (triples.empty()) throw std::runtime_error("no triples: empty graphs are unsupported");

  // Pair every label with its inverse, creating the partner when missing.
  // A name already ending in the suffix pairs with its stripped base, which
  // keeps the involution (l^-1)^-1 = l.
  const std::string& suf = options.inverse_suffix;
  g.inverse_of_.assign(g.edge_label_names_.size(), kInvalidLabel);
  g.is_inverse_.assign(g.edge_label_names_.size(), 0);
  for (LabelId l = 0; l < g.edge_label_names_.size(); ++l) {
    if (g.inverse_of_[l] != kInvalidLabel) continue;
    const std::string name = g.edge_label_names_[l];
    std::string partner;
    bool l_is_inverse = name.size() > suf.size() && name.ends_with(suf);
    if (l_is_inverse) {
      partner = name.substr(0, name.size() - suf.size());
    } else {
      partner = name + suf;
    }
    LabelId pl = detail::intern(g.edge_label_ids_, g.edge_label_names_, partner);
    if (pl >= g.inverse_of_.size()) {
      g.inverse_of_.resize(g.edge_label_names_.size(), kInvalidLabel);
      g.is_inverse_.resize(g.edge_label_names_.size(), 0);
    }
    g.inverse_of_[l] = pl;
    g.inverse_of_[pl] = l;
    g.is_inverse_[l] = l_is_inverse ? 1 : 0;
    g.is_inverse_[pl] = l_is_inverse ? 0 : 1;
  }

  const std::size_t n = g.node_names_.size();
  std::vector<std::uint64_t> degree(n, 0);
  for (const auto& t : triples) {
    ++degree[t.s];
    if (options.synthesize_reverse) ++degree[t.o];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.edges_.resize(g.offsets_[n]);
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  g.edge_label_counts_.assign(g.edge_label_names_.size(), 0);
  for (const auto& t : triples) {
    g.edges_[cursor[t.s]++] = {t.o, t.p};
    ++g.edge_label_counts_[t.p];
    if (options.synthesize_reverse) {
      LabelId inv = g.inverse_of_[t.p];
      g.edges_[cursor[t.o]++] = {t.s, inv};
      ++g.edge_label_counts_[inv];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.edges_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.edges_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
              [](const Edge& a, const Edge& b) {
                return a.label != b.label ? a.label < b.label : a.target < b.target;
              });
  }

  // Node labels default to the node's own name; type triples override.
  g.node_label_of_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    g.node_label_of_[v] = detail::intern(g.node_label_ids_, g.node_label_names_, g.node_names_[v]);
  }
  for (const auto& [node, label] : type_assignments) {
    g.node_label_of_[node] = detail::intern(g.node_label_ids_, g.node_label_names_, label);
  }
  g.label_nodes_.assign(g.node_label_names_.size(), {});
  for (NodeId v = 0; v < n; ++v) g.label_nodes_[g.node_label_of_[v]].push_back(v);

  g.out_weight_.assign(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    double w = 0.0;
    for (const Edge& e : g.out_edges(v)) w += g.edge_weight(e.label);
    g.out_weight_[v] = w;
  }
  return g;
}

inline KnowledgeGraph load_triples_file(const std::string& path, const LoadOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_triples(in, options);
}

/// Fraction of edges carrying label l: |E_l| / |E|.
inline double label_frequency(const KnowledgeGraph& g, LabelId l) {
  return static_cast<double>(g.edge_label_count(l)) / static_cast<double>(g.edge_count());
}

/// Labels of edges whose source lies in `nodes`, ascending and unique.
inline std::vector<LabelId> restricted_labels(const KnowledgeGraph& g,
                                              std::span<const NodeId> nodes) {
  std::vector<LabelId> out;
  for (NodeId n : nodes) {
    for (const Edge& e : g.out_edges(n)) out.push_back(e.label);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Validated query node set: 1..10 distinct existing nodes, kept sorted.
class Query {
 public:
  static constexpr std::size_t kMaxSize = 10;

  Query(const KnowledgeGraph& g, std::vector<NodeId> ids) : ids_(std::move(ids)) {
    if (ids_.empty()) throw std::invalid_argument("query must contain at least one node");
    if (ids_.size() > kMaxSize) {
      throw std::invalid_argument("query holds at most " + std::to_string(kMaxSize) + " nodes");
    }
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
      throw std::invalid_argument("duplicate node in query");
    }
    if (ids_.back() >= g.node_count()) throw std::invalid_argument("query node id out of range");
  }

  std::span<const NodeId> nodes() const { return {ids_.data(), ids_.size()}; }
  std::size_t size() const { return ids_.size(); }
  bool contains(NodeId n) const { return std::binary_search(ids_.begin(), ids_.end(), n); }

 private:
  std::vector<NodeId> ids_;
};

/// Full-scan check that every edge has its reverse twin.
inline bool has_reverse_closure(const KnowledgeGraph& g) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (const Edge& e : g.out_edges(u)) {
      if (!g.has_edge(e.target, u, g.inverse_label(e.label))) return false;
    }
  }
  return true;
}

}  // namespace kgnotable

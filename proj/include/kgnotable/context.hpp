#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgnotable/graph.hpp"
#include "kgnotable/random.hpp"

namespace kgnotable {

struct WalkConfig {
  double damping = 0.8;               // follow probability in p = c*A~*p + (1-c)*v
  int iterations = 10;                // fixed power-iteration sweeps, no convergence test
  std::uint64_t num_walk_samples = 1'000'000;
  int max_metapath_len = 5;           // walks longer than this are discarded
  int num_metapaths = 5;              // |M|: most frequent metapaths retained
  std::uint64_t rng_seed = 42;
  bool uniform_steps = false;         // uniform edge choice instead of weight-proportional

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must be in (0,1)");
    if (iterations < 1) throw std::invalid_argument("iterations must be positive");
    if (num_walk_samples < 1) throw std::invalid_argument("num_walk_samples must be positive");
    if (max_metapath_len < 1) throw std::invalid_argument("max_metapath_len must be positive");
    if (num_metapaths < 1) throw std::invalid_argument("num_metapaths must be positive");
  }
};

struct Metapath {
  std::vector<LabelId> labels;
  std::uint64_t count;
};

struct MetapathSet {
  std::vector<Metapath> paths;     // unique label sequences, most frequent first
  std::uint64_t total_count = 0;   // sum of counts over the retained paths

  bool empty() const { return paths.empty(); }
  double probability(std::size_t i) const {
    return static_cast<double>(paths[i].count) / static_cast<double>(total_count);
  }
};

struct ContextEntry {
  NodeId node;
  double score;
};

/// Ranked context; sorted by score descending, ties by ascending node id.
struct ContextResult {
  std::vector<ContextEntry> entries;

  bool empty() const { return entries.empty(); }
  bool contains(NodeId n) const {
    return std::any_of(entries.begin(), entries.end(),
                       [n](const ContextEntry& e) { return e.node == n; });
  }
  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.node);
    return ids;
  }
};

class empty_metapath_error : public std::runtime_error {
 public:
  empty_metapath_error()
      : std::runtime_error(
            "no metapath reached the query; fall back to the random-walk context") {}
};

/// Weight of one edge under the label-informativeness scheme; 0 for non-edges.
inline double weighted_adjacency_weight(const KnowledgeGraph& g, NodeId u, NodeId v, LabelId l) {
  if (l >= g.edge_label_kinds() || !g.has_edge(u, v, l)) return 0.0;
  return g.edge_weight(l);
}

/// Positive weights scaled to sum to 1. Scaling the input by any positive
/// constant leaves the result unchanged.
inline std::vector<double> normalize_weights(std::span<const double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  if (total <= 0.0) throw std::invalid_argument("normalize_weights: non-positive total");
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / total;
  return out;
}

/// Power iteration of p = c*A~*p + (1-c)*v with v concentrated on `seed`.
/// A~ column-normalizes the label-informativeness weights; dangling rows
/// (zero total weight) hand their mass back to the seed, so sum(p) stays 1.
inline std::vector<double> personalized_pagerank(const KnowledgeGraph& g, NodeId seed,
                                                 const WalkConfig& cfg) {
  cfg.validate();
  if (seed >= g.node_count()) throw std::invalid_argument("pagerank seed out of range");
  const std::size_t n = g.node_count();
  const double c = cfg.damping;
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[seed] = 1.0;
  for (int it = 0; it < cfg.iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
      const double pu = p[u];
      if (pu == 0.0) continue;
      const double total = g.total_out_weight(u);
      if (total > 0.0) {
        const double push = c * pu / total;
        for (const Edge& e : g.out_edges(u)) next[e.target] += push * g.edge_weight(e.label);
      } else {
        next[seed] += c * pu;
      }
    }
    next[seed] += 1.0 - c;
    p.swap(next);
  }
  return p;
}

namespace detail {

/// Top-k by (score desc, id asc) over nodes with positive score, skipping
/// the query; shorter when fewer candidates score above zero.
inline ContextResult top_k_context(std::span<const double> scores, const Query& q,
                                   std::size_t k) {
  ContextResult result;
  for (NodeId n = 0; n < scores.size(); ++n) {
    if (scores[n] > 0.0 && !q.contains(n)) result.entries.push_back({n, scores[n]});
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const ContextEntry& a, const ContextEntry& b) {
              return a.score != b.score ? a.score > b.score : a.node < b.node;
            });
  if (result.entries.size() > k) result.entries.resize(k);
  return result;
}

// One weight-proportional step; returns false on a dead end (no out-edge
// with positive weight).
inline bool walk_step(const KnowledgeGraph& g, std::mt19937_64& rng, bool uniform, NodeId& u,
                      LabelId& taken) {
  auto edges = g.out_edges(u);
  if (edges.empty()) return false;
  if (uniform) {
    const Edge& e = edges[uniform_index(rng, edges.size())];
    u = e.target;
    taken = e.label;
    return true;
  }
  const double total = g.total_out_weight(u);
  if (total <= 0.0) return false;
  const double r = uniform01(rng) * total;
  double acc = 0.0;
  const Edge* chosen = nullptr;
  for (const Edge& e : edges) {
    const double w = g.edge_weight(e.label);
    if (w <= 0.0) continue;
    acc += w;
    chosen = &e;
    if (r < acc) break;
  }
  if (chosen == nullptr) return false;
  u = chosen->target;
  taken = chosen->label;
  return true;
}

}  // namespace detail

/// Baseline context: PageRank started from each query node individually,
/// vectors summed, query entries dropped, top-k returned.
inline ContextResult random_walk_context(const KnowledgeGraph& g, const Query& q, std::size_t k,
                                         const WalkConfig& cfg) {
  std::vector<double> sum(g.node_count(), 0.0);
  for (NodeId seed : q.nodes()) {
    std::vector<double> p = personalized_pagerank(g, seed, cfg);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p[i];
  }
  return detail::top_k_context(sum, q, k);
}

/// Sample random walks from uniform non-query start nodes until they hit the
/// query, collecting edge-label sequences. Walks that die or exceed the
/// length cap are discarded. Returns the num_metapaths most frequent
/// sequences; empty when no walk can reach the query.
inline MetapathSet mine_metapaths(const KnowledgeGraph& g, const Query& q,
                                  const WalkConfig& cfg) {
  cfg.validate();
  std::vector<NodeId> starts;
  for (NodeId n = 0; n < g.node_count(); ++n) {
    if (q.contains(n)) continue;
    const bool can_move = cfg.uniform_steps ? g.out_degree(n) > 0 : g.total_out_weight(n) > 0.0;
    if (can_move) starts.push_back(n);
  }
  MetapathSet result;
  if (starts.empty()) return result;

  std::mt19937_64 rng(derive_seed(cfg.rng_seed, 0x6d696e65));
  std::map<std::vector<LabelId>, std::uint64_t> counts;
  std::vector<LabelId> labels;
  for (std::uint64_t s = 0; s < cfg.num_walk_samples; ++s) {
    NodeId u = starts[uniform_index(rng, starts.size())];
    labels.clear();
    for (int step = 0; step < cfg.max_metapath_len; ++step) {
      LabelId taken;
      if (!detail::walk_step(g, rng, cfg.uniform_steps, u, taken)) break;
      labels.push_back(taken);
      if (q.contains(u)) {
        ++counts[labels];
        break;
      }
    }
  }
  if (counts.empty()) return result;

  result.paths.reserve(counts.size());
  for (auto& [seq, cnt] : counts) result.paths.push_back({seq, cnt});
  std::stable_sort(result.paths.begin(), result.paths.end(),
                   [](const Metapath& a, const Metapath& b) { return a.count > b.count; });
  if (result.paths.size() > static_cast<std::size_t>(cfg.num_metapaths)) {
    result.paths.resize(static_cast<std::size_t>(cfg.num_metapaths));
  }
  for (const Metapath& m : result.paths) result.total_count += m.count;
  return result;
}

/// Similarity score per node: for each retained metapath and query node,
/// count label-constrained paths (with multiplicity, cycles allowed) and
/// give each non-query endpoint its share of the metapath's probability.
/// Terms whose denominator is zero contribute nothing.
inline std::vector<double> metapath_score(const KnowledgeGraph& g, const Query& q,
                                          const MetapathSet& m) {
  if (m.empty()) throw std::invalid_argument("metapath_score: empty metapath set");
  const std::size_t n = g.node_count();
  std::vector<double> scores(n, 0.0);
  std::vector<double> cur(n, 0.0), nxt(n, 0.0);
  std::vector<NodeId> active, nactive;

  for (std::size_t pi = 0; pi < m.paths.size(); ++pi) {
    const double pr = m.probability(pi);
    for (NodeId start : q.nodes()) {
      active.assign(1, start);
      cur[start] = 1.0;
      for (LabelId l : m.paths[pi].labels) {
        nactive.clear();
        for (NodeId u : active) {
          const double cu = cur[u];
          for (const Edge& e : g.out_edges(u, l)) {
            if (nxt[e.target] == 0.0) nactive.push_back(e.target);
            nxt[e.target] += cu;
          }
        }
        for (NodeId v : active) cur[v] = 0.0;
        cur.swap(nxt);
        active.swap(nactive);
        if (active.empty()) break;
      }
      double denom = 0.0;
      for (NodeId v : active) {
        if (!q.contains(v)) denom += cur[v];
      }
      if (denom > 0.0) {
        for (NodeId v : active) {
          if (!q.contains(v)) scores[v] += cur[v] / denom * pr;
        }
      }
      for (NodeId v : active) cur[v] = 0.0;
      active.clear();
    }
  }
  return scores;
}

/// Metapath-constrained context: mine, score, take the top k. Throws
/// empty_metapath_error when mining finds nothing, signalling the caller to
/// fall back to random_walk_context.
inline ContextResult context_rw(const KnowledgeGraph& g, const Query& q, std::size_t k,
                                const WalkConfig& cfg) {
  MetapathSet m = mine_metapaths(g, q, cfg);
  if (m.empty()) throw empty_metapath_error();
  std::vector<double> scores = metapath_score(g, q, m);
  return detail::top_k_context(scores, q, k);
}

}  // namespace kgnotable

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgnotable/graph.hpp"
#include "kgnotable/multinomial.hpp"
#include "kgnotable/random.hpp"

namespace kgnotable {

/// Histogram of terminal nodes reached over one edge label from the query
/// and context sets. Slot 0 of the count vectors is the None bucket (set
/// members with no such edge); slot i+1 belongs to terminals[i]. Terminal
/// slots count edges, so parallel edges count multiply.
struct InstanceDistribution {
  std::vector<NodeId> terminals;        // ascending node ids
  std::vector<std::int64_t> q_counts;   // size terminals.size() + 1
  std::vector<std::int64_t> c_counts;
};

/// Histogram over how many edges of one label each set member has; index is
/// the cardinality, bucket 0 included. q sums to |Q|, c to |C|.
struct CardinalityDistribution {
  std::vector<std::int64_t> q_counts;
  std::vector<std::int64_t> c_counts;
};

enum class CharacteristicKind { none, instance, cardinality };

inline const char* to_string(CharacteristicKind k) {
  switch (k) {
    case CharacteristicKind::instance: return "instance";
    case CharacteristicKind::cardinality: return "cardinality";
    default: return "none";
  }
}

/// Outcome of the per-label discrimination test. delta is 0 (not notable)
/// or 1 - Pr_s of the winning test, hence in (1 - alpha, 1].
struct NotableVerdict {
  LabelId label;
  double delta;
  CharacteristicKind kind;
  double p_sig_instance;
  double p_sig_cardinality;
};

struct DeltaOptions {
  double alpha = 0.05;
  SignificanceOptions significance;
};

namespace detail {

inline void require_label_present(const KnowledgeGraph& g, LabelId l,
                                  std::span<const NodeId> q, std::span<const NodeId> c) {
  auto has = [&](std::span<const NodeId> nodes) {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](NodeId n) { return !g.out_edges(n, l).empty(); });
  };
  if (!has(q) && !has(c)) {
    throw std::invalid_argument("label has no edges from the query or context");
  }
}

}  // namespace detail

inline InstanceDistribution build_instance_distribution(const KnowledgeGraph& g, LabelId l,
                                                        std::span<const NodeId> q,
                                                        std::span<const NodeId> c) {
  detail::require_label_present(g, l, q, c);
  std::unordered_map<NodeId, std::pair<std::int64_t, std::int64_t>> tally;
  std::int64_t none_q = 0, none_c = 0;
  for (NodeId n : q) {
    auto es = g.out_edges(n, l);
    if (es.empty()) ++none_q;
    for (const Edge& e : es) ++tally[e.target].first;
  }
  for (NodeId n : c) {
    auto es = g.out_edges(n, l);
    if (es.empty()) ++none_c;
    for (const Edge& e : es) ++tally[e.target].second;
  }

  InstanceDistribution dist;
  dist.terminals.reserve(tally.size());
  for (const auto& [node, counts] : tally) dist.terminals.push_back(node);
  std::sort(dist.terminals.begin(), dist.terminals.end());
  dist.q_counts.assign(dist.terminals.size() + 1, 0);
  dist.c_counts.assign(dist.terminals.size() + 1, 0);
  dist.q_counts[0] = none_q;
  dist.c_counts[0] = none_c;
  for (std::size_t i = 0; i < dist.terminals.size(); ++i) {
    const auto& counts = tally[dist.terminals[i]];
    dist.q_counts[i + 1] = counts.first;
    dist.c_counts[i + 1] = counts.second;
  }
  return dist;
}

inline CardinalityDistribution build_cardinality_distribution(const KnowledgeGraph& g, LabelId l,
                                                              std::span<const NodeId> q,
                                                              std::span<const NodeId> c) {
  detail::require_label_present(g, l, q, c);
  std::size_t max_card = 0;
  auto card = [&](NodeId n) { return g.out_edges(n, l).size(); };
  for (NodeId n : q) max_card = std::max(max_card, card(n));
  for (NodeId n : c) max_card = std::max(max_card, card(n));

  CardinalityDistribution dist;
  dist.q_counts.assign(max_card + 1, 0);
  dist.c_counts.assign(max_card + 1, 0);
  for (NodeId n : q) ++dist.q_counts[card(n)];
  for (NodeId n : c) ++dist.c_counts[card(n)];
  return dist;
}

/// Run both tests against the context-derived multinomials and keep the
/// stronger rejection. Monte Carlo seeds are derived per (label, test) so
/// verdicts stay deterministic however labels are scheduled.
inline NotableVerdict delta_from_distributions(LabelId l, const InstanceDistribution& inst,
                                               const CardinalityDistribution& card,
                                               const DeltaOptions& options = {}) {
  SignificanceOptions inst_opts = options.significance;
  inst_opts.rng_seed = derive_seed(options.significance.rng_seed, 2ull * l);
  SignificanceOptions card_opts = options.significance;
  card_opts.rng_seed = derive_seed(options.significance.rng_seed, 2ull * l + 1);

  const double p_inst = significance(normalize(inst.c_counts), inst.q_counts, inst_opts).p_value;
  const double p_card = significance(normalize(card.c_counts), card.q_counts, card_opts).p_value;
  const double mt_inst = p_inst <= options.alpha ? 1.0 - p_inst : 0.0;
  const double mt_card = p_card <= options.alpha ? 1.0 - p_card : 0.0;

  NotableVerdict v;
  v.label = l;
  v.delta = std::max(mt_inst, mt_card);
  v.p_sig_instance = p_inst;
  v.p_sig_cardinality = p_card;
  if (v.delta == 0.0) {
    v.kind = CharacteristicKind::none;
  } else {
    v.kind = mt_card >= mt_inst ? CharacteristicKind::cardinality : CharacteristicKind::instance;
  }
  return v;
}

inline NotableVerdict delta(const KnowledgeGraph& g, LabelId l, std::span<const NodeId> q,
                            std::span<const NodeId> c, const DeltaOptions& options = {}) {
  InstanceDistribution inst = build_instance_distribution(g, l, q, c);
  CardinalityDistribution card = build_cardinality_distribution(g, l, q, c);
  return delta_from_distributions(l, inst, card, options);
}

}  // namespace kgnotable

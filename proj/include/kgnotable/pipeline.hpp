#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgnotable/characteristics.hpp"
#include "kgnotable/context.hpp"
#include "kgnotable/graph.hpp"

namespace kgnotable {

enum class Algorithm { findnc, rwmult };

inline const char* to_string(Algorithm a) {
  return a == Algorithm::findnc ? "findnc" : "rwmult";
}

enum class ReportFormat { json, tsv };

struct RunConfig {
  WalkConfig walk;                 // walk.rng_seed is the master seed for the run
  std::size_t k = 100;             // context size
  double alpha = 0.05;
  Algorithm algorithm = Algorithm::findnc;
  ReportFormat format = ReportFormat::json;
  std::uint64_t mc_samples = 100'000;
  std::uint64_t exact_budget = 1'000'000;
  bool include_timings = true;     // false zeroes timing fields for byte-stable output

  void validate() const {
    walk.validate();
    if (k < 1) throw std::invalid_argument("context size k must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    if (mc_samples < 10'000) throw std::invalid_argument("mc_samples must be >= 1e4");
  }

  DeltaOptions delta_options() const {
    DeltaOptions d;
    d.alpha = alpha;
    d.significance.exact_budget = exact_budget;
    d.significance.mc_samples = mc_samples;
    d.significance.rng_seed = derive_seed(walk.rng_seed, 0x7369676e);
    return d;
  }
};

/// One tested edge label with its verdict and the raw distributions behind
/// it (support names already resolved for display).
struct CharacteristicReport {
  std::string label;
  bool inverse;
  NotableVerdict verdict;
  std::vector<std::string> instance_support;  // "None" first, then terminal names
  std::vector<std::int64_t> instance_q;
  std::vector<std::int64_t> instance_c;
  std::vector<std::int64_t> cardinality_q;    // index = cardinality
  std::vector<std::int64_t> cardinality_c;
};

struct NotableReport {
  std::vector<std::string> query;
  std::vector<std::pair<std::string, double>> context;  // (name, score)
  std::vector<CharacteristicReport> characteristics;    // delta desc, label asc
  struct Timings {
    double mining_ms = 0.0;
    double scoring_ms = 0.0;
    double testing_ms = 0.0;
    double total_ms = 0.0;
  } timings;
  std::vector<std::string> warnings;
  RunConfig config;
};

class unresolved_query_error : public std::runtime_error {
 public:
  explicit unresolved_query_error(const std::string& what) : std::runtime_error(what) {}
};

/// Exact, case-sensitive match of names against node labels. Duplicates are
/// dropped with a warning; unknown or ambiguous names raise
/// unresolved_query_error listing the offenders.
inline Query resolve_query(const KnowledgeGraph& g, std::span<const std::string> names,
                           std::vector<std::string>* warnings = nullptr) {
  if (names.empty()) throw std::invalid_argument("query names must be nonempty");
  std::vector<NodeId> ids;
  std::vector<std::string> unresolved;
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      if (warnings) warnings->push_back("duplicate query name dropped: " + name);
      continue;
    }
    auto label = g.find_node_label(name);
    if (!label) {
      unresolved.push_back(name);
      continue;
    }
    auto nodes = g.nodes_with_label(*label);
    if (nodes.size() > 1) {
      std::string msg = "query name '" + name + "' is ambiguous; candidates:";
      for (NodeId n : nodes) msg += " " + g.node_name(n);
      throw unresolved_query_error(msg);
    }
    ids.push_back(nodes.front());
  }
  if (!unresolved.empty()) {
    std::string msg = "query names not found:";
    for (const auto& n : unresolved) msg += " " + n;
    throw unresolved_query_error(msg);
  }
  return Query(g, std::move(ids));
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from)
      .count();
}

}  // namespace detail

/// Test every edge label touching the query or context and assemble the
/// report; shared by both context-selection algorithms.
inline NotableReport find_notable_with_context(const KnowledgeGraph& g, const Query& q,
                                               const ContextResult& ctx, const RunConfig& cfg) {
  cfg.validate();
  NotableReport report;
  report.config = cfg;
  for (NodeId n : q.nodes()) report.query.push_back(g.node_name(n));
  for (const auto& e : ctx.entries) report.context.emplace_back(g.node_name(e.node), e.score);

  if (ctx.empty()) {
    report.warnings.push_back("context is empty; no characteristics computed");
    return report;
  }

  const std::vector<NodeId> ctx_ids = ctx.node_ids();
  std::vector<NodeId> members(q.nodes().begin(), q.nodes().end());
  members.insert(members.end(), ctx_ids.begin(), ctx_ids.end());

  const DeltaOptions delta_opts = cfg.delta_options();
  for (LabelId l : restricted_labels(g, members)) {
    InstanceDistribution inst = build_instance_distribution(g, l, q.nodes(), ctx_ids);
    CardinalityDistribution card = build_cardinality_distribution(g, l, q.nodes(), ctx_ids);
    CharacteristicReport cr;
    cr.label = g.edge_label_name(l);
    cr.inverse = g.label_is_inverse(l);
    cr.verdict = delta_from_distributions(l, inst, card, delta_opts);
    cr.instance_support.push_back("None");
    for (NodeId t : inst.terminals) cr.instance_support.push_back(g.node_name(t));
    cr.instance_q = inst.q_counts;
    cr.instance_c = inst.c_counts;
    cr.cardinality_q = card.q_counts;
    cr.cardinality_c = card.c_counts;
    report.characteristics.push_back(std::move(cr));
  }
  std::sort(report.characteristics.begin(), report.characteristics.end(),
            [](const CharacteristicReport& a, const CharacteristicReport& b) {
              if (a.verdict.delta != b.verdict.delta) return a.verdict.delta > b.verdict.delta;
              return a.label < b.label;
            });
  return report;
}

/// End-to-end search: pick the context (metapath-constrained for findnc,
/// plain random walk for rwmult), then test every touched label. findnc
/// falls back to the random-walk context when mining or scoring comes up
/// empty, flagging the fallback in the report.
inline NotableReport find_notable(const KnowledgeGraph& g, const Query& q, const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  NotableReport::Timings timings;
  std::vector<std::string> warnings;

  ContextResult ctx;
  bool use_random_walk = cfg.algorithm == Algorithm::rwmult;
  if (cfg.algorithm == Algorithm::findnc) {
    auto t0 = std::chrono::steady_clock::now();
    MetapathSet m = mine_metapaths(g, q, cfg.walk);
    timings.mining_ms = detail::elapsed_ms(t0);
    if (m.empty()) {
      warnings.push_back("metapath mining found no paths to the query; fell back to random walk");
      use_random_walk = true;
    } else {
      auto t1 = std::chrono::steady_clock::now();
      ctx = detail::top_k_context(metapath_score(g, q, m), q, cfg.k);
      timings.scoring_ms = detail::elapsed_ms(t1);
      if (ctx.empty()) {
        warnings.push_back("metapath scoring left no candidates; fell back to random walk");
        use_random_walk = true;
      }
    }
  }
  if (use_random_walk) {
    auto t1 = std::chrono::steady_clock::now();
    ctx = random_walk_context(g, q, cfg.k, cfg.walk);
    timings.scoring_ms += detail::elapsed_ms(t1);
  }

  auto t2 = std::chrono::steady_clock::now();
  NotableReport report = find_notable_with_context(g, q, ctx, cfg);
  timings.testing_ms = detail::elapsed_ms(t2);
  timings.total_ms = detail::elapsed_ms(start);

  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  report.timings = cfg.include_timings ? timings : NotableReport::Timings{};
  return report;
}

// ---- serialization ----------------------------------------------------

/// Round to 6 significant digits so serialized floats are short and stable.
inline double round_sig6(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag = std::pow(10.0, 5.0 - std::floor(std::log10(std::fabs(v))));
  return std::round(v * mag) / mag;
}

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  return nlohmann::ordered_json{{"algorithm", to_string(cfg.algorithm)},
                                {"k", cfg.k},
                                {"alpha", round_sig6(cfg.alpha)},
                                {"damping", round_sig6(cfg.walk.damping)},
                                {"iterations", cfg.walk.iterations},
                                {"walks", cfg.walk.num_walk_samples},
                                {"max_metapath_len", cfg.walk.max_metapath_len},
                                {"num_metapaths", cfg.walk.num_metapaths},
                                {"seed", cfg.walk.rng_seed},
                                {"uniform_steps", cfg.walk.uniform_steps},
                                {"mc_samples", cfg.mc_samples},
                                {"exact_budget", cfg.exact_budget}};
}

inline std::string report_to_json(const NotableReport& report) {
  nlohmann::ordered_json j;
  j["query"] = report.query;
  auto& ctx = j["context"] = nlohmann::ordered_json::array();
  for (const auto& [name, score] : report.context) {
    ctx.push_back({{"node", name}, {"score", round_sig6(score)}});
  }
  auto& chars = j["characteristics"] = nlohmann::ordered_json::array();
  for (const auto& c : report.characteristics) {
    nlohmann::ordered_json e;
    e["label"] = c.label;
    e["direction"] = c.inverse ? "inverse" : "forward";
    e["delta"] = round_sig6(c.verdict.delta);
    e["kind"] = to_string(c.verdict.kind);
    e["p_sig_instance"] = round_sig6(c.verdict.p_sig_instance);
    e["p_sig_cardinality"] = round_sig6(c.verdict.p_sig_cardinality);
    e["instance_distribution"] = {
        {"support", c.instance_support}, {"q", c.instance_q}, {"c", c.instance_c}};
    std::vector<std::int64_t> card_support(c.cardinality_q.size());
    for (std::size_t i = 0; i < card_support.size(); ++i) {
      card_support[i] = static_cast<std::int64_t>(i);
    }
    e["cardinality_distribution"] = {
        {"support", card_support}, {"q", c.cardinality_q}, {"c", c.cardinality_c}};
    chars.push_back(std::move(e));
  }
  j["timings_ms"] = {{"mining", round_sig6(report.timings.mining_ms)},
                     {"scoring", round_sig6(report.timings.scoring_ms)},
                     {"testing", round_sig6(report.timings.testing_ms)},
                     {"total", round_sig6(report.timings.total_ms)}};
  j["config"] = config_to_json(report.config);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

inline std::string report_to_tsv(const NotableReport& report) {
  std::string out = "label\tdirection\tdelta\tkind\tp_sig_instance\tp_sig_cardinality\n";
  char buf[256];
  for (const auto& c : report.characteristics) {
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.6g\t%s\t%.6g\t%.6g\n", c.label.c_str(),
                  c.inverse ? "inverse" : "forward", c.verdict.delta, to_string(c.verdict.kind),
                  c.verdict.p_sig_instance, c.verdict.p_sig_cardinality);
    out += buf;
  }
  return out;
}

inline std::string context_to_tsv(const NotableReport& report) {
  std::string out;
  char buf[512];
  for (const auto& [name, score] : report.context) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6g\n", name.c_str(), score);
    out += buf;
  }
  return out;
}

}  // namespace kgnotable

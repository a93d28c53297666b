#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "kgnotable/context.hpp"
#include "kgnotable/graph.hpp"
#include "kgnotable/synth.hpp"

namespace kgnotable {

/// Set-based F1 of the top-k context against the relevant set; rank order
/// beyond the cutoff is ignored.
inline double f1_at_k(const KnowledgeGraph& g, const ContextResult& result,
                      const GroundTruth& truth, std::size_t k) {
  if (truth.relevant.empty()) throw std::invalid_argument("f1_at_k: empty ground truth");
  if (k > result.entries.size()) {
    throw std::invalid_argument("f1_at_k: cutoff exceeds result size");
  }
  std::unordered_set<std::string> relevant(truth.relevant.begin(), truth.relevant.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (relevant.count(g.node_name(result.entries[i].node))) ++hits;
  }
  if (hits == 0) return 0.0;
  const double precision = static_cast<double>(hits) / static_cast<double>(k);
  const double recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
  return 2.0 * precision * recall / (precision + recall);
}

struct GridSpec {
  std::vector<std::string> algos = {"contextrw", "randomwalk"};
  std::vector<int> q_sizes = {2};
  std::vector<int> c_sizes = {50, 100};
  std::vector<int> num_metapaths = {5};
  std::vector<int> max_lens = {5};

  void validate() const {
    auto nonempty = [](const auto& v, const char* what) {
      if (v.empty()) throw std::invalid_argument(std::string("grid: empty ") + what);
    };
    nonempty(algos, "algos");
    nonempty(q_sizes, "q_sizes");
    nonempty(c_sizes, "c_sizes");
    nonempty(num_metapaths, "num_metapaths");
    nonempty(max_lens, "max_lens");
    for (const auto& a : algos) {
      if (a != "contextrw" && a != "randomwalk") {
        throw std::invalid_argument("grid: unknown algorithm " + a);
      }
    }
  }
};

inline void from_json(const nlohmann::json& j, GridSpec& s) {
  if (j.contains("algos")) s.algos = j.at("algos").get<std::vector<std::string>>();
  if (j.contains("q_sizes")) s.q_sizes = j.at("q_sizes").get<std::vector<int>>();
  if (j.contains("c_sizes")) s.c_sizes = j.at("c_sizes").get<std::vector<int>>();
  if (j.contains("num_metapaths")) s.num_metapaths = j.at("num_metapaths").get<std::vector<int>>();
  if (j.contains("max_lens")) s.max_lens = j.at("max_lens").get<std::vector<int>>();
}

struct GridRow {
  std::string algo;
  int q_size;
  int c_size;
  int num_metapaths;
  int max_len;
  double f1;
  double wall_ms;
};

namespace detail {

inline ContextResult grid_context(const KnowledgeGraph& g, const Query& q, std::size_t k,
                                  const std::string& algo, const WalkConfig& cfg) {
  if (algo == "randomwalk") return random_walk_context(g, q, k, cfg);
  try {
    return context_rw(g, q, k, cfg);
  } catch (const empty_metapath_error&) {
    return random_walk_context(g, q, k, cfg);
  }
}

}  // namespace detail

/// Sweep the parameter grid over every ground-truth case. Contexts are
/// computed once per (algo, |Q|, |M|, max_len) cell at the largest cutoff;
/// rows report the mean F1 per cutoff and the mean per-case wall time.
/// Row order follows the nesting algo > q_size > c_size > |M| > max_len.
inline std::vector<GridRow> run_grid(const KnowledgeGraph& g,
                                     std::span<const GroundTruth> truths, const GridSpec& grid,
                                     const WalkConfig& base, bool include_timings = true) {
  grid.validate();
  if (truths.empty()) throw std::invalid_argument("run_grid: no ground-truth cases");
  const std::size_t k_max = static_cast<std::size_t>(
      *std::max_element(grid.c_sizes.begin(), grid.c_sizes.end()));

  struct Cell {
    std::vector<ContextResult> contexts;  // one per truth case
    double mean_ms = 0.0;
  };
  std::map<std::tuple<std::string, int, int, int>, Cell> cells;

  auto cell_for = [&](const std::string& algo, int qs, int m, int len) -> const Cell& {
    auto key = std::make_tuple(algo, qs, m, len);
    auto it = cells.find(key);
    if (it != cells.end()) return it->second;
    WalkConfig cfg = base;
    cfg.num_metapaths = m;
    cfg.max_metapath_len = len;
    Cell cell;
    double total_ms = 0.0;
    for (const GroundTruth& t : truths) {
      std::vector<NodeId> ids;
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(qs), t.query.size());
      for (std::size_t i = 0; i < take; ++i) {
        auto id = g.find_node(t.query[i]);
        if (!id) throw std::invalid_argument("run_grid: query name not in graph: " + t.query[i]);
        ids.push_back(*id);
      }
      Query q(g, std::move(ids));
      auto t0 = std::chrono::steady_clock::now();
      cell.contexts.push_back(detail::grid_context(g, q, k_max, algo, cfg));
      auto t1 = std::chrono::steady_clock::now();
      total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    cell.mean_ms = total_ms / static_cast<double>(truths.size());
    return cells.emplace(std::move(key), std::move(cell)).first->second;
  };

  std::vector<GridRow> rows;
  for (const auto& algo : grid.algos) {
    for (int qs : grid.q_sizes) {
      for (int cs : grid.c_sizes) {
        for (int m : grid.num_metapaths) {
          for (int len : grid.max_lens) {
            const Cell& cell = cell_for(algo, qs, m, len);
            double f1_sum = 0.0;
            for (std::size_t ti = 0; ti < truths.size(); ++ti) {
              const ContextResult& ctx = cell.contexts[ti];
              const std::size_t cut =
                  std::min<std::size_t>(static_cast<std::size_t>(cs), ctx.entries.size());
              f1_sum += ctx.empty() ? 0.0 : f1_at_k(g, ctx, truths[ti], cut);
            }
            rows.push_back({algo, qs, cs, m, len, f1_sum / static_cast<double>(truths.size()),
                            include_timings ? cell.mean_ms : 0.0});
          }
        }
      }
    }
  }
  return rows;
}

inline std::string grid_to_csv(std::span<const GridRow> rows) {
  std::string csv = "algo,q_size,c_size,num_metapaths,max_len,f1,wall_ms\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%.6g,%.6g\n", r.algo.c_str(), r.q_size,
                  r.c_size, r.num_metapaths, r.max_len, r.f1, r.wall_ms);
    csv += buf;
  }
  return csv;
}

}  // namespace kgnotable

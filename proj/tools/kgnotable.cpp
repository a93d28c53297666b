// kgnotable: search a labeled knowledge graph for the characteristics that
// set a handful of query entities apart from their most similar peers.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgnotable/eval.hpp"
#include "kgnotable/pipeline.hpp"
#include "kgnotable/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitUnresolvedQuery = 3;

struct GraphArgs {
  std::string path;
  kgnotable::LoadOptions load;
  bool ascii_inverse = false;
};

void add_graph_flags(CLI::App* cmd, GraphArgs& args) {
  cmd->add_option("--graph", args.path, "triple file (subject<TAB>predicate<TAB>object)")
      ->required();
  cmd->add_flag("--ascii-inverse", args.ascii_inverse,
                "name synthesized inverse predicates with the suffix _inv");
  cmd->add_option("--inverse-suffix", args.load.inverse_suffix,
                  "suffix marking inverse predicates");
  cmd->add_option("--type-predicate", args.load.type_predicate,
                  "predicate whose triples assign node labels instead of edges");
  cmd->add_flag("!--no-reverse-edges", args.load.synthesize_reverse,
                "input already contains inverse predicates; do not synthesize them");
}

void add_walk_flags(CLI::App* cmd, kgnotable::WalkConfig& walk) {
  cmd->add_option("--walks", walk.num_walk_samples, "number of metapath-mining walks");
  cmd->add_option("--max-path-len", walk.max_metapath_len, "maximum metapath length");
  cmd->add_option("--num-metapaths", walk.num_metapaths, "metapaths retained for scoring");
  cmd->add_option("--damping", walk.damping, "PageRank follow probability");
  cmd->add_option("--iterations", walk.iterations, "PageRank power-iteration sweeps");
  cmd->add_option("--seed", walk.rng_seed, "master RNG seed");
  cmd->add_flag("--uniform-steps", walk.uniform_steps,
                "pick walk edges uniformly instead of by label weight");
}

kgnotable::KnowledgeGraph load_graph(GraphArgs& args) {
  if (args.ascii_inverse) args.load.inverse_suffix = "_inv";
  return kgnotable::load_triples_file(args.path, args.load);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

int run(int argc, char** argv) {
  CLI::App app{"notable-characteristics search over labeled knowledge graphs"};
  app.require_subcommand(1);

  // --- context: rank the nodes most similar to the query ---
  auto* context_cmd = app.add_subcommand("context", "compute the context set for a query");
  GraphArgs ctx_graph;
  kgnotable::RunConfig ctx_cfg;
  std::vector<std::string> ctx_query;
  std::string ctx_algo = "contextrw";
  std::string ctx_out = "-";
  add_graph_flags(context_cmd, ctx_graph);
  add_walk_flags(context_cmd, ctx_cfg.walk);
  context_cmd->add_option("--query", ctx_query, "query node name (repeatable)")->required();
  context_cmd->add_option("--k", ctx_cfg.k, "context size");
  context_cmd->add_option("--algo", ctx_algo, "contextrw or randomwalk")
      ->check(CLI::IsMember({"contextrw", "randomwalk"}));
  context_cmd->add_option("--out", ctx_out, "output file (TSV: name<TAB>score), - for stdout");

  // --- findnc: full pipeline, context plus per-label tests ---
  auto* findnc_cmd = app.add_subcommand("findnc", "find notable characteristics of a query");
  GraphArgs fn_graph;
  kgnotable::RunConfig fn_cfg;
  std::vector<std::string> fn_query;
  std::string fn_algo = "findnc";
  std::string fn_format = "json";
  std::string fn_out = "-";
  bool fn_no_timings = false;
  add_graph_flags(findnc_cmd, fn_graph);
  add_walk_flags(findnc_cmd, fn_cfg.walk);
  findnc_cmd->add_option("--query", fn_query, "query node name (repeatable)")->required();
  findnc_cmd->add_option("--k", fn_cfg.k, "context size");
  findnc_cmd->add_option("--alpha", fn_cfg.alpha, "significance level");
  findnc_cmd->add_option("--algo", fn_algo, "findnc or rwmult")
      ->check(CLI::IsMember({"findnc", "rwmult"}));
  findnc_cmd->add_option("--format", fn_format, "report format")
      ->check(CLI::IsMember({"json", "tsv"}));
  findnc_cmd->add_option("--mc-samples", fn_cfg.mc_samples, "Monte Carlo samples per test");
  findnc_cmd->add_option("--exact-budget", fn_cfg.exact_budget,
                         "outcome-count limit for the exact test");
  findnc_cmd->add_flag("--no-timings", fn_no_timings,
                       "zero the timing fields for byte-reproducible reports");
  findnc_cmd->add_option("--out", fn_out, "output file, - for stdout");

  // --- eval: F1 parameter sweep on synthetic or provided ground truth ---
  auto* eval_cmd = app.add_subcommand("eval", "run the F1 evaluation grid");
  std::string eval_spec_path, eval_grid_path, eval_truth_path;
  std::string eval_out = "-";
  GraphArgs eval_graph;
  kgnotable::WalkConfig eval_walk;
  std::vector<std::string> eval_query;
  bool eval_no_timings = false;
  eval_cmd->add_option("--spec", eval_spec_path, "synthetic graph spec (JSON)");
  eval_cmd->add_option("--grid", eval_grid_path, "parameter grid (JSON)");
  eval_cmd->add_option("--graph", eval_graph.path, "triple file (instead of --spec)");
  eval_cmd->add_option("--truth", eval_truth_path, "ground-truth file, one entity name per line");
  eval_cmd->add_option("--query", eval_query, "query node name for --graph mode (repeatable)");
  eval_cmd->add_option("--out", eval_out, "output CSV, - for stdout");
  eval_cmd->add_flag("--no-timings", eval_no_timings, "zero the wall_ms column");
  add_walk_flags(eval_cmd, eval_walk);

  // --- gen: materialize a synthetic benchmark as files ---
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic benchmark graph to disk");
  std::string gen_spec_path, gen_prefix;
  gen_cmd->add_option("--spec", gen_spec_path, "synthetic graph spec (JSON)")->required();
  gen_cmd->add_option("--out-prefix", gen_prefix, "output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (context_cmd->parsed()) {
      auto g = load_graph(ctx_graph);
      ctx_cfg.algorithm =
          ctx_algo == "randomwalk" ? kgnotable::Algorithm::rwmult : kgnotable::Algorithm::findnc;
      ctx_cfg.validate();
      kgnotable::Query q = kgnotable::resolve_query(g, ctx_query);
      kgnotable::ContextResult ctx;
      if (ctx_cfg.algorithm == kgnotable::Algorithm::rwmult) {
        ctx = kgnotable::random_walk_context(g, q, ctx_cfg.k, ctx_cfg.walk);
      } else {
        try {
          ctx = kgnotable::context_rw(g, q, ctx_cfg.k, ctx_cfg.walk);
        } catch (const kgnotable::empty_metapath_error& e) {
          std::cerr << "warning: " << e.what() << "\n";
          ctx = kgnotable::random_walk_context(g, q, ctx_cfg.k, ctx_cfg.walk);
        }
      }
      std::string tsv;
      char buf[512];
      for (const auto& e : ctx.entries) {
        std::snprintf(buf, sizeof(buf), "%s\t%.6g\n", g.node_name(e.node).c_str(), e.score);
        tsv += buf;
      }
      write_output(ctx_out, tsv);
      return kExitOk;
    }

    if (findnc_cmd->parsed()) {
      auto g = load_graph(fn_graph);
      fn_cfg.algorithm =
          fn_algo == "rwmult" ? kgnotable::Algorithm::rwmult : kgnotable::Algorithm::findnc;
      fn_cfg.format =
          fn_format == "tsv" ? kgnotable::ReportFormat::tsv : kgnotable::ReportFormat::json;
      fn_cfg.include_timings = !fn_no_timings;
      fn_cfg.validate();
      std::vector<std::string> warnings;
      kgnotable::Query q = kgnotable::resolve_query(g, fn_query, &warnings);
      kgnotable::NotableReport report = kgnotable::find_notable(g, q, fn_cfg);
      report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      write_output(fn_out, fn_cfg.format == kgnotable::ReportFormat::tsv
                               ? kgnotable::report_to_tsv(report)
                               : kgnotable::report_to_json(report));
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      kgnotable::GridSpec grid;
      if (!eval_grid_path.empty()) {
        std::ifstream in(eval_grid_path);
        if (!in) throw std::runtime_error("cannot open grid file: " + eval_grid_path);
        grid = nlohmann::json::parse(in).get<kgnotable::GridSpec>();
      }
      std::vector<kgnotable::GroundTruth> truths;
      kgnotable::KnowledgeGraph g = [&] {
        if (!eval_spec_path.empty()) {
          std::ifstream in(eval_spec_path);
          if (!in) throw std::runtime_error("cannot open spec file: " + eval_spec_path);
          auto spec = nlohmann::json::parse(in).get<kgnotable::SyntheticSpec>();
          kgnotable::SyntheticGraph synth = kgnotable::generate(spec);
          truths = std::move(synth.truths);
          std::istringstream stream(kgnotable::triples_to_string(synth.triples));
          return kgnotable::load_triples(stream);
        }
        if (eval_graph.path.empty() || eval_truth_path.empty() || eval_query.empty()) {
          throw std::runtime_error("eval needs --spec, or --graph with --truth and --query");
        }
        std::ifstream tin(eval_truth_path);
        if (!tin) throw std::runtime_error("cannot open truth file: " + eval_truth_path);
        truths.push_back({eval_query, kgnotable::read_names(tin)});
        return load_graph(eval_graph);
      }();
      auto rows = kgnotable::run_grid(g, truths, grid, eval_walk, !eval_no_timings);
      write_output(eval_out, kgnotable::grid_to_csv(rows));
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      std::ifstream in(gen_spec_path);
      if (!in) throw std::runtime_error("cannot open spec file: " + gen_spec_path);
      auto spec = nlohmann::json::parse(in).get<kgnotable::SyntheticSpec>();
      kgnotable::SyntheticGraph synth = kgnotable::generate(spec);
      {
        std::ofstream out(gen_prefix + "_graph.tsv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + gen_prefix + "_graph.tsv");
        kgnotable::write_triples(out, synth.triples);
      }
      for (std::size_t i = 0; i < synth.truths.size(); ++i) {
        std::ofstream qout(gen_prefix + "_query_" + std::to_string(i) + ".txt", std::ios::binary);
        kgnotable::write_names(qout, synth.truths[i].query);
        std::ofstream tout(gen_prefix + "_truth_" + std::to_string(i) + ".txt", std::ios::binary);
        kgnotable::write_names(tout, synth.truths[i].relevant);
      }
      std::ofstream lout(gen_prefix + "_notable_labels.txt", std::ios::binary);
      kgnotable::write_names(lout, synth.notable_labels);
      return kExitOk;
    }
  } catch (const kgnotable::unresolved_query_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnresolvedQuery;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

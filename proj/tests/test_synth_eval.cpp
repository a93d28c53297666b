#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include "fixtures.hpp"
#include "kgnotable/eval.hpp"
#include "kgnotable/pipeline.hpp"
#include "kgnotable/synth.hpp"

using namespace kgnotable;

TEST_CASE("generation is deterministic and survives a JSON round trip") {
  SyntheticSpec spec;
  spec.rng_seed = 11;
  auto a = generate(spec);
  auto b = generate(spec);
  CHECK(triples_to_string(a.triples) == triples_to_string(b.triples));

  nlohmann::json j = spec;
  auto restored = j.get<SyntheticSpec>();
  auto c = generate(restored);
  CHECK(triples_to_string(a.triples) == triples_to_string(c.triples));
  REQUIRE(a.truths.size() == static_cast<std::size_t>(spec.domains));
  CHECK(a.truths[0].query.size() == static_cast<std::size_t>(spec.query_size));
  CHECK(a.truths[0].relevant.size() ==
        static_cast<std::size_t>(spec.entities_per_domain - spec.query_size));
}

TEST_CASE("degenerate specs are rejected") {
  SyntheticSpec one_entity;
  one_entity.entities_per_domain = 1;
  one_entity.query_size = 0;
  CHECK_THROWS_AS(generate(one_entity), std::invalid_argument);

  SyntheticSpec no_attrs;
  no_attrs.attributes.clear();
  CHECK_THROWS_AS(generate(no_attrs), std::invalid_argument);

  SyntheticSpec bad_anomaly;
  bad_anomaly.anomalies.push_back({AnomalySpec::Kind::missing_attribute, 99, 0, "color"});
  CHECK_THROWS_AS(generate(bad_anomaly), std::invalid_argument);
}

TEST_CASE("planted missing attribute shows up as a notable characteristic") {
  SyntheticSpec spec;
  spec.rng_seed = 3;
  spec.anomalies.push_back({AnomalySpec::Kind::missing_attribute, 0, 0, "color"});
  auto synth = generate(spec);
  std::istringstream in(triples_to_string(synth.triples));
  auto g = load_triples(in);

  RunConfig cfg;
  cfg.k = 30;
  cfg.walk.num_walk_samples = 20'000;
  cfg.walk.rng_seed = 5;
  cfg.include_timings = false;
  auto q = resolve_query(g, synth.truths[0].query);
  auto report = find_notable(g, q, cfg);

  bool color_notable = false;
  for (const auto& c : report.characteristics) {
    if (c.label == "color" && c.verdict.delta > 0.95 &&
        c.verdict.kind == CharacteristicKind::cardinality) {
      color_notable = true;
    }
  }
  CHECK(color_notable);
}

TEST_CASE("divergent value is caught by the instance test") {
  SyntheticSpec spec;
  spec.rng_seed = 9;
  spec.anomalies.push_back({AnomalySpec::Kind::divergent_value, 0, 1, "shape"});
  auto synth = generate(spec);
  std::istringstream in(triples_to_string(synth.triples));
  auto g = load_triples(in);

  RunConfig cfg;
  cfg.k = 30;
  cfg.walk.num_walk_samples = 20'000;
  cfg.include_timings = false;
  auto q = resolve_query(g, synth.truths[0].query);
  auto report = find_notable(g, q, cfg);
  bool shape_notable = false;
  for (const auto& c : report.characteristics) {
    if (c.label == "shape" && c.verdict.delta > 0.95 &&
        c.verdict.kind == CharacteristicKind::instance) {
      shape_notable = true;
    }
  }
  CHECK(shape_notable);
}

TEST_CASE("f1 worked values") {
  auto g = fixtures::load("a\tx\tb\na\tx\tc\na\tx\td\n");
  ContextResult result;
  result.entries = {{fixtures::node(g, "b"), 3.0}, {fixtures::node(g, "c"), 2.0}};

  GroundTruth perfect{{}, {"b", "c"}};
  CHECK(f1_at_k(g, result, perfect, 2) == Catch::Approx(1.0));

  GroundTruth disjoint{{}, {"d"}};
  CHECK(f1_at_k(g, result, disjoint, 2) == 0.0);

  // top-2 = {b,c}, truth = {b,d,a}: precision 1/2, recall 1/3, F1 = 0.4.
  GroundTruth partial{{}, {"b", "d", "a"}};
  CHECK(f1_at_k(g, result, partial, 2) == Catch::Approx(0.4));

  GroundTruth empty{{}, {}};
  CHECK_THROWS_AS(f1_at_k(g, result, empty, 2), std::invalid_argument);
  CHECK_THROWS_AS(f1_at_k(g, result, perfect, 5), std::invalid_argument);
}

TEST_CASE("grid produces one row per cell in a fixed order") {
  SyntheticSpec spec;
  spec.rng_seed = 21;
  spec.domains = 2;
  spec.entities_per_domain = 20;
  spec.query_size = 3;
  auto synth = generate(spec);
  std::istringstream in(triples_to_string(synth.triples));
  auto g = load_triples(in);

  GridSpec grid;
  grid.algos = {"contextrw"};
  grid.q_sizes = {2, 3};
  grid.c_sizes = {5, 10};
  grid.num_metapaths = {5};
  grid.max_lens = {5};
  WalkConfig walk;
  walk.num_walk_samples = 5'000;
  walk.rng_seed = 4;

  auto rows = run_grid(g, synth.truths, grid, walk, false);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].q_size == 2);
  CHECK(rows[0].c_size == 5);
  CHECK(rows[1].c_size == 10);
  for (const auto& r : rows) {
    CHECK(r.f1 >= 0.0);
    CHECK(r.f1 <= 1.0);
    CHECK(r.wall_ms == 0.0);  // timings disabled
  }

  auto again = run_grid(g, synth.truths, grid, walk, false);
  CHECK(grid_to_csv(rows) == grid_to_csv(again));
  CHECK(grid_to_csv(rows).rfind("algo,q_size,c_size,num_metapaths,max_len,f1,wall_ms\n", 0) == 0);
}

TEST_CASE("single-cell grid yields a single row") {
  SyntheticSpec spec;
  spec.rng_seed = 31;
  spec.domains = 2;
  spec.entities_per_domain = 12;
  spec.query_size = 2;
  auto synth = generate(spec);
  std::istringstream in(triples_to_string(synth.triples));
  auto g = load_triples(in);
  GridSpec grid;
  grid.algos = {"randomwalk"};
  grid.q_sizes = {2};
  grid.c_sizes = {5};
  WalkConfig walk;
  walk.num_walk_samples = 1'000;
  auto rows = run_grid(g, synth.truths, grid, walk);
  CHECK(rows.size() == 1);
}

TEST_CASE("context quality beats the baseline on planted domains") {
  SyntheticSpec spec;
  spec.rng_seed = 17;
  auto synth = generate(spec);
  std::istringstream in(triples_to_string(synth.triples));
  auto g = load_triples(in);

  WalkConfig walk;
  walk.num_walk_samples = 30'000;
  walk.rng_seed = 2;
  double crw = 0.0, rw = 0.0;
  for (const auto& truth : synth.truths) {
    std::vector<NodeId> ids;
    for (const auto& name : truth.query) ids.push_back(fixtures::node(g, name));
    Query q(g, ids);
    const std::size_t k = truth.relevant.size();
    auto c1 = context_rw(g, q, k, walk);
    auto c2 = random_walk_context(g, q, k, walk);
    crw += f1_at_k(g, c1, truth, std::min(k, c1.entries.size()));
    rw += f1_at_k(g, c2, truth, std::min(k, c2.entries.size()));
  }
  CHECK(crw >= rw);
}

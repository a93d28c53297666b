#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "kgnotable/random.hpp"

namespace kgnotable {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
};

/// One evaluation case: query node names plus the names judged relevant.
struct GroundTruth {
  std::vector<std::string> query;
  std::vector<std::string> relevant;
};

struct AttributeSpec {
  std::string label;
  int values_per_domain = 3;
  int cardinality = 1;   // edges of this label per entity
  double skew = 0.0;     // 0 = uniform; >0 weights value j by (j+1)^-skew
};

struct AnomalySpec {
  enum class Kind { missing_attribute, divergent_value };
  Kind kind;
  int domain = 0;
  int entity = 0;        // index inside the domain; keep < query_size to plant on a query node
  std::string label;
};

/// Planted-structure benchmark graph: `domains` groups of entities sharing
/// attribute labels, each domain drawing values from its own disjoint pool,
/// so within-domain entities interconnect through shared value nodes.
struct SyntheticSpec {
  int domains = 3;
  int entities_per_domain = 50;
  int query_size = 5;
  std::vector<AttributeSpec> attributes = {
      {"color", 3, 1, 0.0}, {"shape", 3, 1, 0.0}, {"material", 3, 1, 0.0}, {"origin", 3, 1, 0.0}};
  std::vector<AnomalySpec> anomalies;
  std::uint64_t rng_seed = 42;

  void validate() const {
    if (domains < 1) throw std::invalid_argument("synthetic spec: need at least one domain");
    if (entities_per_domain < 2) {
      throw std::invalid_argument("synthetic spec: need at least two entities per domain");
    }
    if (query_size < 1 || query_size >= entities_per_domain) {
      throw std::invalid_argument("synthetic spec: query_size must be in [1, entities_per_domain)");
    }
    if (attributes.empty()) throw std::invalid_argument("synthetic spec: no attributes");
    for (const auto& a : attributes) {
      if (a.label.empty() || a.values_per_domain < 1 || a.cardinality < 1 || a.skew < 0.0) {
        throw std::invalid_argument("synthetic spec: bad attribute " + a.label);
      }
    }
    for (const auto& an : anomalies) {
      if (an.domain < 0 || an.domain >= domains || an.entity < 0 ||
          an.entity >= entities_per_domain) {
        throw std::invalid_argument("synthetic spec: anomaly target out of range");
      }
      if (std::none_of(attributes.begin(), attributes.end(),
                       [&](const AttributeSpec& a) { return a.label == an.label; })) {
        throw std::invalid_argument("synthetic spec: anomaly label unknown: " + an.label);
      }
    }
  }
};

struct SyntheticGraph {
  std::vector<Triple> triples;
  std::vector<GroundTruth> truths;           // one per domain: query prefix vs. the rest
  std::vector<std::string> notable_labels;   // labels carrying planted anomalies
};

namespace detail {

inline std::string entity_name(int domain, int entity) {
  return "d" + std::to_string(domain) + "_e" + std::to_string(entity);
}

inline std::string value_name(const std::string& label, int domain, int value) {
  return label + "_d" + std::to_string(domain) + "_v" + std::to_string(value);
}

}  // namespace detail

inline SyntheticGraph generate(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticGraph out;
  std::mt19937_64 rng(spec.rng_seed);

  // Per-attribute cumulative value weights, identical across domains; the
  // domains differ by drawing from disjoint value-node pools.
  std::vector<std::vector<double>> cum_weights;
  for (const auto& a : spec.attributes) {
    std::vector<double> w(static_cast<std::size_t>(a.values_per_domain));
    for (int j = 0; j < a.values_per_domain; ++j) {
      w[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j + 1), -a.skew);
    }
    double total = 0.0;
    for (double& x : w) total += x;
    double run = 0.0;
    for (double& x : w) {
      run += x / total;
      x = run;
    }
    w.back() = 1.0;
    cum_weights.push_back(std::move(w));
  }

  for (int d = 0; d < spec.domains; ++d) {
    for (int e = 0; e < spec.entities_per_domain; ++e) {
      const std::string name = detail::entity_name(d, e);
      for (std::size_t ai = 0; ai < spec.attributes.size(); ++ai) {
        const auto& a = spec.attributes[ai];
        for (int c = 0; c < a.cardinality; ++c) {
          auto j = sample_cumulative(cum_weights[ai], uniform01(rng));
          out.triples.push_back({name, a.label, detail::value_name(a.label, d, static_cast<int>(j))});
        }
      }
    }
  }

  // Plant anomalies by rewriting the affected entity's triples.
  std::unordered_set<std::string> labels_seen;
  for (const auto& an : spec.anomalies) {
    const std::string target = detail::entity_name(an.domain, an.entity);
    if (an.kind == AnomalySpec::Kind::missing_attribute) {
      std::erase_if(out.triples, [&](const Triple& t) {
        return t.subject == target && t.predicate == an.label;
      });
    } else {
      const std::string fresh = an.label + "_odd_" + target;
      for (auto& t : out.triples) {
        if (t.subject == target && t.predicate == an.label) t.object = fresh;
      }
    }
    if (labels_seen.insert(an.label).second) out.notable_labels.push_back(an.label);
  }
  std::sort(out.notable_labels.begin(), out.notable_labels.end());

  for (int d = 0; d < spec.domains; ++d) {
    GroundTruth gt;
    for (int e = 0; e < spec.query_size; ++e) gt.query.push_back(detail::entity_name(d, e));
    for (int e = spec.query_size; e < spec.entities_per_domain; ++e) {
      gt.relevant.push_back(detail::entity_name(d, e));
    }
    out.truths.push_back(std::move(gt));
  }
  return out;
}

inline void write_triples(std::ostream& os, std::span<const Triple> triples) {
  for (const auto& t : triples) {
    os << t.subject << '\t' << t.predicate << '\t' << t.object << '\n';
  }
}

inline std::string triples_to_string(std::span<const Triple> triples) {
  std::string s;
  for (const auto& t : triples) {
    s += t.subject;
    s += '\t';
    s += t.predicate;
    s += '\t';
    s += t.object;
    s += '\n';
  }
  return s;
}

/// Ground-truth file: one entity name per line.
inline void write_names(std::ostream& os, std::span<const std::string> names) {
  for (const auto& n : names) os << n << '\n';
}

inline std::vector<std::string> read_names(std::istream& is) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

inline void to_json(nlohmann::json& j, const AttributeSpec& a) {
  j = {{"label", a.label},
       {"values_per_domain", a.values_per_domain},
       {"cardinality", a.cardinality},
       {"skew", a.skew}};
}

inline void from_json(const nlohmann::json& j, AttributeSpec& a) {
  a.label = j.at("label").get<std::string>();
  a.values_per_domain = j.value("values_per_domain", 3);
  a.cardinality = j.value("cardinality", 1);
  a.skew = j.value("skew", 0.0);
}

inline void to_json(nlohmann::json& j, const AnomalySpec& a) {
  j = {{"kind", a.kind == AnomalySpec::Kind::missing_attribute ? "missing_attribute"
                                                               : "divergent_value"},
       {"domain", a.domain},
       {"entity", a.entity},
       {"label", a.label}};
}

inline void from_json(const nlohmann::json& j, AnomalySpec& a) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "missing_attribute") {
    a.kind = AnomalySpec::Kind::missing_attribute;
  } else if (kind == "divergent_value") {
    a.kind = AnomalySpec::Kind::divergent_value;
  } else {
    throw std::invalid_argument("unknown anomaly kind: " + kind);
  }
  a.domain = j.value("domain", 0);
  a.entity = j.value("entity", 0);
  a.label = j.at("label").get<std::string>();
}

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  j = {{"seed", s.rng_seed},
       {"domains", s.domains},
       {"entities_per_domain", s.entities_per_domain},
       {"query_size", s.query_size},
       {"attributes", s.attributes},
       {"anomalies", s.anomalies}};
}

inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  s.rng_seed = j.value("seed", std::uint64_t{42});
  s.domains = j.value("domains", 3);
  s.entities_per_domain = j.value("entities_per_domain", 50);
  s.query_size = j.value("query_size", 5);
  if (j.contains("attributes")) s.attributes = j.at("attributes").get<std::vector<AttributeSpec>>();
  if (j.contains("anomalies")) s.anomalies = j.at("anomalies").get<std::vector<AnomalySpec>>();
}

}  // namespace kgnotable

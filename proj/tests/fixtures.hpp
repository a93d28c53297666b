#pragma once

#include <sstream>
#include <string>

#include "kgnotable/graph.hpp"

namespace fixtures {

// Five heads of state with studied/child/leaderOf facts; Merkel is the only
// one without a child and the only Physics graduate. Mirrors data/figure1.tsv.
inline const char* kLeadersTsv =
    "Angela Merkel\tstudied\tPhysics\n"
    "Barack Obama\tstudied\tLaw\n"
    "Vladimir Putin\tstudied\tLaw\n"
    "Matteo Renzi\tstudied\tLaw\n"
    "Francois Hollande\tstudied\tLaw\n"
    "Barack Obama\tchild\tMalia\n"
    "Vladimir Putin\tchild\tMaria\n"
    "Matteo Renzi\tchild\tFrancesco\n"
    "Francois Hollande\tchild\tThomas\n"
    "Angela Merkel\tleaderOf\tCountry\n"
    "Barack Obama\tleaderOf\tCountry\n"
    "Vladimir Putin\tleaderOf\tCountry\n"
    "Matteo Renzi\tleaderOf\tCountry\n"
    "Francois Hollande\tleaderOf\tCountry\n";

inline kgnotable::KnowledgeGraph load(const std::string& tsv,
                                      const kgnotable::LoadOptions& options = {}) {
  std::istringstream in(tsv);
  return kgnotable::load_triples(in, options);
}

inline kgnotable::KnowledgeGraph leaders_graph() { return load(kLeadersTsv); }

inline kgnotable::NodeId node(const kgnotable::KnowledgeGraph& g, const std::string& name) {
  auto id = g.find_node(name);
  if (!id) throw std::runtime_error("fixture node missing: " + name);
  return *id;
}

inline kgnotable::LabelId edge_label(const kgnotable::KnowledgeGraph& g, const std::string& name) {
  auto id = g.find_edge_label(name);
  if (!id) throw std::runtime_error("fixture label missing: " + name);
  return *id;
}

}  // namespace fixtures

#pragma once

#include <cmath>
#include <string>

#include "recognet/bnet_format.hpp"
#include "recognet/net.hpp"

namespace recognet::testing {

inline std::string data_path(const std::string& name) { return std::string(RECOGNET_DATA_DIR) + "/" + name; }

/// Same ids, cardinalities, arcs and CPT parents, with every probability
/// within `tol`. State and node labels are ignored.
inline bool same_model(const BayesNet& a, const BayesNet& b, double tol = 1e-15) {
  if (a.size() != b.size() || a.arcs() != b.arcs()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.id(i) != b.id(i) || a.cardinality(i) != b.cardinality(i)) return false;
    const Cpt& x = a.cpt(i);
    const Cpt& y = b.cpt(i);
    if (x.parents != y.parents || x.table.size() != y.table.size()) return false;
    for (std::size_t k = 0; k < x.table.size(); ++k)
      if (std::abs(x.table[k] - y.table[k]) > tol) return false;
  }
  return true;
}

/// Observed slice p(E = 0 | h1, h2) of both leaves in the two-hypothesis example.
inline constexpr double kSlice[2][2] = {{0.52, 0.18}, {0.08, 0.22}};

inline Cpt slice_leaf_cpt(const std::string& id) {
  return {id,
          {"h1", "h2"},
          {kSlice[0][0], 1 - kSlice[0][0], kSlice[0][1], 1 - kSlice[0][1], kSlice[1][0], 1 - kSlice[1][0],
           kSlice[1][1], 1 - kSlice[1][1]}};
}

/// Two uniform hypotheses, two shared leaves, both leaves observed at state 0.
inline BnetDocument shared_leaf_example() {
  BnetDocument doc{build_net({{"h1", "", 2, {}}, {"h2", "", 2, {}}, {"E1", "", 2, {}}, {"E2", "", 2, {}}},
                             {{"h1", "E1"}, {"h2", "E1"}, {"h1", "E2"}, {"h2", "E2"}},
                             {{"h1", {}, {0.5, 0.5}}, {"h2", {}, {0.5, 0.5}}, slice_leaf_cpt("E1"),
                              slice_leaf_cpt("E2")}),
                   {},
                   {}};
  doc.evidence.observe("E1", 0);
  doc.evidence.observe("E2", 0);
  return doc;
}

/// h -> E with prior (0.5, 0.5) and p(E = 0 | h) = (0.9, 0.2).
inline BayesNet chain_net() {
  return build_net({{"h", "", 2, {}}, {"E", "", 2, {}}}, {{"h", "E"}},
                   {{"h", {}, {0.5, 0.5}}, {"E", {"h"}, {0.9, 0.1, 0.2, 0.8}}});
}

}  // namespace recognet::testing

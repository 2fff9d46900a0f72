#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "recognet/bnet_format.hpp"
#include "recognet/net.hpp"

namespace recognet::vision {

/// Conventional decomposition levels, top to bottom.
inline const std::vector<std::string> kStandardLevels = {
    "object", "sub-assembly", "volume-primitive", "surface-shape", "region", "edge"};

/// A feature in the decomposition. Builder-generated parts are binary with
/// state 0 = present, 1 = absent, unless an explicit table is given.
struct PartSpec {
  std::string id;
  std::size_t level = 0;  // 0 is the top; children sit at strictly larger levels
  std::string label;
  std::size_t cardinality = 2;
  std::vector<std::string> state_labels;
  /// Full CPT in canonical row order; empty selects the defaults below.
  std::vector<double> table;
  /// Root default: p(present).
  double prior_present = 0.5;
  /// Single-parent default: p(present | parent present) and
  /// p(present | parent in any other state).
  double detection = 0.9;
  double false_alarm = 0.1;
};

enum class SharedRelation { Explicit, Exclusion, Coincidence };

/// A feature predicted by several higher-level parts. Its parents are listed
/// here, never through `arcs`.
struct SharedChildSpec {
  std::string child;
  std::vector<std::string> parents;
  SharedRelation relation = SharedRelation::Explicit;
  double epsilon = 0.05;
};

struct DecompositionSpec {
  std::vector<std::string> levels = kStandardLevels;
  std::vector<PartSpec> parts;
  /// Single-parent decomposition arcs.
  std::vector<Arc> arcs;
  std::vector<SharedChildSpec> shared_children;
};

BayesNet compile_decomposition(const DecompositionSpec& spec);

/// Copy of `spec` without its shared children and everything below them.
DecompositionSpec without_shared_children(const DecompositionSpec& spec);

/// Parent reference for the evidence-CPT builders.
struct ParentRef {
  std::string id;
  std::size_t cardinality = 2;
};

/// XOR-like evidence: p(E = present | h1, h2) = 1 - epsilon when exactly one
/// parent is present, epsilon otherwise. Throws BadEpsilon unless
/// 0 < epsilon < 0.5.
Cpt exclusion_evidence_cpt(const std::string& child, const ParentRef& first, const ParentRef& second,
                           double epsilon = 0.05);

/// AND-like evidence: p(E = present | h1, h2) = 1 - epsilon when both parents
/// are present, epsilon otherwise.
Cpt coincidence_evidence_cpt(const std::string& child, const ParentRef& first, const ParentRef& second,
                             double epsilon = 0.05);

/// Throws LevelViolation if any arc does not point strictly downward.
void check_levels(const BayesNet& net, const std::map<std::string, std::size_t>& levels);

/// Reads a decomposition back out of a BNET document carrying `level`
/// statements. Multi-parent nodes become explicit shared children.
DecompositionSpec decomposition_from_document(const BnetDocument& doc);

/// Object hypothesis with a generalized-cylinder decomposition: the cylinder
/// predicts a face and an axis independently, the limb depends on both, and
/// each of face, axis and limb predicts an edge primitive.
DecompositionSpec generalized_cylinder_spec();

}  // namespace recognet::vision

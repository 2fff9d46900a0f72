#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recognet/matrix.hpp"

namespace recognet {

/// A discrete chance node. State 0 means "present" for nodes produced by the
/// vision builders; the core itself attaches no meaning to state order.
struct NodeDecl {
  std::string id;
  std::string label;
  std::size_t cardinality = 2;
  std::vector<std::string> state_labels;

  friend bool operator==(const NodeDecl&, const NodeDecl&) = default;
};

struct Arc {
  std::string parent;
  std::string child;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Conditional distribution of `node` given `parents`.
///
/// `table` is row-major: one row per parent-state combination, enumerated with
/// the last-declared parent varying fastest, and one column per node state.
/// A root's table is a single row holding its prior.
struct Cpt {
  std::string node;
  std::vector<std::string> parents;
  std::vector<double> table;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

enum class StructureClass { Tree, Polytree, SharedLeafPair, General };

std::string_view to_string(StructureClass c) noexcept;

/// Hard evidence: node id -> observed state index.
class Evidence {
 public:
  Evidence() = default;
  Evidence(std::initializer_list<std::pair<const std::string, std::size_t>> init);

  /// Throws InvalidEvidence if the node is already observed at another state.
  void observe(const std::string& node, std::size_t state);
  std::optional<std::size_t> state_of(std::string_view node) const;
  bool contains(std::string_view node) const { return state_of(node).has_value(); }
  bool empty() const noexcept { return assignments_.empty(); }
  std::size_t size() const noexcept { return assignments_.size(); }
  const std::map<std::string, std::size_t, std::less<>>& assignments() const noexcept {
    return assignments_;
  }

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::map<std::string, std::size_t, std::less<>> assignments_;
};

class BayesNet;

BayesNet build_net(std::vector<NodeDecl> nodes, std::vector<Arc> arcs, std::vector<Cpt> cpts);

/// Validated, immutable discrete Bayesian network. Only build_net and the
/// transformations below construct one, so every instance satisfies the
/// acyclicity and CPT invariants.
class BayesNet {
 public:
  std::size_t size() const noexcept { return nodes_.size(); }

  const std::vector<NodeDecl>& nodes() const noexcept { return nodes_; }
  /// Canonical order: grouped by child in node order, parents in CPT order.
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws UnknownNode.
  std::size_t index_of(std::string_view id) const;

  const NodeDecl& node(std::size_t i) const { return nodes_[i]; }
  const std::string& id(std::size_t i) const { return nodes_[i].id; }
  const Cpt& cpt(std::size_t i) const { return cpts_[i]; }
  std::size_t cardinality(std::size_t i) const { return nodes_[i].cardinality; }

  std::span<const std::size_t> parents(std::size_t i) const { return parents_[i]; }
  std::span<const std::size_t> children(std::size_t i) const { return children_[i]; }
  bool is_root(std::size_t i) const { return parents_[i].empty(); }
  bool is_leaf(std::size_t i) const { return children_[i].empty(); }

  std::size_t row_count(std::size_t i) const;
  /// Row index for a parent-state combination (listed in CPT parent order).
  std::size_t row_index(std::size_t i, std::span<const std::size_t> parent_states) const;
  std::span<const double> row(std::size_t i, std::size_t row) const;
  double probability(std::size_t i, std::size_t state,
                     std::span<const std::size_t> parent_states) const;

  /// Parents before children; ties broken by declaration order.
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  friend bool operator==(const BayesNet& a, const BayesNet& b) {
    return a.nodes_ == b.nodes_ && a.arcs_ == b.arcs_ && a.cpts_ == b.cpts_;
  }

 private:
  friend BayesNet build_net(std::vector<NodeDecl>, std::vector<Arc>, std::vector<Cpt>);

  std::vector<NodeDecl> nodes_;
  std::vector<Arc> arcs_;
  std::vector<Cpt> cpts_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

/// Checks that every observed node exists and every state is in range.
void validate_evidence(const BayesNet& net, const Evidence& evidence);

StructureClass classify_structure(const BayesNet& net);

/// True iff the underlying undirected graph has no cycle (forests included).
bool is_polytree(const BayesNet& net);

/// Shachter arc reversal. Both endpoints end up conditioned on the union of
/// their former parents; the joint distribution is unchanged.
BayesNet reverse_arc(const BayesNet& net, std::string_view parent, std::string_view child);

/// Likelihood slice M(i, j) = p(node = state | first parent = i, second parent = j)
/// of a two-parent node.
Matrix likelihood_slice(const BayesNet& net, std::string_view node, std::size_t state);

/// Rank-one test per child state of a two-parent CPT: every 2x2 minor of the
/// slice must satisfy |minor| <= tolerance * max_entry^2.
std::vector<bool> separability_check(const BayesNet& net, std::string_view node,
                                     double tolerance = 1e-9);

/// Rank-one test on a single slice, same relative criterion.
bool is_rank_one(const Matrix& slice, double tolerance = 1e-9);

}  // namespace recognet

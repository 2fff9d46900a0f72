#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recognet/net.hpp"

namespace recognet {

using DirectedEdge = std::pair<std::string, std::string>;

/// Messages and beliefs from one propagation run. Every vector is
/// L1-normalized.
struct MessageState {
  /// (parent, child) -> pi message over the parent's states.
  std::map<DirectedEdge, Vector> pi;
  /// (child, parent) -> lambda message over the parent's states.
  std::map<DirectedEdge, Vector> lambda;
  std::map<std::string, Vector> beliefs;
};

/// Pi message a root sends to `excluding`: its prior times the lambda
/// messages from every other child, normalized.
Vector root_pi_message(std::span<const double> prior,
                       const std::vector<std::pair<std::string, Vector>>& incoming_lambdas,
                       std::string_view excluding);

/// Lambda an instantiated two-parent leaf sends to `target`:
///   lambda(i) = alpha * sum_j pi(j) * p(leaf = k | target = i, other = j)
/// The slice is always read receiving-parent x sending-parent, whichever of
/// the two declared parents is the target.
Vector leaf_lambda_message(const BayesNet& net, std::string_view leaf,
                           std::optional<std::size_t> evidence_state,
                           std::span<const double> incoming_pi, std::string_view target);

/// Exact propagation on a polytree (collect then distribute from the
/// lowest-id node of each component). Evidence is accepted on leaves only.
MessageState propagate(const BayesNet& net, const Evidence& evidence);

/// Root posterior of a tree from a single upward lambda pass; no pi messages.
Vector lambda_only_update(const BayesNet& net, const Evidence& evidence, std::string_view root);

}  // namespace recognet

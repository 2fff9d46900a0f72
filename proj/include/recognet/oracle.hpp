#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "recognet/net.hpp"

namespace recognet {

/// Default bound on the number of joint entries the oracle will enumerate.
inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 20;

/// Full joint distribution. Assignments are enumerated in mixed radix over
/// `order` (node declaration order), last node varying fastest.
struct JointTable {
  std::vector<std::string> order;
  std::vector<std::size_t> cardinalities;
  std::vector<double> probabilities;

  /// Flat index of a full assignment given in `order`.
  std::size_t index(std::span<const std::size_t> states) const;
};

JointTable joint_enumeration(const BayesNet& net, std::size_t size_cap = kDefaultSizeCap);

/// Exact conditional marginal of `query` given hard evidence.
Vector posterior(const BayesNet& net, const Evidence& evidence, std::string_view query,
                 std::size_t size_cap = kDefaultSizeCap);

/// Exact conditional marginals of every node, in node order. One enumeration.
std::vector<Vector> all_posteriors(const BayesNet& net, const Evidence& evidence,
                                   std::size_t size_cap = kDefaultSizeCap);

/// Marginal of `node` before any observation.
Vector pre_posterior(const BayesNet& net, std::string_view node,
                     std::size_t size_cap = kDefaultSizeCap);

/// Probability of the evidence itself.
double evidence_probability(const BayesNet& net, const Evidence& evidence,
                            std::size_t size_cap = kDefaultSizeCap);

}  // namespace recognet

#include "recognet/oracle.hpp"

#include "recognet/error.hpp"

namespace recognet {

namespace {

std::size_t checked_size(const BayesNet& net, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < net.size(); ++i) {
    total *= net.cardinality(i);
    if (total > cap) {
      throw Error(ErrorCode::TooLarge, "joint table exceeds " + std::to_string(cap) + " entries");
    }
  }
  return total;
}

// Calls visit(states, probability) for every full assignment, in table order.
template <typename Visit>
void enumerate(const BayesNet& net, std::size_t cap, Visit&& visit) {
  const std::size_t total = checked_size(net, cap);
  const std::size_t n = net.size();
  std::vector<std::size_t> states(n, 0);
  std::vector<std::size_t> parent_states;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double p = 1.0;
    for (std::size_t i = 0; i < n && p != 0.0; ++i) {
      parent_states.clear();
      for (std::size_t q : net.parents(i)) parent_states.push_back(states[q]);
      p *= net.probability(i, states[i], parent_states);
    }
    visit(std::span<const std::size_t>(states), p);
    for (std::size_t k = n; k-- > 0;) {
      if (++states[k] < net.cardinality(k)) break;
      states[k] = 0;
    }
  }
}

}  // namespace

std::size_t JointTable::index(std::span<const std::size_t> states) const {
  if (states.size() != cardinalities.size()) {
    throw Error(ErrorCode::DimensionMismatch, "assignment length differs from table order");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < states.size(); ++k) flat = flat * cardinalities[k] + states[k];
  return flat;
}

JointTable joint_enumeration(const BayesNet& net, std::size_t size_cap) {
  JointTable table;
  for (const auto& d : net.nodes()) {
    table.order.push_back(d.id);
    table.cardinalities.push_back(d.cardinality);
  }
  table.probabilities.reserve(checked_size(net, size_cap));
  enumerate(net, size_cap, [&](auto, double p) { table.probabilities.push_back(p); });
  return table;
}

std::vector<Vector> all_posteriors(const BayesNet& net, const Evidence& evidence, std::size_t size_cap) {
  validate_evidence(net, evidence);
  std::vector<std::pair<std::size_t, std::size_t>> observed;
  for (const auto& [id, state] : evidence.assignments()) observed.emplace_back(net.index_of(id), state);

  std::vector<Vector> out(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) out[i].assign(net.cardinality(i), 0.0);
  double mass = 0.0;
  enumerate(net, size_cap, [&](std::span<const std::size_t> states, double p) {
    for (const auto& [i, s] : observed)
      if (states[i] != s) return;
    mass += p;
    for (std::size_t i = 0; i < states.size(); ++i) out[i][states[i]] += p;
  });
  if (!(mass > 0.0)) throw Error(ErrorCode::ZeroProbabilityEvidence, "evidence has probability zero");
  for (auto& v : out)
    for (double& x : v) x /= mass;
  return out;
}

Vector posterior(const BayesNet& net, const Evidence& evidence, std::string_view query, std::size_t size_cap) {
  const std::size_t q = net.index_of(query);
  return all_posteriors(net, evidence, size_cap)[q];
}

Vector pre_posterior(const BayesNet& net, std::string_view node, std::size_t size_cap) {
  return posterior(net, Evidence{}, node, size_cap);
}

double evidence_probability(const BayesNet& net, const Evidence& evidence, std::size_t size_cap) {
  validate_evidence(net, evidence);
  std::vector<std::pair<std::size_t, std::size_t>> observed;
  for (const auto& [id, state] : evidence.assignments()) observed.emplace_back(net.index_of(id), state);
  double mass = 0.0;
  enumerate(net, size_cap, [&](std::span<const std::size_t> states, double p) {
    for (const auto& [i, s] : observed)
      if (states[i] != s) return;
    mass += p;
  });
  return mass;
}

}  // namespace recognet

#include "recognet/pearl.hpp"

#include <algorithm>
#include <numeric>

#include "recognet/error.hpp"

namespace recognet {

namespace {

void require_leaf_evidence(const BayesNet& net, const Evidence& evidence) {
  validate_evidence(net, evidence);
  for (const auto& [id, state] : evidence.assignments()) {
    if (!net.is_leaf(net.index_of(id))) {
      throw Error(ErrorCode::EvidenceOnInternalNode,
                  "'" + id + "' has children; observe leaves only or use the exact solver");
    }
  }
}

Vector evidence_indicator(const BayesNet& net, const Evidence& evidence, std::size_t x) {
  Vector v(net.cardinality(x), 1.0);
  if (auto s = evidence.state_of(net.id(x))) {
    std::fill(v.begin(), v.end(), 0.0);
    v[*s] = 1.0;
  }
  return v;
}

// Pearl propagation over one polytree. Messages are keyed by node indices:
// pi_[{p, x}] is what parent p sent x, lambda_[{c, x}] what child c sent x.
class PolytreePropagator {
 public:
  PolytreePropagator(const BayesNet& net, const Evidence& evidence) : net_(net), evidence_(evidence) {}

  MessageState run() {
    const std::size_t n = net_.size();
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t p : net_.parents(c)) {
        neighbours[c].push_back(p);
        neighbours[p].push_back(c);
      }
    auto by_id = [&](std::size_t a, std::size_t b) { return net_.id(a) < net_.id(b); };
    for (auto& list : neighbours) std::sort(list.begin(), list.end(), by_id);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), by_id);

    std::vector<bool> visited(n, false);
    for (std::size_t pivot : ids) {
      if (visited[pivot]) continue;
      // Preorder walk of this component with its tree parents.
      std::vector<std::size_t> order;
      std::vector<std::size_t> tree_parent(n, n);
      std::vector<std::size_t> stack{pivot};
      visited[pivot] = true;
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (auto it = neighbours[v].rbegin(); it != neighbours[v].rend(); ++it) {
          if (!visited[*it]) {
            visited[*it] = true;
            tree_parent[*it] = v;
            stack.push_back(*it);
          }
        }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (tree_parent[*it] != n) send(*it, tree_parent[*it]);
      for (std::size_t v : order)
        for (std::size_t w : neighbours[v])
          if (tree_parent[w] == v) send(v, w);
    }

    MessageState state;
    for (std::size_t x = 0; x < n; ++x) {
      Vector bel = hadamard(causal_support(x), diagnostic_support(x, n));
      normalize_in_place(bel);
      state.beliefs.emplace(net_.id(x), std::move(bel));
    }
    for (const auto& [edge, v] : pi_) state.pi.emplace(DirectedEdge{net_.id(edge.first), net_.id(edge.second)}, v);
    for (const auto& [edge, v] : lambda_) {
      state.lambda.emplace(DirectedEdge{net_.id(edge.first), net_.id(edge.second)}, v);
    }
    return state;
  }

 private:
  void send(std::size_t from, std::size_t to) {
    const auto ps = net_.parents(from);
    if (std::find(ps.begin(), ps.end(), to) != ps.end()) {
      lambda_[{from, to}] = lambda_message(from, to);
    } else {
      pi_[{from, to}] = pi_message(from, to);
    }
  }

  // Evidence times lambda messages from every child except `skip_child`.
  Vector diagnostic_support(std::size_t x, std::size_t skip_child) const {
    Vector v = evidence_indicator(net_, evidence_, x);
    for (std::size_t c : net_.children(x)) {
      if (c == skip_child) continue;
      const Vector& m = lambda_.at({c, x});
      for (std::size_t s = 0; s < v.size(); ++s) v[s] *= m[s];
    }
    return v;
  }

  // pi(x) = sum over parent configurations of p(x | u) * prod_k pi_k(u_k).
  Vector causal_support(std::size_t x) const {
    const auto ps = net_.parents(x);
    const std::size_t card = net_.cardinality(x);
    Vector out(card, 0.0);
    std::vector<std::size_t> states(ps.size(), 0);
    for (std::size_t r = 0; r < net_.row_count(x); ++r) {
      double w = 1.0;
      for (std::size_t k = 0; k < ps.size(); ++k) w *= pi_.at({ps[k], x})[states[k]];
      const auto row = net_.row(x, r);
      for (std::size_t s = 0; s < card; ++s) out[s] += w * row[s];
      advance(states, ps);
    }
    return out;
  }

  Vector pi_message(std::size_t x, std::size_t child) const {
    Vector m = hadamard(causal_support(x), diagnostic_support(x, child));
    normalize_in_place(m);
    return m;
  }

  Vector lambda_message(std::size_t x, std::size_t parent) const {
    const auto ps = net_.parents(x);
    const std::size_t target = static_cast<std::size_t>(std::find(ps.begin(), ps.end(), parent) - ps.begin());
    const Vector lam = diagnostic_support(x, net_.size());
    Vector out(net_.cardinality(parent), 0.0);
    std::vector<std::size_t> states(ps.size(), 0);
    for (std::size_t r = 0; r < net_.row_count(x); ++r) {
      double w = 1.0;
      for (std::size_t k = 0; k < ps.size(); ++k)
        if (k != target) w *= pi_.at({ps[k], x})[states[k]];
      const auto row = net_.row(x, r);
      double expected = 0.0;
      for (std::size_t s = 0; s < row.size(); ++s) expected += row[s] * lam[s];
      out[states[target]] += w * expected;
      advance(states, ps);
    }
    normalize_in_place(out);
    return out;
  }

  void advance(std::vector<std::size_t>& states, std::span<const std::size_t> ps) const {
    for (std::size_t k = states.size(); k-- > 0;) {
      if (++states[k] < net_.cardinality(ps[k])) return;
      states[k] = 0;
    }
  }

  const BayesNet& net_;
  const Evidence& evidence_;
  std::map<std::pair<std::size_t, std::size_t>, Vector> pi_;
  std::map<std::pair<std::size_t, std::size_t>, Vector> lambda_;
};

}  // namespace

Vector root_pi_message(std::span<const double> prior,
                       const std::vector<std::pair<std::string, Vector>>& incoming_lambdas,
                       std::string_view excluding) {
  Vector out(prior.begin(), prior.end());
  for (const auto& [child, lambda] : incoming_lambdas) {
    if (lambda.size() != out.size()) {
      throw Error(ErrorCode::DimensionMismatch, "lambda from '" + child + "' has wrong length");
    }
    if (child == excluding) continue;
    for (std::size_t s = 0; s < out.size(); ++s) out[s] *= lambda[s];
  }
  normalize_in_place(out);
  return out;
}

Vector leaf_lambda_message(const BayesNet& net, std::string_view leaf,
                           std::optional<std::size_t> evidence_state, std::span<const double> incoming_pi,
                           std::string_view target) {
  const std::size_t e = net.index_of(leaf);
  const auto ps = net.parents(e);
  if (ps.size() != 2) {
    throw Error(ErrorCode::WrongArity, "'" + std::string(leaf) + "' has " + std::to_string(ps.size()) +
                                           " parents, expected 2");
  }
  if (!evidence_state) {
    throw Error(ErrorCode::NotInstantiated, "'" + std::string(leaf) + "' must be observed");
  }
  const std::size_t t = net.index_of(target);
  if (t != ps[0] && t != ps[1]) {
    throw Error(ErrorCode::UnknownNode, "'" + std::string(target) + "' is not a parent of '" +
                                            std::string(leaf) + "'");
  }
  const Matrix slice = likelihood_slice(net, leaf, *evidence_state);
  const Matrix oriented = t == ps[0] ? slice : slice.transposed();
  if (incoming_pi.size() != oriented.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "incoming pi has wrong length");
  }
  Vector out = oriented * incoming_pi;
  normalize_in_place(out);
  return out;
}

MessageState propagate(const BayesNet& net, const Evidence& evidence) {
  if (!is_polytree(net)) {
    throw Error(ErrorCode::NotPolytree, "net is multiply connected; use the eigen or exact solver");
  }
  require_leaf_evidence(net, evidence);
  return PolytreePropagator(net, evidence).run();
}

Vector lambda_only_update(const BayesNet& net, const Evidence& evidence, std::string_view root) {
  if (classify_structure(net) != StructureClass::Tree) {
    throw Error(ErrorCode::NotTree, "lambda-only updating needs a tree");
  }
  const std::size_t r = net.index_of(root);
  if (!net.is_root(r)) throw Error(ErrorCode::NotTree, "'" + std::string(root) + "' is not the tree root");
  require_leaf_evidence(net, evidence);

  // Children after parents in topological order, so walking it backwards
  // finishes every subtree before its parent needs the message.
  std::vector<Vector> lambda(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) lambda[i] = evidence_indicator(net, evidence, i);
  const auto& topo = net.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t x = *it;
    if (net.is_root(x)) continue;
    const std::size_t u = net.parents(x)[0];
    Vector msg(net.cardinality(u), 0.0);
    for (std::size_t us = 0; us < msg.size(); ++us) {
      const auto row = net.row(x, us);
      for (std::size_t s = 0; s < row.size(); ++s) msg[us] += row[s] * lambda[x][s];
    }
    normalize_in_place(msg);
    for (std::size_t us = 0; us < msg.size(); ++us) lambda[u][us] *= msg[us];
  }
  Vector bel = hadamard(net.row(r, 0), lambda[r]);
  normalize_in_place(bel);
  return bel;
}

}  // namespace recognet

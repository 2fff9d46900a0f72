#include "recognet/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "recognet/error.hpp"

namespace recognet {

namespace {

constexpr double kRowSumTolerance = 1e-9;

std::string format_states(std::span<const std::size_t> states) {
  if (states.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(states[i]);
  }
  return out;
}

// Mixed-radix decode of a CPT row index, last parent fastest.
std::vector<std::size_t> decode_row(std::size_t row, std::span<const std::size_t> cards) {
  std::vector<std::size_t> states(cards.size());
  for (std::size_t k = cards.size(); k-- > 0;) {
    states[k] = row % cards[k];
    row /= cards[k];
  }
  return states;
}

// Lists one directed cycle among `remaining` (nodes Kahn's algorithm could not
// schedule). Every such node has a predecessor that is also remaining, so
// walking predecessors must revisit a node.
std::string describe_cycle(const std::vector<NodeDecl>& nodes,
                           const std::vector<std::vector<std::size_t>>& parents,
                           const std::vector<bool>& remaining) {
  std::size_t start = 0;
  while (!remaining[start]) ++start;
  std::vector<std::size_t> walk;
  std::vector<int> seen_at(nodes.size(), -1);
  std::size_t cur = start;
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    for (std::size_t p : parents[cur]) {
      if (remaining[p]) {
        cur = p;
        break;
      }
    }
  }
  // walk[seen_at[cur]..] is a cycle traversed child -> parent; print it forwards.
  std::vector<std::size_t> cycle(walk.begin() + seen_at[cur], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::string out;
  for (std::size_t n : cycle) out += nodes[n].id + " -> ";
  out += nodes[cycle.front()].id;
  return out;
}

}  // namespace

std::string_view to_string(StructureClass c) noexcept {
  switch (c) {
    case StructureClass::Tree: return "Tree";
    case StructureClass::Polytree: return "Polytree";
    case StructureClass::SharedLeafPair: return "SharedLeafPair";
    case StructureClass::General: return "General";
  }
  return "General";
}

Evidence::Evidence(std::initializer_list<std::pair<const std::string, std::size_t>> init) {
  for (const auto& [node, state] : init) observe(node, state);
}

void Evidence::observe(const std::string& node, std::size_t state) {
  auto [it, inserted] = assignments_.emplace(node, state);
  if (!inserted && it->second != state) {
    throw Error(ErrorCode::InvalidEvidence, "node '" + node + "' observed twice with different states");
  }
}

std::optional<std::size_t> Evidence::state_of(std::string_view node) const {
  auto it = assignments_.find(node);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> BayesNet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t BayesNet::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::UnknownNode, "no node named '" + std::string(id) + "'");
}

std::size_t BayesNet::row_count(std::size_t i) const {
  return cpts_[i].table.size() / nodes_[i].cardinality;
}

std::size_t BayesNet::row_index(std::size_t i, std::span<const std::size_t> parent_states) const {
  const auto& ps = parents_[i];
  if (parent_states.size() != ps.size()) {
    throw Error(ErrorCode::DimensionMismatch, "wrong number of parent states for '" + id(i) + "'");
  }
  std::size_t row = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) row = row * nodes_[ps[k]].cardinality + parent_states[k];
  return row;
}

std::span<const double> BayesNet::row(std::size_t i, std::size_t r) const {
  const std::size_t card = nodes_[i].cardinality;
  return std::span<const double>(cpts_[i].table).subspan(r * card, card);
}

double BayesNet::probability(std::size_t i, std::size_t state,
                             std::span<const std::size_t> parent_states) const {
  return row(i, row_index(i, parent_states))[state];
}

BayesNet build_net(std::vector<NodeDecl> nodes, std::vector<Arc> arcs, std::vector<Cpt> cpts) {
  BayesNet net;
  const std::size_t n = nodes.size();

  for (std::size_t i = 0; i < n; ++i) {
    NodeDecl& d = nodes[i];
    if (d.id.empty()) throw Error(ErrorCode::InvalidSpec, "node with empty id");
    if (!net.index_.emplace(d.id, i).second) {
      throw Error(ErrorCode::DuplicateNode, "node '" + d.id + "' declared twice");
    }
    if (d.cardinality < 2) {
      throw Error(ErrorCode::InvalidSpec, "node '" + d.id + "' has cardinality < 2");
    }
    if (d.label.empty()) d.label = d.id;
    if (d.state_labels.empty()) {
      for (std::size_t s = 0; s < d.cardinality; ++s) d.state_labels.push_back("s" + std::to_string(s));
    }
    if (d.state_labels.size() != d.cardinality) {
      throw Error(ErrorCode::InvalidSpec, "node '" + d.id + "' has " +
                                              std::to_string(d.state_labels.size()) +
                                              " state labels for cardinality " +
                                              std::to_string(d.cardinality));
    }
    std::set<std::string> unique(d.state_labels.begin(), d.state_labels.end());
    if (unique.size() != d.state_labels.size()) {
      throw Error(ErrorCode::InvalidSpec, "node '" + d.id + "' has duplicate state labels");
    }
  }

  auto lookup = [&](const std::string& id) {
    auto it = net.index_.find(id);
    if (it == net.index_.end()) throw Error(ErrorCode::UnknownNode, "arc refers to undeclared node '" + id + "'");
    return it->second;
  };

  net.parents_.assign(n, {});
  net.children_.assign(n, {});
  std::set<std::pair<std::size_t, std::size_t>> seen_arcs;
  for (const Arc& a : arcs) {
    const std::size_t p = lookup(a.parent);
    const std::size_t c = lookup(a.child);
    if (p == c) throw Error(ErrorCode::CycleDetected, a.parent + " -> " + a.child);
    if (!seen_arcs.emplace(p, c).second) {
      throw Error(ErrorCode::DuplicateArc, a.parent + " -> " + a.child + " declared twice");
    }
    net.parents_[c].push_back(p);
  }

  // Topological order (Kahn, lowest declaration index first).
  {
    std::vector<std::size_t> indegree(n);
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t c = 0; c < n; ++c) {
      indegree[c] = net.parents_[c].size();
      for (std::size_t p : net.parents_[c]) out[p].push_back(c);
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
      if (indegree[i] == 0) ready.insert(i);
    while (!ready.empty()) {
      const std::size_t v = *ready.begin();
      ready.erase(ready.begin());
      net.topo_.push_back(v);
      for (std::size_t c : out[v])
        if (--indegree[c] == 0) ready.insert(c);
    }
    if (net.topo_.size() != n) {
      std::vector<bool> remaining(n, true);
      for (std::size_t v : net.topo_) remaining[v] = false;
      throw Error(ErrorCode::CycleDetected, describe_cycle(nodes, net.parents_, remaining));
    }
  }

  std::vector<std::optional<Cpt>> by_node(n);
  for (Cpt& cpt : cpts) {
    auto it = net.index_.find(cpt.node);
    if (it == net.index_.end()) {
      throw Error(ErrorCode::UnknownNode, "cpt for undeclared node '" + cpt.node + "'");
    }
    if (by_node[it->second]) {
      throw Error(ErrorCode::CptMismatch, "node '" + cpt.node + "' has more than one cpt");
    }
    by_node[it->second] = std::move(cpt);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = nodes[i].id;
    if (!by_node[i]) throw Error(ErrorCode::CptMismatch, "node '" + id + "' has no cpt");
    const Cpt& cpt = *by_node[i];

    std::vector<std::string> declared;
    for (std::size_t p : net.parents_[i]) declared.push_back(nodes[p].id);
    if (cpt.parents != declared) {
      std::string want, got;
      for (const auto& s : declared) want += " " + s;
      for (const auto& s : cpt.parents) got += " " + s;
      throw Error(ErrorCode::CptMismatch, "cpt '" + id + "' parents [" + got +
                                              " ] differ from declared in-arcs [" + want + " ]");
    }

    std::vector<std::size_t> cards;
    std::size_t rows = 1;
    for (std::size_t p : net.parents_[i]) {
      cards.push_back(nodes[p].cardinality);
      rows *= nodes[p].cardinality;
    }
    const std::size_t card = nodes[i].cardinality;
    if (cpt.table.size() != rows * card) {
      throw Error(ErrorCode::CptMismatch, "cpt '" + id + "' has " + std::to_string(cpt.table.size()) +
                                              " entries, expected " + std::to_string(rows * card));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      bool has_zero = false;
      for (std::size_t s = 0; s < card; ++s) {
        const double p = cpt.table[r * card + s];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
          throw Error(ErrorCode::CptMismatch, "cpt '" + id + "' row " +
                                                  format_states(decode_row(r, cards)) +
                                                  " has entry outside [0,1]");
        }
        has_zero = has_zero || p == 0.0;
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "cpt '" << id << "' row " << format_states(decode_row(r, cards)) << " sums to " << sum;
        throw Error(ErrorCode::CptMismatch, msg.str());
      }
      if (has_zero) {
        net.warnings_.push_back("cpt '" + id + "' row " + format_states(decode_row(r, cards)) +
                                " contains zero-probability entries");
      }
    }
  }

  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t p : net.parents_[c]) {
      net.children_[p].push_back(c);
      net.arcs_.push_back({nodes[p].id, nodes[c].id});
    }
  for (auto& cpt : by_node) net.cpts_.push_back(std::move(*cpt));
  net.nodes_ = std::move(nodes);
  return net;
}

void validate_evidence(const BayesNet& net, const Evidence& evidence) {
  for (const auto& [node, state] : evidence.assignments()) {
    const auto i = net.find(node);
    if (!i) throw Error(ErrorCode::UnknownNode, "evidence on undeclared node '" + node + "'");
    if (state >= net.cardinality(*i)) {
      throw Error(ErrorCode::InvalidEvidence, "evidence state " + std::to_string(state) +
                                                  " out of range for '" + node + "'");
    }
  }
}

bool is_polytree(const BayesNet& net) {
  std::vector<std::size_t> parent(net.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t c = 0; c < net.size(); ++c)
    for (std::size_t p : net.parents(c)) {
      const std::size_t a = root(p), b = root(c);
      if (a == b) return false;
      parent[a] = b;
    }
  return true;
}

StructureClass classify_structure(const BayesNet& net) {
  const std::size_t n = net.size();
  if (is_polytree(net)) {
    // A forest with n - 1 edges is connected.
    const bool connected = net.arcs().size() + 1 == n;
    bool single_parent = true;
    for (std::size_t i = 0; i < n; ++i) single_parent = single_parent && net.parents(i).size() <= 1;
    return connected && single_parent ? StructureClass::Tree : StructureClass::Polytree;
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i)
    if (net.is_root(i)) roots.push_back(i);
  if (roots.size() == 2) {
    bool all_leaves = true;
    bool shared = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (net.is_root(i)) continue;
      all_leaves = all_leaves && net.is_leaf(i);
      shared = shared || net.parents(i).size() == 2;
    }
    // Non-roots have only root parents when they are all leaves and there are
    // exactly two roots, so the parent-subset condition is implied.
    if (all_leaves && shared) return StructureClass::SharedLeafPair;
  }
  return StructureClass::General;
}

namespace {

bool has_directed_path(const BayesNet& net, std::size_t from, std::size_t to,
                       std::size_t skip_parent, std::size_t skip_child) {
  std::vector<bool> seen(net.size(), false);
  std::vector<std::size_t> stack{from};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t c : net.children(v)) {
      if (v == skip_parent && c == skip_child) continue;
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return false;
}

}  // namespace

BayesNet reverse_arc(const BayesNet& net, std::string_view parent_id, std::string_view child_id) {
  const std::size_t x = net.index_of(parent_id);
  const std::size_t y = net.index_of(child_id);
  const auto xp = net.parents(y);
  if (std::find(xp.begin(), xp.end(), x) == xp.end()) {
    throw Error(ErrorCode::NoSuchArc, std::string(parent_id) + " -> " + std::string(child_id));
  }
  if (has_directed_path(net, x, y, x, y)) {
    throw Error(ErrorCode::WouldCreateCycle, "another directed path leads from '" +
                                                 std::string(parent_id) + "' to '" +
                                                 std::string(child_id) + "'");
  }

  // New parent lists (indices). y keeps its other parents, then gains x's.
  std::vector<std::size_t> y_new;
  for (std::size_t p : net.parents(y))
    if (p != x) y_new.push_back(p);
  for (std::size_t p : net.parents(x))
    if (std::find(y_new.begin(), y_new.end(), p) == y_new.end()) y_new.push_back(p);
  // x keeps its parents, gains y's other parents, then y itself.
  std::vector<std::size_t> x_new(net.parents(x).begin(), net.parents(x).end());
  for (std::size_t p : net.parents(y))
    if (p != x && std::find(x_new.begin(), x_new.end(), p) == x_new.end()) x_new.push_back(p);
  x_new.push_back(y);

  // Union of all conditioning variables; the new tables are filled by walking
  // every assignment of this set.
  std::vector<std::size_t> scope = y_new;
  const std::size_t cx = net.cardinality(x), cy = net.cardinality(y);
  std::vector<std::size_t> scope_cards;
  std::size_t combos = 1;
  for (std::size_t v : scope) {
    scope_cards.push_back(net.cardinality(v));
    combos *= net.cardinality(v);
  }

  std::vector<std::size_t> state(net.size(), 0);
  auto states_of = [&](std::span<const std::size_t> vars) {
    std::vector<std::size_t> s;
    s.reserve(vars.size());
    for (std::size_t v : vars) s.push_back(state[v]);
    return s;
  };

  Cpt y_cpt{net.id(y), {}, std::vector<double>(combos * cy, 0.0)};
  Cpt x_cpt{net.id(x), {}, std::vector<double>(combos * cy * cx, 0.0)};
  for (std::size_t v : y_new) y_cpt.parents.push_back(net.id(v));
  for (std::size_t v : x_new) x_cpt.parents.push_back(net.id(v));

  // Builds a row index for `vars` under the current `state`.
  auto row_of = [&](const std::vector<std::size_t>& vars) {
    std::size_t r = 0;
    for (std::size_t v : vars) r = r * net.cardinality(v) + state[v];
    return r;
  };

  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::size_t rest = combo;
    for (std::size_t k = scope.size(); k-- > 0;) {
      state[scope[k]] = rest % scope_cards[k];
      rest /= scope_cards[k];
    }
    const auto x_row = net.row(x, net.row_index(x, states_of(net.parents(x))));
    for (std::size_t ys = 0; ys < cy; ++ys) {
      state[y] = ys;
      std::vector<double> joint(cx);
      double marginal = 0.0;
      for (std::size_t xs = 0; xs < cx; ++xs) {
        state[x] = xs;
        joint[xs] = x_row[xs] * net.probability(y, ys, states_of(net.parents(y)));
        marginal += joint[xs];
      }
      y_cpt.table[row_of(y_new) * cy + ys] = marginal;
      const std::size_t xr = row_of(x_new);
      for (std::size_t xs = 0; xs < cx; ++xs) {
        // Conditioning on a zero-mass event: any distribution preserves the joint.
        x_cpt.table[xr * cx + xs] = marginal > 0.0 ? joint[xs] / marginal : 1.0 / static_cast<double>(cx);
      }
    }
  }

  // Renormalize rows against rounding so the rebuilt net passes validation.
  auto tidy = [](Cpt& cpt, std::size_t card) {
    for (std::size_t r = 0; r * card < cpt.table.size(); ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < card; ++k) s += cpt.table[r * card + k];
      for (std::size_t k = 0; k < card; ++k) cpt.table[r * card + k] /= s;
    }
  };
  tidy(y_cpt, cy);
  tidy(x_cpt, cx);

  std::vector<Cpt> cpts = net.cpts();
  cpts[x] = std::move(x_cpt);
  cpts[y] = std::move(y_cpt);
  std::vector<Arc> arcs;
  for (std::size_t c = 0; c < net.size(); ++c)
    for (const std::string& p : cpts[c].parents) arcs.push_back({p, net.id(c)});
  return build_net(net.nodes(), std::move(arcs), std::move(cpts));
}

Matrix likelihood_slice(const BayesNet& net, std::string_view node, std::size_t state) {
  const std::size_t e = net.index_of(node);
  const auto ps = net.parents(e);
  if (ps.size() != 2) {
    throw Error(ErrorCode::WrongArity, "'" + std::string(node) + "' has " + std::to_string(ps.size()) +
                                           " parents, expected 2");
  }
  if (state >= net.cardinality(e)) {
    throw Error(ErrorCode::InvalidEvidence, "state out of range for '" + std::string(node) + "'");
  }
  const std::size_t n1 = net.cardinality(ps[0]), n2 = net.cardinality(ps[1]);
  Matrix m(n1, n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) m(i, j) = net.row(e, i * n2 + j)[state];
  return m;
}

bool is_rank_one(const Matrix& slice, double tolerance) {
  const double scale = slice.max_abs();
  if (scale == 0.0) return true;
  const double bound = tolerance * scale * scale;
  for (std::size_t i = 0; i < slice.rows(); ++i)
    for (std::size_t k = i + 1; k < slice.rows(); ++k)
      for (std::size_t j = 0; j < slice.cols(); ++j)
        for (std::size_t l = j + 1; l < slice.cols(); ++l) {
          const double minor = slice(i, j) * slice(k, l) - slice(i, l) * slice(k, j);
          if (std::abs(minor) > bound) return false;
        }
  return true;
}

std::vector<bool> separability_check(const BayesNet& net, std::string_view node, double tolerance) {
  const std::size_t e = net.index_of(node);
  std::vector<bool> out;
  for (std::size_t k = 0; k < net.cardinality(e); ++k)
    out.push_back(is_rank_one(likelihood_slice(net, node, k), tolerance));
  return out;
}

}  // namespace recognet

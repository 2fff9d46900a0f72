#include "recognet/vision.hpp"

#include <algorithm>
#include <set>

#include "recognet/error.hpp"

namespace recognet::vision {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 0.5), got " + std::to_string(epsilon));
  }
}

template <typename PresentRule>
Cpt two_parent_evidence(const std::string& child, const ParentRef& first, const ParentRef& second,
                        PresentRule rule) {
  if (first.cardinality < 2 || second.cardinality < 2) {
    throw Error(ErrorCode::InvalidSpec, "parents need at least two states");
  }
  Cpt cpt{child, {first.id, second.id}, {}};
  cpt.table.reserve(first.cardinality * second.cardinality * 2);
  for (std::size_t i = 0; i < first.cardinality; ++i)
    for (std::size_t j = 0; j < second.cardinality; ++j) {
      const double present = rule(i == 0, j == 0);
      cpt.table.push_back(present);
      cpt.table.push_back(1.0 - present);
    }
  return cpt;
}

}  // namespace

Cpt exclusion_evidence_cpt(const std::string& child, const ParentRef& first, const ParentRef& second,
                           double epsilon) {
  check_epsilon(epsilon);
  return two_parent_evidence(child, first, second,
                             [&](bool a, bool b) { return a != b ? 1.0 - epsilon : epsilon; });
}

Cpt coincidence_evidence_cpt(const std::string& child, const ParentRef& first, const ParentRef& second,
                             double epsilon) {
  check_epsilon(epsilon);
  return two_parent_evidence(child, first, second,
                             [&](bool a, bool b) { return a && b ? 1.0 - epsilon : epsilon; });
}

BayesNet compile_decomposition(const DecompositionSpec& spec) {
  std::map<std::string, const PartSpec*> parts;
  for (const PartSpec& p : spec.parts) {
    if (!parts.emplace(p.id, &p).second) throw Error(ErrorCode::DuplicateNode, "part '" + p.id + "' listed twice");
    if (!spec.levels.empty() && p.level >= spec.levels.size()) {
      throw Error(ErrorCode::LevelViolation, "part '" + p.id + "' sits below the last level");
    }
  }
  auto part = [&](const std::string& id) -> const PartSpec& {
    auto it = parts.find(id);
    if (it == parts.end()) throw Error(ErrorCode::UnknownNode, "no part named '" + id + "'");
    return *it->second;
  };
  auto require_below = [&](const std::string& parent, const std::string& child) {
    if (part(child).level <= part(parent).level) {
      throw Error(ErrorCode::LevelViolation, "'" + child + "' (level " + std::to_string(part(child).level) +
                                                 ") is not below '" + parent + "' (level " +
                                                 std::to_string(part(parent).level) + ")");
    }
  };

  std::map<std::string, const SharedChildSpec*> shared;
  for (const SharedChildSpec& s : spec.shared_children) {
    part(s.child);
    if (s.parents.size() < 2) {
      throw Error(ErrorCode::InvalidSpec, "shared child '" + s.child + "' needs at least two parents");
    }
    if (!shared.emplace(s.child, &s).second) {
      throw Error(ErrorCode::InvalidSpec, "shared child '" + s.child + "' listed twice");
    }
    for (const auto& p : s.parents) require_below(p, s.child);
  }

  std::map<std::string, std::string> tree_parent;
  for (const Arc& a : spec.arcs) {
    part(a.parent);
    part(a.child);
    require_below(a.parent, a.child);
    if (shared.count(a.child)) {
      throw Error(ErrorCode::InvalidSpec, "'" + a.child + "' is a shared child; list its parents there");
    }
    if (!tree_parent.emplace(a.child, a.parent).second) {
      throw Error(ErrorCode::InvalidSpec, "'" + a.child + "' has several parents; declare it as a shared child");
    }
  }

  std::vector<NodeDecl> nodes;
  std::vector<Arc> arcs;
  std::vector<Cpt> cpts;
  for (const PartSpec& p : spec.parts) {
    nodes.push_back({p.id, p.label.empty() ? p.id : p.label, p.cardinality, p.state_labels});
    std::vector<std::string> parents;
    if (auto it = shared.find(p.id); it != shared.end()) parents = it->second->parents;
    else if (auto jt = tree_parent.find(p.id); jt != tree_parent.end()) parents.push_back(jt->second);
    for (const auto& q : parents) arcs.push_back({q, p.id});

    if (!p.table.empty()) {
      cpts.push_back({p.id, parents, p.table});
      continue;
    }
    const auto sh = shared.find(p.id);
    const SharedRelation relation = sh == shared.end() ? SharedRelation::Explicit : sh->second->relation;
    if (relation != SharedRelation::Explicit) {
      if (parents.size() != 2 || p.cardinality != 2) {
        throw Error(ErrorCode::CptMismatch, "'" + p.id + "': exclusion and co-incidence need a binary child of two parents");
      }
      const ParentRef a{parents[0], part(parents[0]).cardinality};
      const ParentRef b{parents[1], part(parents[1]).cardinality};
      cpts.push_back(relation == SharedRelation::Exclusion ? exclusion_evidence_cpt(p.id, a, b, sh->second->epsilon)
                                                           : coincidence_evidence_cpt(p.id, a, b, sh->second->epsilon));
      continue;
    }
    if (p.cardinality != 2 || parents.size() > 1) {
      throw Error(ErrorCode::CptMismatch, "'" + p.id + "' needs an explicit table");
    }
    if (parents.empty()) {
      cpts.push_back({p.id, {}, {p.prior_present, 1.0 - p.prior_present}});
    } else {
      Cpt cpt{p.id, parents, {}};
      for (std::size_t s = 0; s < part(parents[0]).cardinality; ++s) {
        const double present = s == 0 ? p.detection : p.false_alarm;
        cpt.table.push_back(present);
        cpt.table.push_back(1.0 - present);
      }
      cpts.push_back(std::move(cpt));
    }
  }
  return build_net(std::move(nodes), std::move(arcs), std::move(cpts));
}

DecompositionSpec without_shared_children(const DecompositionSpec& spec) {
  std::set<std::string> dropped;
  for (const auto& s : spec.shared_children) dropped.insert(s.child);
  // Arcs only point down a level, so repeated sweeps reach every descendant.
  for (bool grew = true; grew;) {
    grew = false;
    for (const Arc& a : spec.arcs)
      if (dropped.count(a.parent) && dropped.insert(a.child).second) grew = true;
  }
  DecompositionSpec out;
  out.levels = spec.levels;
  for (const auto& p : spec.parts)
    if (!dropped.count(p.id)) out.parts.push_back(p);
  for (const auto& a : spec.arcs)
    if (!dropped.count(a.child)) out.arcs.push_back(a);
  return out;
}

void check_levels(const BayesNet& net, const std::map<std::string, std::size_t>& levels) {
  auto level_of = [&](const std::string& id) {
    auto it = levels.find(id);
    if (it == levels.end()) throw Error(ErrorCode::LevelViolation, "'" + id + "' has no level");
    return it->second;
  };
  for (const Arc& a : net.arcs()) {
    if (level_of(a.child) <= level_of(a.parent)) {
      throw Error(ErrorCode::LevelViolation, "arc " + a.parent + " -> " + a.child + " does not point down");
    }
  }
}

DecompositionSpec decomposition_from_document(const BnetDocument& doc) {
  const BayesNet& net = doc.net;
  check_levels(net, doc.levels);
  for (const auto& d : net.nodes()) {
    if (!doc.levels.count(d.id)) throw Error(ErrorCode::LevelViolation, "'" + d.id + "' has no level");
  }
  DecompositionSpec spec;
  std::size_t deepest = 0;
  for (const auto& [id, level] : doc.levels) deepest = std::max(deepest, level);
  spec.levels.clear();
  for (std::size_t l = 0; l <= deepest; ++l) {
    spec.levels.push_back(l < kStandardLevels.size() ? kStandardLevels[l] : "level-" + std::to_string(l));
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    const NodeDecl& d = net.node(i);
    PartSpec p;
    p.id = d.id;
    p.label = d.label;
    p.level = doc.levels.at(d.id);
    p.cardinality = d.cardinality;
    p.state_labels = d.state_labels;
    p.table = net.cpt(i).table;
    spec.parts.push_back(std::move(p));
    const auto& parents = net.cpt(i).parents;
    if (parents.size() == 1) spec.arcs.push_back({parents[0], d.id});
    else if (parents.size() > 1) spec.shared_children.push_back({d.id, parents, SharedRelation::Explicit, 0.05});
  }
  return spec;
}

DecompositionSpec generalized_cylinder_spec() {
  DecompositionSpec spec;
  auto add = [&](std::string id, std::size_t level) {
    PartSpec p;
    p.id = std::move(id);
    p.level = level;
    spec.parts.push_back(std::move(p));
  };
  add("cylinder", 0);
  add("face", 3);
  add("axis", 3);
  add("limb", 4);
  add("face_edge", 5);
  add("axis_edge", 5);
  add("limb_edge", 5);
  spec.parts[0].prior_present = 0.3;
  spec.arcs = {{"cylinder", "face"}, {"cylinder", "axis"}, {"face", "face_edge"},
               {"axis", "axis_edge"}, {"limb", "limb_edge"}};
  SharedChildSpec limb;
  limb.child = "limb";
  limb.parents = {"face", "axis"};
  limb.relation = SharedRelation::Coincidence;
  spec.shared_children.push_back(limb);
  return spec;
}

}  // namespace recognet::vision

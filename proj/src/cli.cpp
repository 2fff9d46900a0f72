#include "recognet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "recognet/error.hpp"
#include "recognet/pearl.hpp"
#include "recognet/vision.hpp"

namespace recognet::cli {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string join(std::span<const double> v, const char* sep, std::string (*fmt)(double)) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += fmt(v[i]);
  }
  return out;
}

bool leaf_evidence_only(const BayesNet& net, const Evidence& ev) {
  for (const auto& [id, s] : ev.assignments())
    if (!net.is_leaf(net.index_of(id))) return false;
  return true;
}

std::vector<std::size_t> roots_of(const BayesNet& net) {
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (net.is_root(i)) roots.push_back(i);
  return roots;
}

bool queries_within(const BayesNet& net, const std::vector<std::string>& queries,
                    const std::vector<std::size_t>& allowed) {
  for (const auto& q : queries) {
    const std::size_t i = net.index_of(q);
    if (std::find(allowed.begin(), allowed.end(), i) == allowed.end()) return false;
  }
  return true;
}

bool eigen_applicable(const BayesNet& net, const Evidence& ev) {
  std::size_t shared = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.parents(i).size() == 2) {
      ++shared;
      if (!ev.contains(net.id(i))) return false;
    }
  }
  return shared == 2;
}

[[noreturn]] void inapplicable(const BnetDocument& doc, Solver tried, const std::vector<std::string>& queries,
                               const std::string& why) {
  throw Error(ErrorCode::SolverInapplicable, std::string(to_string(tried)) + ": " + why + "; try --solver " +
                                                 std::string(to_string(select_solver(doc, queries))));
}

std::vector<std::string> resolve_queries(const BayesNet& net, const std::vector<std::string>& queries,
                                         const std::vector<std::size_t>& defaults) {
  if (!queries.empty()) {
    for (const auto& q : queries) net.index_of(q);
    return queries;
  }
  std::vector<std::string> out;
  for (std::size_t i : defaults) out.push_back(net.id(i));
  return out;
}

std::vector<std::size_t> all_nodes(const BayesNet& net) {
  std::vector<std::size_t> v(net.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

}  // namespace

std::optional<Solver> parse_solver(std::string_view name) {
  if (name == "auto") return Solver::Auto;
  if (name == "exact") return Solver::Exact;
  if (name == "pearl") return Solver::Pearl;
  if (name == "eigen") return Solver::Eigen;
  if (name == "lambda-only") return Solver::LambdaOnly;
  return std::nullopt;
}

std::string_view to_string(Solver s) noexcept {
  switch (s) {
    case Solver::Auto: return "auto";
    case Solver::Exact: return "exact";
    case Solver::Pearl: return "pearl";
    case Solver::Eigen: return "eigen";
    case Solver::LambdaOnly: return "lambda-only";
  }
  return "auto";
}

std::string_view to_string(ReferenceMatch m) noexcept {
  switch (m) {
    case ReferenceMatch::Exact: return "match";
    case ReferenceMatch::Permuted: return "permuted";
    case ReferenceMatch::Mismatch: return "mismatch";
  }
  return "mismatch";
}

ReferenceMatch match_reference(std::span<const double> computed, std::span<const double> reference,
                               double tolerance) {
  if (computed.size() != reference.size()) return ReferenceMatch::Mismatch;
  if (max_abs_difference(computed, reference) <= tolerance) return ReferenceMatch::Exact;
  Vector a(computed.begin(), computed.end()), b(reference.begin(), reference.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return max_abs_difference(a, b) <= tolerance ? ReferenceMatch::Permuted : ReferenceMatch::Mismatch;
}

const Vector* InferenceReport::belief(std::string_view node) const {
  for (const auto& [id, v] : beliefs)
    if (id == node) return &v;
  return nullptr;
}

Solver select_solver(const BnetDocument& doc, const std::vector<std::string>& queries) {
  const BayesNet& net = doc.net;
  const bool leaf_ev = leaf_evidence_only(net, doc.evidence);
  switch (classify_structure(net)) {
    case StructureClass::Tree:
      if (!leaf_ev) return Solver::Exact;
      return queries_within(net, queries, roots_of(net)) ? Solver::LambdaOnly : Solver::Pearl;
    case StructureClass::Polytree:
      return leaf_ev ? Solver::Pearl : Solver::Exact;
    case StructureClass::SharedLeafPair:
      return eigen_applicable(net, doc.evidence) && queries_within(net, queries, roots_of(net)) ? Solver::Eigen
                                                                                                 : Solver::Exact;
    case StructureClass::General:
      return Solver::Exact;
  }
  return Solver::Exact;
}

InferenceReport infer(const BnetDocument& doc, Solver solver, const std::vector<std::string>& queries,
                      const InferOptions& options) {
  const BayesNet& net = doc.net;
  const Evidence& ev = doc.evidence;
  if (solver == Solver::Auto) solver = select_solver(doc, queries);

  InferenceReport report;
  report.solver = std::string(to_string(solver));
  report.structure = std::string(to_string(classify_structure(net)));
  report.warnings = net.warnings();

  switch (solver) {
    case Solver::Auto:
    case Solver::Exact: {
      const auto post = all_posteriors(net, ev, options.size_cap);
      for (const auto& q : resolve_queries(net, queries, all_nodes(net))) report.beliefs.emplace_back(q, post[net.index_of(q)]);
      report.diagnostics.emplace_back("evidence_probability", shortest(evidence_probability(net, ev, options.size_cap)));
      break;
    }
    case Solver::Pearl: {
      MessageState state;
      try {
        state = propagate(net, ev);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPolytree && e.code() != ErrorCode::EvidenceOnInternalNode) throw;
        inapplicable(doc, solver, queries, e.detail());
      }
      for (const auto& q : resolve_queries(net, queries, all_nodes(net))) report.beliefs.emplace_back(q, state.beliefs.at(q));
      report.diagnostics.emplace_back("pi_messages", std::to_string(state.pi.size()));
      report.diagnostics.emplace_back("lambda_messages", std::to_string(state.lambda.size()));
      break;
    }
    case Solver::LambdaOnly: {
      const auto roots = roots_of(net);
      if (classify_structure(net) != StructureClass::Tree) inapplicable(doc, solver, queries, "net is not a tree");
      if (!queries_within(net, queries, roots)) inapplicable(doc, solver, queries, "only the root posterior is computed");
      Vector bel;
      try {
        bel = lambda_only_update(net, ev, net.id(roots[0]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EvidenceOnInternalNode) throw;
        inapplicable(doc, solver, queries, e.detail());
      }
      report.beliefs.emplace_back(net.id(roots[0]), std::move(bel));
      report.diagnostics.emplace_back("root", net.id(roots[0]));
      break;
    }
    case Solver::Eigen: {
      const auto roots = roots_of(net);
      SharedLeafSolution s;
      try {
        if (!queries_within(net, queries, roots)) {
          throw Error(ErrorCode::NotSharedLeafPair, "beliefs are computed for the two roots only");
        }
        s = solve_shared_leaf_pair(net, ev, {options.orientation, kPowerTolerance, kPowerMaxIterations});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotSharedLeafPair && e.code() != ErrorCode::UninstantiatedLeaf) throw;
        inapplicable(doc, solver, queries, e.detail());
      }
      for (const auto& q : resolve_queries(net, queries, roots)) {
        report.beliefs.emplace_back(q, q == s.first_root ? s.first_belief : s.second_belief);
      }
      auto& d = report.diagnostics;
      d.emplace_back("orientation", std::string(to_string(s.cycle.orientation)));
      d.emplace_back("cycle_eigenvalue", shortest(s.alpha.cycle_eigenvalue));
      d.emplace_back("recursion_alpha", shortest(s.alpha.recursion_alpha));
      d.emplace_back("transposed_cycle_eigenvalue", shortest(s.alpha.transposed_cycle_eigenvalue));
      if (s.alpha.first_leaf_slice_eigenvalue) {
        d.emplace_back("leaf_slice_eigenvalue." + s.cycle.first_leaf, shortest(*s.alpha.first_leaf_slice_eigenvalue));
      }
      if (s.alpha.second_leaf_slice_eigenvalue) {
        d.emplace_back("leaf_slice_eigenvalue." + s.cycle.second_leaf, shortest(*s.alpha.second_leaf_slice_eigenvalue));
      }
      d.emplace_back("alpha_note", s.alpha.note);
      d.emplace_back("second_root_source", "dominant eigenvector of the transposed cycle (" + s.second_root + ")");
      d.emplace_back("iterations", std::to_string(s.forward.iterations) + "," + std::to_string(s.transposed.iterations));
      d.emplace_back("residual", shortest(s.forward.residual) + "," + shortest(s.transposed.residual));
      d.emplace_back("fixed_point_residual", shortest(fixed_point_residual(s.cycle, s.first_belief)));
      if (s.method_gap) d.emplace_back("method_gap", shortest(*s.method_gap));
      if (s.two_cycle_beliefs) {
        d.emplace_back("two_cycle_belief." + s.first_root, join(s.two_cycle_beliefs->first, ",", shortest));
        d.emplace_back("two_cycle_belief." + s.second_root, join(s.two_cycle_beliefs->second, ",", shortest));
      }
      report.warnings.insert(report.warnings.end(), s.warnings.begin(), s.warnings.end());
      break;
    }
  }

  for (const auto& [node, expected] : options.references) {
    const Vector* got = report.belief(node);
    if (!got) throw Error(ErrorCode::Usage, "reference given for '" + node + "', which is not in the report");
    report.references.push_back({node, expected, match_reference(*got, expected, options.reference_tolerance)});
  }
  return report;
}

ComparisonReport compare(const BnetDocument& doc, const std::vector<Solver>& solvers,
                         const std::vector<std::string>& queries, const InferOptions& options) {
  if (solvers.size() < 2) throw Error(ErrorCode::Usage, "compare needs at least two solvers");
  ComparisonReport out;
  out.structure = std::string(to_string(classify_structure(doc.net)));
  InferOptions plain = options;
  plain.references.clear();
  for (Solver s : solvers) out.runs.push_back(infer(doc, s, queries, plain));

  // Nodes reported by every run, in the first run's order.
  std::vector<std::string> common;
  for (const auto& [node, v] : out.runs.front().beliefs) {
    bool everywhere = true;
    for (const auto& r : out.runs) everywhere = everywhere && r.belief(node);
    if (everywhere) common.push_back(node);
  }
  for (std::size_t a = 0; a < out.runs.size(); ++a)
    for (std::size_t b = a + 1; b < out.runs.size(); ++b)
      for (const auto& node : common) {
        out.divergences.push_back({node, out.runs[a].solver, out.runs[b].solver,
                                   l1_distance(*out.runs[a].belief(node), *out.runs[b].belief(node))});
      }
  return out;
}

namespace {

void render_records(const InferenceReport& r, const std::string& prefix, std::string& out) {
  out += prefix + "solver=" + r.solver + "\n";
  out += prefix + "structure=" + r.structure + "\n";
  for (const auto& [node, v] : r.beliefs) out += prefix + "belief." + node + "=" + join(v, ",", shortest) + "\n";
  for (const auto& [k, v] : r.diagnostics) out += prefix + "diag." + k + "=" + v + "\n";
  for (const auto& w : r.warnings) out += prefix + "warning=" + w + "\n";
  for (const auto& ref : r.references) {
    out += prefix + "reference." + ref.node + "=" + std::string(to_string(ref.match)) + ";expected=" +
           join(ref.expected, ",", shortest) + "\n";
  }
}

void render_text(const InferenceReport& r, std::string& out) {
  out += "solver: " + r.solver + "\n";
  out += "structure: " + r.structure + "\n";
  out += "beliefs:\n";
  for (const auto& [node, v] : r.beliefs) out += "  " + node + "  " + join(v, " ", fixed) + "\n";
  if (!r.diagnostics.empty()) {
    out += "diagnostics:\n";
    for (const auto& [k, v] : r.diagnostics) out += "  " + k + ": " + v + "\n";
  }
  if (!r.references.empty()) {
    out += "references:\n";
    for (const auto& ref : r.references) {
      out += "  " + ref.node + "  " + std::string(to_string(ref.match)) + " (expected " + join(ref.expected, " ", fixed) + ")";
      if (ref.match == ReferenceMatch::Permuted) out += "  component order differs from the reference";
      out += "\n";
    }
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
}

}  // namespace

std::string render(const InferenceReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Records) {
    out += "version=" + std::string(kVersion) + "\n";
    render_records(report, "", out);
  } else {
    out += "recognet " + std::string(kVersion) + "\n";
    render_text(report, out);
  }
  return out;
}

std::string render(const ComparisonReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Records) {
    out += "version=" + std::string(kVersion) + "\n";
    out += "structure=" + report.structure + "\n";
    for (const auto& r : report.runs) render_records(r, "run." + r.solver + ".", out);
    for (const auto& d : report.divergences) {
      out += "divergence." + d.node + "." + d.first_solver + "." + d.second_solver + "=" + shortest(d.l1) + "\n";
    }
    return out;
  }
  out += "recognet " + std::string(kVersion) + "\n";
  for (const auto& r : report.runs) {
    out += "== " + r.solver + "\n";
    render_text(r, out);
  }
  out += "divergence (L1):\n";
  for (const auto& d : report.divergences) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", d.l1);
    out += "  " + d.node + "  " + d.first_solver + " vs " + d.second_solver + "  " + buf + "\n";
  }
  return out;
}

namespace {

std::size_t size_cap_from_env() {
  const char* raw = std::getenv("RECOGNET_SIZE_CAP");
  if (!raw || !*raw) return kDefaultSizeCap;
  std::size_t cap = 0;
  const std::string_view s(raw);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
  if (ec != std::errc() || ptr != s.data() + s.size() || cap == 0) {
    throw Error(ErrorCode::Usage, "RECOGNET_SIZE_CAP must be a positive integer");
  }
  return cap;
}

Vector parse_vector(std::string_view text) {
  Vector v;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::Usage, "bad number '" + std::string(item) + "'");
    }
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return v;
}

Solver solver_or_throw(const std::string& name) {
  if (auto s = parse_solver(name)) return *s;
  throw Error(ErrorCode::Usage, "unknown solver '" + name + "' (auto, exact, pearl, eigen, lambda-only)");
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete Bayes net inference for recognition nets", "recognet"};
  app.require_subcommand(1);
  std::string file;
  std::string format_name = "text";
  std::string solver_name = "auto";
  std::string solvers_list;
  std::string orientation_name = "literal";
  std::vector<std::string> queries;
  std::vector<std::string> references;
  double reference_tol = 2e-3;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "text or records")->check(CLI::IsMember({"text", "records"}));
  };
  auto* validate = app.add_subcommand("validate", "check a BNET file and print its structure class");
  validate->add_option("file", file)->required();
  add_format(validate);
  auto* classify = app.add_subcommand("classify", "print the structure class");
  classify->add_option("file", file)->required();
  auto* infer_cmd = app.add_subcommand("infer", "compute posteriors for the file's evidence");
  infer_cmd->add_option("file", file)->required();
  infer_cmd->add_option("--solver", solver_name, "auto, exact, pearl, eigen, lambda-only");
  infer_cmd->add_option("--query", queries, "node to report (repeatable)");
  infer_cmd->add_option("--orientation", orientation_name, "eigen cycle orientation")
      ->check(CLI::IsMember({"literal", "explicit"}));
  infer_cmd->add_option("--reference", references, "node=p0,p1,... expected belief (repeatable)");
  infer_cmd->add_option("--reference-tol", reference_tol, "max-abs tolerance for --reference");
  add_format(infer_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "run several solvers and tabulate their divergence");
  compare_cmd->add_option("file", file)->required();
  compare_cmd->add_option("--solvers", solvers_list, "comma-separated solver names")->required();
  compare_cmd->add_option("--query", queries, "node to report (repeatable)");
  compare_cmd->add_option("--orientation", orientation_name, "eigen cycle orientation")
      ->check(CLI::IsMember({"literal", "explicit"}));
  add_format(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: Usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    const ReportFormat format = format_name == "records" ? ReportFormat::Records : ReportFormat::Text;
    InferOptions options;
    options.size_cap = size_cap_from_env();
    options.orientation = orientation_name == "explicit" ? CycleOrientation::Explicit : CycleOrientation::Literal;
    options.reference_tolerance = reference_tol;
    for (const auto& r : references) {
      const auto eq = r.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::Usage, "--reference expects node=p0,p1,...");
      options.references[r.substr(0, eq)] = parse_vector(std::string_view(r).substr(eq + 1));
    }

    const BnetDocument doc = load_bnet(file);
    if (validate->parsed()) {
      if (!doc.levels.empty()) vision::check_levels(doc.net, doc.levels);
      const std::string structure(to_string(classify_structure(doc.net)));
      if (format == ReportFormat::Records) {
        out << "version=" << kVersion << "\nstatus=valid\nstructure=" << structure << "\n";
        for (const auto& w : doc.net.warnings()) out << "warning=" << w << "\n";
      } else {
        out << "valid: " << structure << "\n";
        for (const auto& w : doc.net.warnings()) out << "warning: " << w << "\n";
      }
    } else if (classify->parsed()) {
      out << to_string(classify_structure(doc.net)) << "\n";
    } else if (infer_cmd->parsed()) {
      out << render(infer(doc, solver_or_throw(solver_name), queries, options), format);
    } else {
      std::vector<Solver> solvers;
      std::string_view rest = solvers_list;
      while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        solvers.push_back(solver_or_throw(std::string(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      out << render(compare(doc, solvers, queries, options), format);
    }
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return e.code() == ErrorCode::Usage ? 2 : 1;
  }
  return 0;
}

}  // namespace recognet::cli

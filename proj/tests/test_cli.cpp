#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "recognet/cli.hpp"
#include "recognet/error.hpp"
#include "support/fixtures.hpp"
#include "support/random_nets.hpp"

using namespace recognet;
using namespace recognet::cli;
using namespace recognet::testing;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "recognet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const Divergence* find_divergence(const ComparisonReport& r, const std::string& node) {
  for (const auto& d : r.divergences)
    if (d.node == node) return &d;
  return nullptr;
}

}  // namespace

TEST_CASE("validate") {
  const Outcome ok = run_cli({"validate", data_path("shared-leaf-example.bnet")});
  CHECK(ok.status == 0);
  CHECK(ok.out.find("valid: SharedLeafPair") != std::string::npos);

  const std::string tests_data = std::string(RECOGNET_DATA_DIR) + "/../tests/data/";
  const Outcome bad = run_cli({"validate", tests_data + "bad-row.bnet"});
  CHECK(bad.status != 0);
  CHECK(line_count(bad.err) == 1);
  CHECK(bad.err.rfind("error: ", 0) == 0);
  CHECK(bad.err.find("line") != std::string::npos);

  const Outcome cyc = run_cli({"validate", tests_data + "cycle.bnet"});
  CHECK(cyc.status != 0);
  CHECK(cyc.err.find("error: CycleDetected") == 0);
  CHECK(cyc.err.find(" -> ") != std::string::npos);

  const Outcome missing = run_cli({"validate", "/no/such/file.bnet"});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("error: Io") == 0);
}

TEST_CASE("classify") {
  CHECK(run_cli({"classify", data_path("chain.bnet")}).out == "Tree\n");
  CHECK(run_cli({"classify", data_path("polytree.bnet")}).out == "Polytree\n");
  CHECK(run_cli({"classify", data_path("cylinder.bnet")}).out == "General\n");
}

TEST_CASE("infer on the shared-leaf example") {
  const BnetDocument doc = load_bnet(data_path("shared-leaf-example.bnet"));
  const InferenceReport eigen = infer(doc, Solver::Eigen, {});
  REQUIRE(eigen.belief("h1") != nullptr);
  CHECK(std::abs((*eigen.belief("h1"))[0] - 0.811) < 2e-3);
  CHECK(std::abs((*eigen.belief("h1"))[1] - 0.190) < 2e-3);
  const InferenceReport exact = infer(doc, Solver::Exact, {"h1"});
  REQUIRE(exact.beliefs.size() == 1);
  CHECK(std::abs(exact.beliefs[0].second[0] - 0.8468) < 1e-4);
  CHECK(std::abs(exact.beliefs[0].second[1] - 0.1532) < 1e-4);

  bool has_eigenvalue = false;
  for (const auto& [k, v] : eigen.diagnostics) has_eigenvalue |= k == "cycle_eigenvalue";
  CHECK(has_eigenvalue);
  for (const auto& [k, v] : exact.diagnostics) CHECK(k.find("eigenvalue") == std::string::npos);
}

TEST_CASE("every report is normalized") {
  for (const char* name : {"shared-leaf-example.bnet", "chain.bnet", "separable-pair.bnet", "polytree.bnet", "cylinder.bnet"}) {
    CAPTURE(name);
    const BnetDocument doc = load_bnet(data_path(name));
    const InferenceReport r = infer(doc, Solver::Auto, {});
    for (const auto& [node, bel] : r.beliefs) {
      double s = 0;
      for (double x : bel) s += x;
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("auto selection") {
  CHECK(select_solver(load_bnet(data_path("chain.bnet")), {}) == Solver::LambdaOnly);
  CHECK(select_solver(load_bnet(data_path("polytree.bnet")), {}) == Solver::Pearl);
  CHECK(select_solver(load_bnet(data_path("shared-leaf-example.bnet")), {}) == Solver::Eigen);
  CHECK(select_solver(load_bnet(data_path("cylinder.bnet")), {}) == Solver::Exact);
  CHECK(select_solver(load_bnet(data_path("chain.bnet")), {"E"}) == Solver::Pearl);
  CHECK(select_solver(load_bnet(data_path("shared-leaf-example.bnet")), {"E1"}) == Solver::Exact);
}

TEST_CASE("lambda-only and pearl agree on tree roots") {
  const BnetDocument chain = load_bnet(data_path("chain.bnet"));
  const Vector a = *infer(chain, Solver::LambdaOnly, {}).belief("h");
  const Vector b = *infer(chain, Solver::Pearl, {"h"}).belief("h");
  CHECK(std::abs(a[0] - b[0]) <= 1e-12);
  CHECK(std::abs(a[0] - 0.45 / 0.55) <= 1e-12);

  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    BnetDocument doc{random_tree(rng, 2 + trial % 8), {}, {}};
    doc.evidence = random_leaf_evidence(rng, doc.net);
    const Vector x = infer(doc, Solver::LambdaOnly, {}).beliefs.at(0).second;
    const Vector y = infer(doc, Solver::Pearl, {doc.net.id(0)}).beliefs.at(0).second;
    for (std::size_t s = 0; s < x.size(); ++s) CHECK(std::abs(x[s] - y[s]) <= 1e-12);
  }
}

TEST_CASE("inapplicable solvers name an alternative") {
  const BnetDocument chain = load_bnet(data_path("chain.bnet"));
  try {
    infer(chain, Solver::Eigen, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverInapplicable);
    CHECK(e.detail().find("--solver") != std::string::npos);
  }
  const Outcome o = run_cli({"infer", data_path("shared-leaf-example.bnet"), "--solver", "pearl"});
  CHECK(o.status == 1);
  CHECK(o.err.find("error: SolverInapplicable") == 0);
  CHECK(line_count(o.err) == 1);
  CHECK(run_cli({"infer", data_path("polytree.bnet"), "--solver", "lambda-only"}).status == 1);
}

TEST_CASE("compare reports divergence instead of hiding it") {
  const BnetDocument example = load_bnet(data_path("shared-leaf-example.bnet"));
  const ComparisonReport r = compare(example, {Solver::Eigen, Solver::Exact}, {});
  const Divergence* d = find_divergence(r, "h1");
  REQUIRE(d != nullptr);
  CHECK(std::abs(d->l1 - 0.072) < 1e-3);
  CHECK(d->l1 > 0.0);

  const ComparisonReport poly = compare(load_bnet(data_path("polytree.bnet")), {Solver::Pearl, Solver::Exact}, {});
  CHECK(poly.divergences.size() == poly.runs[0].beliefs.size());
  for (const auto& x : poly.divergences) CHECK(x.l1 <= 1e-9);

  try {
    compare(example, {Solver::Exact}, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }
  const Outcome text = run_cli({"compare", data_path("shared-leaf-example.bnet"), "--solvers", "eigen,exact"});
  CHECK(text.status == 0);
  CHECK(text.out.find("h1") != std::string::npos);
}

TEST_CASE("records output is byte-stable") {
  const std::vector<std::string> args = {"compare", data_path("shared-leaf-example.bnet"), "--solvers", "eigen,exact",
                                         "--format", "records"};
  const Outcome a = run_cli(args), b = run_cli(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("version=", 0) == 0);
  CHECK(a.out.find("divergence.h1.eigen.exact=") != std::string::npos);
}

TEST_CASE("reference check flags a permuted vector") {
  const Outcome o = run_cli({"infer", data_path("shared-leaf-example.bnet"), "--solver", "eigen", "--format", "records",
                             "--reference", "h2=0.345,0.655", "--reference", "h1=0.811,0.190"});
  CHECK(o.status == 0);
  CHECK(o.out.find("reference.h2=permuted") != std::string::npos);
  CHECK(o.out.find("reference.h1=match") != std::string::npos);
  CHECK(match_reference(Vector{0.6, 0.4}, Vector{0.1, 0.9}, 1e-3) == ReferenceMatch::Mismatch);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_cli({}).status == 2);
  CHECK(run_cli({"infer", data_path("chain.bnet"), "--solver", "magic"}).status == 2);
  const Outcome o = run_cli({"compare", data_path("chain.bnet"), "--solvers", "exact"});
  CHECK(o.status == 2);
  CHECK(o.err.find("error: Usage") == 0);
}

TEST_CASE("size cap from the environment") {
  ::setenv("RECOGNET_SIZE_CAP", "8", 1);
  const Outcome o = run_cli({"infer", data_path("shared-leaf-example.bnet"), "--solver", "exact"});
  ::unsetenv("RECOGNET_SIZE_CAP");
  CHECK(o.status == 1);
  CHECK(o.err.find("error: TooLarge") == 0);
  CHECK(run_cli({"infer", data_path("shared-leaf-example.bnet"), "--solver", "exact"}).status == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "recognet/error.hpp"
#include "recognet/oracle.hpp"
#include "recognet/pearl.hpp"
#include "support/fixtures.hpp"
#include "support/random_nets.hpp"

using namespace recognet;
using namespace recognet::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Usage;
}

void check_close(const Vector& got, const Vector& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

double sum(const Vector& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("root pi message") {
  check_close(root_pi_message(Vector{0.5, 0.5}, {}, "E"), {0.5, 0.5}, 1e-15);
  check_close(root_pi_message(Vector{0.5, 0.5}, {{"E2", {0.7, 0.3}}, {"E1", {0.1, 0.9}}}, "E1"), {0.7, 0.3}, 1e-15);
  check_close(root_pi_message(Vector{0.8, 0.2}, {{"E2", {0.5, 0.5}}}, "E1"), {0.8, 0.2}, 1e-15);
  CHECK(code_of([] { root_pi_message(Vector{0.5, 0.5}, {{"E2", {1.0}}}, "E1"); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("leaf lambda message on the example slice") {
  const auto doc = shared_leaf_example();
  // Receiving h1: rows of the slice weighted by pi(h2).
  check_close(leaf_lambda_message(doc.net, "E1", 0, Vector{0.5, 0.5}, "h1"), {0.7, 0.3}, 1e-12);
  // Receiving h2: the slice is read transposed.
  check_close(leaf_lambda_message(doc.net, "E1", 0, Vector{0.5, 0.5}, "h2"), {0.6, 0.4}, 1e-12);
  check_close(leaf_lambda_message(doc.net, "E1", 0, Vector{1.0, 0.0}, "h1"), {0.52 / 0.60, 0.08 / 0.60}, 1e-12);
}

TEST_CASE("leaf lambda message errors") {
  const auto doc = shared_leaf_example();
  CHECK(code_of([&] { leaf_lambda_message(doc.net, "E1", std::nullopt, Vector{0.5, 0.5}, "h1"); }) ==
        ErrorCode::NotInstantiated);
  CHECK(code_of([] { leaf_lambda_message(chain_net(), "E", 0, Vector{0.5, 0.5}, "h"); }) == ErrorCode::WrongArity);
  CHECK(code_of([&] { leaf_lambda_message(doc.net, "E1", 0, Vector{0.5, 0.5}, "E2"); }) == ErrorCode::UnknownNode);
}

TEST_CASE("separable leaves send pi-independent lambdas") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const SeparablePair pair = random_separable_pair(rng, 2 + trial % 3);
    const std::size_t card = pair.a1.size();
    const Vector p = random_distribution(rng, card), q = random_distribution(rng, card);
    for (const char* leaf : {"E1", "E2"})
      for (const char* target : {"h1", "h2"}) {
        const Vector x = leaf_lambda_message(pair.doc.net, leaf, 0, p, target);
        const Vector y = leaf_lambda_message(pair.doc.net, leaf, 0, q, target);
        check_close(x, y, 1e-12);
      }
    check_close(leaf_lambda_message(pair.doc.net, "E1", 0, p, "h1"), normalized(pair.a1), 1e-12);
  }
}

TEST_CASE("uniform slice gives a uniform lambda") {
  const BayesNet net = build_net({{"p", "", 2, {}}, {"q", "", 3, {}}, {"E", "", 2, {}}}, {{"p", "E"}, {"q", "E"}},
                                 {{"p", {}, {0.5, 0.5}},
                                  {"q", {}, {0.2, 0.3, 0.5}},
                                  {"E", {"p", "q"}, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7}}});
  check_close(leaf_lambda_message(net, "E", 0, Vector{0.1, 0.6, 0.3}, "p"), {0.5, 0.5}, 1e-15);
}

TEST_CASE("chain posterior by propagation and by lambda-only") {
  const BayesNet net = chain_net();
  const MessageState state = propagate(net, Evidence{{"E", 0}});
  check_close(state.beliefs.at("h"), {0.45 / 0.55, 0.10 / 0.55}, 1e-12);
  CHECK(std::abs(state.beliefs.at("h")[0] - 0.8182) < 1e-4);
  check_close(lambda_only_update(net, Evidence{{"E", 0}}, "h"), {0.45 / 0.55, 0.10 / 0.55}, 1e-12);
  check_close(lambda_only_update(net, {}, "h"), {0.5, 0.5}, 1e-15);
}

TEST_CASE("without evidence beliefs are the pre-posteriors") {
  const BnetDocument doc = load_bnet(data_path("polytree.bnet"));
  const MessageState state = propagate(doc.net, {});
  for (const auto& node : doc.net.nodes()) check_close(state.beliefs.at(node.id), pre_posterior(doc.net, node.id), 1e-12);
}

TEST_CASE("propagation error paths") {
  CHECK(code_of([] { propagate(shared_leaf_example().net, {}); }) == ErrorCode::NotPolytree);
  const BnetDocument doc = load_bnet(data_path("polytree.bnet"));
  CHECK(code_of([&] { propagate(doc.net, Evidence{{"f", 0}}); }) == ErrorCode::EvidenceOnInternalNode);
  CHECK(code_of([&] { lambda_only_update(doc.net, {}, "a"); }) == ErrorCode::NotTree);

  const BayesNet tree = build_net({{"r", "", 2, {}}, {"m", "", 2, {}}, {"l", "", 2, {}}}, {{"r", "m"}, {"m", "l"}},
                                  {{"r", {}, {0.5, 0.5}}, {"m", {"r"}, {0.6, 0.4, 0.3, 0.7}}, {"l", {"m"}, {0.9, 0.1, 0.2, 0.8}}});
  CHECK(code_of([&] { lambda_only_update(tree, {}, "m"); }) == ErrorCode::NotTree);
  CHECK(code_of([&] { lambda_only_update(tree, Evidence{{"m", 0}}, "r"); }) == ErrorCode::EvidenceOnInternalNode);

  const BayesNet certain = build_net({{"h", "", 2, {}}, {"E", "", 2, {}}}, {{"h", "E"}},
                                     {{"h", {}, {1.0, 0.0}}, {"E", {"h"}, {1.0, 0.0, 0.5, 0.5}}});
  CHECK(code_of([&] { propagate(certain, Evidence{{"E", 1}}); }) == ErrorCode::InconsistentEvidence);
}

TEST_CASE("propagation matches the oracle on random polytrees") {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const BayesNet net = random_polytree(rng, 1 + trial % 10);
    const Evidence ev = random_leaf_evidence(rng, net);
    const MessageState state = propagate(net, ev);
    const auto exact = all_posteriors(net, ev);
    for (std::size_t k = 0; k < net.size(); ++k) {
      const Vector& got = state.beliefs.at(net.id(k));
      CHECK(std::abs(sum(got) - 1.0) <= 1e-9);
      for (std::size_t s = 0; s < got.size(); ++s) worst = std::max(worst, std::abs(got[s] - exact[k][s]));
    }
    for (const auto& [edge, msg] : state.pi) {
      CHECK(std::abs(sum(msg) - 1.0) <= 1e-9);
      for (double x : msg) CHECK(x > 0.0);
    }
    for (const auto& [edge, msg] : state.lambda) CHECK(std::abs(sum(msg) - 1.0) <= 1e-9);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("lambda-only root belief equals full propagation on random trees") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const BayesNet net = random_tree(rng, 1 + trial % 10);
    const Evidence ev = random_leaf_evidence(rng, net);
    const Vector fast = lambda_only_update(net, ev, net.id(0));
    check_close(fast, propagate(net, ev).beliefs.at(net.id(0)), 1e-12);
  }
}

TEST_CASE("propagation is deterministic") {
  Rng rng(3);
  const BayesNet net = random_polytree(rng, 9);
  const Evidence ev = random_leaf_evidence(rng, net);
  const MessageState a = propagate(net, ev), b = propagate(net, ev);
  CHECK(a.beliefs == b.beliefs);
  CHECK(a.pi == b.pi);
  CHECK(a.lambda == b.lambda);
}

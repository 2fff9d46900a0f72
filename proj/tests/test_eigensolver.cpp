#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "recognet/eigensolver.hpp"
#include "recognet/error.hpp"
#include "recognet/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_nets.hpp"

#if RECOGNET_HAVE_EIGEN3
#include <Eigen/Dense>
#endif

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

void check_close(std::span<const double> got, std::span<const double> want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

Matrix random_positive(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("cycle matrix of the example") {
  const auto doc = shared_leaf_example();
  const CycleMatrix c = build_cycle_matrix(doc.net, doc.evidence);
  CHECK(c.first_root == "h1");
  CHECK(c.second_root == "h2");
  const Matrix expected{{0.0712, 0.0333}, {0.0148, 0.0157}};
  check_close(c.a.data(), expected.data(), 1e-12);
  const Matrix p{{0.52, 0.18}, {0.08, 0.22}};
  check_close(c.a_t.data(), (0.25 * (p.transposed() * p.transposed())).data(), 1e-12);
  for (double x : c.a.data()) CHECK(x >= 0.0);
}

TEST_CASE("explicit orientation transposes the factor feeding the second root") {
  const auto doc = shared_leaf_example();
  const CycleMatrix c = build_cycle_matrix(doc.net, doc.evidence, CycleOrientation::Explicit);
  const Matrix p{{0.52, 0.18}, {0.08, 0.22}};
  check_close(c.a.data(), (0.25 * (p * p.transposed())).data(), 1e-12);
  check_close(c.a_t.data(), (0.25 * (p.transposed() * p)).data(), 1e-12);
}

TEST_CASE("degenerate prior collapses the cycle") {
  auto doc = shared_leaf_example();
  std::vector<Cpt> cpts = doc.net.cpts();
  cpts[0].table = {1.0, 0.0};
  const BayesNet net = build_net(doc.net.nodes(), doc.net.arcs(), cpts);
  const SharedLeafSolution s = solve_shared_leaf_pair(net, doc.evidence);
  check_close(s.first_belief, Vector{1.0, 0.0}, 1e-15);
  CHECK(s.forward.nonnegative_mode);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("dominant eigenpair basics") {
  const Eigenpair d = dominant_eigenpair(Matrix{{2.0, 0.0}, {0.0, 1.0}});
  CHECK(d.value == doctest::Approx(2.0).epsilon(1e-10));
  check_close(d.vector, Vector{1.0, 0.0}, 1e-10);
  CHECK(code_of([] { dominant_eigenpair(Matrix{{1.0, 0.0}, {0.0, 1.0}}); }) == ErrorCode::DegenerateSpectrum);
  CHECK(code_of([] { dominant_eigenpair(Matrix{{0.5, 0.8}, {0.1, 0.5}}, 1e-12, 1); }) ==
        ErrorCode::NonConvergence);
  CHECK(code_of([] { dominant_eigenpair(Matrix{{1.0, -0.1}, {0.2, 1.0}}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { dominant_eigenpair(Matrix(2, 3, 0.1)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("eigenpair of the example cycle") {
  const auto doc = shared_leaf_example();
  const CycleMatrix c = build_cycle_matrix(doc.net, doc.evidence);
  const Eigenpair d = dominant_eigenpair(c.a);
  // trace 0.0869, determinant 0.000625
  const double root = (0.0869 + std::sqrt(0.0869 * 0.0869 - 4 * 0.000625)) / 2;
  CHECK(std::abs(d.value - root) < 1e-10);
  CHECK(std::abs(d.value - 0.07899) < 1e-4);
  CHECK(std::abs(d.vector[0] - 0.811) < 2e-3);
  CHECK(std::abs(d.vector[1] - 0.190) < 2e-3);
  CHECK(d.residual < 1e-12);
}

TEST_CASE("solve_shared_leaf_pair on the example") {
  const auto doc = shared_leaf_example();
  const SharedLeafSolution s = solve_shared_leaf_pair(doc.net, doc.evidence);
  CHECK(std::abs(s.first_belief[0] - 0.811) < 2e-3);
  CHECK(std::abs(s.first_belief[1] - 0.190) < 2e-3);
  Vector second = s.second_belief;
  std::sort(second.begin(), second.end());
  CHECK(std::abs(second[0] - 0.345) < 2e-3);
  CHECK(std::abs(second[1] - 0.655) < 2e-3);
  // The transposed cycle puts the larger component first.
  CHECK(s.second_belief[0] > s.second_belief[1]);

  REQUIRE(s.alpha.first_leaf_slice_eigenvalue.has_value());
  CHECK(std::abs(*s.alpha.first_leaf_slice_eigenvalue - 0.562) < 1e-3);
  CHECK(std::abs(s.alpha.cycle_eigenvalue - 0.0790) < 1e-4);
  CHECK(s.alpha.recursion_alpha == doctest::Approx(1.0 / s.alpha.cycle_eigenvalue));
  CHECK_FALSE(s.alpha.note.empty());
  REQUIRE(s.method_gap.has_value());
  CHECK(*s.method_gap <= 1e-10);
  CHECK(s.warnings.empty());
}

TEST_CASE("fixed point residual") {
  const auto doc = shared_leaf_example();
  const SharedLeafSolution s = solve_shared_leaf_pair(doc.net, doc.evidence);
  CHECK(fixed_point_residual(s.cycle, s.first_belief) <= 1e-10);
  CHECK(std::abs(fixed_point_residual(s.cycle, Vector{1.0, 0.0}) - 2 * 0.0148 / 0.0860) < 1e-3);
  const Vector exact = posterior(doc.net, doc.evidence, "h1");
  CHECK(fixed_point_residual(s.cycle, exact) > 1e-3);
  CHECK(code_of([&] { fixed_point_residual(s.cycle, Vector{1.0, 0.0, 0.0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("literal message recursion converges to the eigenvectors") {
  const auto doc = shared_leaf_example();
  for (CycleOrientation o : {CycleOrientation::Literal, CycleOrientation::Explicit}) {
    CAPTURE(to_string(o));
    const SharedLeafSolution s = solve_shared_leaf_pair(doc.net, doc.evidence, {o});
    const CycleIteration it = iterate_message_cycle(s.cycle);
    check_close(it.first_pi, s.first_belief, 1e-8);
    check_close(it.second_pi, s.second_belief, 1e-8);
  }
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const SeparablePair pair = random_separable_pair(rng, 2 + trial % 3);
    const SharedLeafSolution s = solve_shared_leaf_pair(pair.doc.net, pair.doc.evidence);
    const CycleIteration it = iterate_message_cycle(s.cycle);
    check_close(it.first_pi, s.first_belief, 1e-8);
  }
}

TEST_CASE("power iteration agrees with the closed form on 2x2 matrices") {
  Rng rng(43);
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix m = random_positive(rng, 2);
    Eigenpair closed;
    try {
      closed = dominant_eigenpair_2x2(m);
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::DegenerateSpectrum);
      continue;
    }
    const Eigenpair power = dominant_eigenpair(m);
    CHECK(l1_distance(closed.vector, power.vector) <= 1e-10);
    CHECK(std::abs(closed.value - power.value) <= 1e-10);
    ++compared;
  }
  CHECK(compared > 450);
}

TEST_CASE("Perron property on positive matrices") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const Matrix m = random_positive(rng, n);
    const Eigenpair d = dominant_eigenpair(m);
    for (double x : d.vector) CHECK(x > 0.0);
    CHECK(d.residual <= 1e-9);
    CHECK_FALSE(d.nonnegative_mode);
    // Scaling the matrix leaves the normalized vector alone.
    check_close(dominant_eigenpair(3.7 * m).vector, d.vector, 1e-10);
#if RECOGNET_HAVE_EIGEN3
    Eigen::MatrixXd e(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = m(i, j);
    const Eigen::VectorXcd values = e.eigenvalues();
    double radius = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) radius = std::max(radius, std::abs(values[k]));
    CHECK(std::abs(d.value - radius) <= 1e-9 * radius);
#endif
  }
}

TEST_CASE("scaling both priors leaves the beliefs unchanged") {
  auto doc = shared_leaf_example();
  const CycleMatrix base = build_cycle_matrix(doc.net, doc.evidence);
  const Matrix h1 = Matrix::diagonal(base.first_prior), h2 = Matrix::diagonal(base.second_prior);
  const Matrix& p1 = base.first_likelihood;
  const Matrix& p2 = base.second_likelihood;
  const Matrix scaled = (2.5 * h1) * p2 * (2.5 * h2) * p1;
  check_close(dominant_eigenpair(scaled).vector, dominant_eigenpair(base.a).vector, 1e-12);
}

TEST_CASE("separable leaves: the eigenvector keeps one leaf's factor, two-cycle beliefs are exact") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const SeparablePair pair = random_separable_pair(rng, 2 + trial % 3);
    const SharedLeafSolution s = solve_shared_leaf_pair(pair.doc.net, pair.doc.evidence);
    // a = H1 a2 (b2' H2 b1) a1' has rank one, so its eigenvector is h1 * a2.
    const auto row = pair.doc.net.row(0, 0);
    const Vector prior1(row.begin(), row.end());
    check_close(s.first_belief, normalized(hadamard(prior1, pair.a2)), 1e-9);
    REQUIRE(s.two_cycle_beliefs.has_value());
    check_close(s.two_cycle_beliefs->first, posterior(pair.doc.net, pair.doc.evidence, "h1"), 1e-9);
    check_close(s.two_cycle_beliefs->second, posterior(pair.doc.net, pair.doc.evidence, "h2"), 1e-9);
  }
}

TEST_CASE("evidence on single-parent leaves folds into the effective prior") {
  auto base = shared_leaf_example();
  std::vector<NodeDecl> nodes = base.net.nodes();
  nodes.push_back({"F", "", 2, {}});
  std::vector<Arc> arcs = base.net.arcs();
  arcs.push_back({"h1", "F"});
  std::vector<Cpt> cpts = base.net.cpts();
  cpts.push_back({"F", {"h1"}, {0.7, 0.3, 0.2, 0.8}});
  const BayesNet net = build_net(nodes, arcs, cpts);
  Evidence ev = base.evidence;
  ev.observe("F", 0);
  CHECK(classify_structure(net) == StructureClass::SharedLeafPair);
  const CycleMatrix c = build_cycle_matrix(net, ev);
  check_close(c.first_prior, Vector{0.7 / 0.9, 0.2 / 0.9}, 1e-12);
  check_close(c.second_prior, Vector{0.5, 0.5}, 1e-15);
}

TEST_CASE("cycle matrix error paths") {
  CHECK(code_of([] { build_cycle_matrix(chain_net(), Evidence{{"E", 0}}); }) == ErrorCode::NotSharedLeafPair);
  CHECK(code_of([] { build_cycle_matrix(shared_leaf_example().net, Evidence{{"E1", 0}}); }) ==
        ErrorCode::UninstantiatedLeaf);
  const BayesNet one_leaf = build_net({{"h1", "", 2, {}}, {"h2", "", 2, {}}, {"E1", "", 2, {}}},
                                      {{"h1", "E1"}, {"h2", "E1"}},
                                      {{"h1", {}, {0.5, 0.5}}, {"h2", {}, {0.5, 0.5}}, slice_leaf_cpt("E1")});
  CHECK(code_of([&] { build_cycle_matrix(one_leaf, Evidence{{"E1", 0}}); }) == ErrorCode::NotSharedLeafPair);
}

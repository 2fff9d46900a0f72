#include "recognet/eigensolver.hpp"

#include <algorithm>
#include <cmath>

#include "recognet/error.hpp"

namespace recognet {

std::string_view to_string(CycleOrientation o) noexcept {
  return o == CycleOrientation::Literal ? "literal" : "explicit";
}

namespace {

// One leg of a message cycle: lambda = slice * pi, then pi' = prior (.) lambda.
struct Leg {
  const Matrix* slice;
  const Vector* prior;
};

Vector advance_leg(const Leg& leg, const Vector& pi) {
  Vector lambda = *leg.slice * pi;
  normalize_in_place(lambda);
  Vector next = hadamard(*leg.prior, lambda);
  normalize_in_place(next);
  return next;
}

struct OrientedSlices {
  Matrix forward_first;   // feeds the second root from the first root's pi
  Matrix forward_second;  // feeds the first root from the second root's pi
  Matrix back_second;     // transposed cycle: feeds the first root
  Matrix back_first;      // transposed cycle: feeds the second root
};

OrientedSlices orient(const CycleMatrix& c) {
  const Matrix& p1 = c.first_likelihood;
  const Matrix& p2 = c.second_likelihood;
  if (c.orientation == CycleOrientation::Literal) {
    if (p1.rows() != p1.cols() || p2.rows() != p2.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "literal orientation needs roots with equal cardinality; use explicit orientation");
    }
    return {p1, p2, p2.transposed(), p1.transposed()};
  }
  return {p1.transposed(), p2, p2, p1.transposed()};
}

Vector effective_prior(const BayesNet& net, const Evidence& evidence, std::size_t root,
                       std::span<const std::size_t> shared) {
  Vector prior(net.row(root, 0).begin(), net.row(root, 0).end());
  if (auto s = evidence.state_of(net.id(root))) {
    for (std::size_t k = 0; k < prior.size(); ++k)
      if (k != *s) prior[k] = 0.0;
  }
  for (std::size_t child : net.children(root)) {
    if (std::find(shared.begin(), shared.end(), child) != shared.end()) continue;
    auto s = evidence.state_of(net.id(child));
    if (!s) continue;
    if (net.parents(child).size() != 1) {
      throw Error(ErrorCode::NotSharedLeafPair, "'" + net.id(child) + "' is a third shared leaf");
    }
    for (std::size_t k = 0; k < prior.size(); ++k) prior[k] *= net.row(child, k)[*s];
  }
  normalize_in_place(prior);
  return prior;
}

std::optional<double> slice_eigenvalue(const Matrix& slice) {
  if (!slice.square()) return std::nullopt;
  try {
    return dominant_eigenpair(slice).value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

CycleMatrix build_cycle_matrix(const BayesNet& net, const Evidence& evidence, CycleOrientation orientation) {
  if (classify_structure(net) != StructureClass::SharedLeafPair) {
    throw Error(ErrorCode::NotSharedLeafPair, "net is classified " + std::string(to_string(classify_structure(net))));
  }
  validate_evidence(net, evidence);
  std::vector<std::size_t> roots, shared;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.is_root(i)) roots.push_back(i);
    else if (net.parents(i).size() == 2) shared.push_back(i);
  }
  if (shared.size() != 2) {
    throw Error(ErrorCode::NotSharedLeafPair,
                "need exactly two leaves shared by both roots, found " + std::to_string(shared.size()));
  }

  CycleMatrix c;
  c.orientation = orientation;
  c.first_root = net.id(roots[0]);
  c.second_root = net.id(roots[1]);
  c.first_leaf = net.id(shared[0]);
  c.second_leaf = net.id(shared[1]);

  auto slice_for = [&](std::size_t leaf) {
    auto k = evidence.state_of(net.id(leaf));
    if (!k) throw Error(ErrorCode::UninstantiatedLeaf, "shared leaf '" + net.id(leaf) + "' is not observed");
    Matrix m = likelihood_slice(net, net.id(leaf), *k);
    // Rows always index the first root.
    return net.parents(leaf)[0] == roots[0] ? m : m.transposed();
  };
  c.first_likelihood = slice_for(shared[0]);
  c.second_likelihood = slice_for(shared[1]);
  c.first_prior = effective_prior(net, evidence, roots[0], shared);
  c.second_prior = effective_prior(net, evidence, roots[1], shared);

  const OrientedSlices o = orient(c);
  const Matrix h1 = Matrix::diagonal(c.first_prior);
  const Matrix h2 = Matrix::diagonal(c.second_prior);
  c.a = h1 * o.forward_second * h2 * o.forward_first;
  c.a_t = h2 * o.back_first * h1 * o.back_second;
  return c;
}

Eigenpair dominant_eigenpair_2x2(const Matrix& m, double tolerance) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "expected a 2x2 matrix");
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double trace = a + d;
  const double disc = (a - d) * (a - d) + 4.0 * b * c;  // >= 0 for nonnegative input
  const double root = std::sqrt(std::max(disc, 0.0));
  const double l1 = 0.5 * (trace + root);
  const double l2 = 0.5 * (trace - root);
  if (std::abs(l1) - std::abs(l2) <= tolerance * std::max(std::abs(l1), 1e-300)) {
    throw Error(ErrorCode::DegenerateSpectrum, "dominant eigenvalue modulus is repeated");
  }
  // Two candidate null vectors of (A - l1 I); take the better conditioned one.
  Vector u{b, l1 - a};
  Vector w{l1 - d, c};
  Vector v = (std::abs(u[0]) + std::abs(u[1]) >= std::abs(w[0]) + std::abs(w[1])) ? u : w;
  if (v[0] + v[1] < 0.0) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  for (double& x : v) x = std::max(x, 0.0);
  normalize_in_place(v);
  Eigenpair out;
  out.value = l1;
  out.vector = v;
  const Vector av = m * v;
  out.residual = std::abs(av[0] - l1 * v[0]) + std::abs(av[1] - l1 * v[1]);
  out.nonnegative_mode = m.min_entry() == 0.0;
  return out;
}

Eigenpair dominant_eigenpair(const Matrix& m, double tolerance, std::size_t max_iterations) {
  if (!m.square() || m.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "expected a square matrix");
  for (double x : m.data())
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidSpec, "matrix must be nonnegative");
  if (m.rows() == 2) dominant_eigenpair_2x2(m, tolerance);  // spectrum check only

  const std::size_t n = m.rows();
  Vector v(n, 1.0 / static_cast<double>(n));
  Eigenpair out;
  out.nonnegative_mode = m.min_entry() == 0.0;
  bool converged = false;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Vector w = m * v;
    double sum = 0.0;
    for (double x : w) sum += x;
    if (!(sum > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "matrix maps the iterate to zero");
    for (double& x : w) x /= sum;
    const double step = l1_distance(w, v);
    v = std::move(w);
    out.iterations = it;
    if (step < tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NonConvergence, "power iteration did not settle in " +
                                               std::to_string(max_iterations) + " iterations");
  }
  const Vector av = m * v;
  double value = 0.0;
  for (double x : av) value += x;
  out.value = value;
  out.vector = v;
  for (std::size_t i = 0; i < n; ++i) out.residual += std::abs(av[i] - value * v[i]);
  return out;
}

double fixed_point_residual(const CycleMatrix& cycle, std::span<const double> candidate) {
  if (candidate.size() != cycle.a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "candidate has " + std::to_string(candidate.size()) +
                                                  " entries, cycle has " + std::to_string(cycle.a.cols()));
  }
  Vector next = cycle.a * candidate;
  normalize_in_place(next);
  return l1_distance(next, candidate);
}

CycleIteration iterate_message_cycle(const CycleMatrix& cycle, double tolerance, std::size_t max_iterations) {
  const OrientedSlices o = orient(cycle);
  // Forward: pi11 -> lambda12 -> pi22 -> lambda21 -> pi11.
  const Leg f1{&o.forward_first, &cycle.second_prior};
  const Leg f2{&o.forward_second, &cycle.first_prior};
  // Transposed: pi22 -> (first root) -> pi22.
  const Leg b1{&o.back_second, &cycle.first_prior};
  const Leg b2{&o.back_first, &cycle.second_prior};

  CycleIteration out;
  out.first_pi.assign(cycle.first_prior.size(), 1.0 / static_cast<double>(cycle.first_prior.size()));
  out.second_pi.assign(cycle.second_prior.size(), 1.0 / static_cast<double>(cycle.second_prior.size()));
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Vector first = advance_leg(f2, advance_leg(f1, out.first_pi));
    Vector second = advance_leg(b2, advance_leg(b1, out.second_pi));
    const double step = l1_distance(first, out.first_pi) + l1_distance(second, out.second_pi);
    out.first_pi = std::move(first);
    out.second_pi = std::move(second);
    out.iterations = it;
    if (step < tolerance) return out;
  }
  throw Error(ErrorCode::NonConvergence, "message cycle did not settle in " +
                                             std::to_string(max_iterations) + " iterations");
}

namespace {

// Fixed point of both directed cycles with receiving x sending slices; the
// beliefs then combine each root's prior with the lambda of both leaves.
std::pair<Vector, Vector> two_cycle_fixed_point(const CycleMatrix& c, const EigenSolveOptions& opt) {
  const Matrix& p1 = c.first_likelihood;
  const Matrix& p2 = c.second_likelihood;
  const Matrix p1t = p1.transposed();
  const Matrix p2t = p2.transposed();
  const Matrix h1 = Matrix::diagonal(c.first_prior);
  const Matrix h2 = Matrix::diagonal(c.second_prior);

  // Cycle through the first leaf first: first root -> first leaf -> second root -> second leaf.
  const Vector pi11 = dominant_eigenpair(h1 * p2 * h2 * p1t, opt.tolerance, opt.max_iterations).vector;
  const Vector lambda12 = normalized(p1t * pi11);
  const Vector lambda21 = normalized(p2 * normalized(hadamard(c.second_prior, lambda12)));
  // The opposite direction: first root -> second leaf -> second root -> first leaf.
  const Vector pi12 = dominant_eigenpair(h1 * p1 * h2 * p2t, opt.tolerance, opt.max_iterations).vector;
  const Vector lambda22 = normalized(p2t * pi12);
  const Vector lambda11 = normalized(p1 * normalized(hadamard(c.second_prior, lambda22)));

  Vector first = hadamard(hadamard(c.first_prior, lambda21), lambda11);
  Vector second = hadamard(hadamard(c.second_prior, lambda12), lambda22);
  normalize_in_place(first);
  normalize_in_place(second);
  return {std::move(first), std::move(second)};
}

}  // namespace

SharedLeafSolution solve_shared_leaf_pair(const BayesNet& net, const Evidence& evidence,
                                          const EigenSolveOptions& options) {
  SharedLeafSolution s;
  s.cycle = build_cycle_matrix(net, evidence, options.orientation);
  s.first_root = s.cycle.first_root;
  s.second_root = s.cycle.second_root;
  s.forward = dominant_eigenpair(s.cycle.a, options.tolerance, options.max_iterations);
  s.transposed = dominant_eigenpair(s.cycle.a_t, options.tolerance, options.max_iterations);
  s.first_belief = s.forward.vector;
  s.second_belief = s.transposed.vector;

  if (s.cycle.a.rows() == 2 && s.cycle.a_t.rows() == 2) {
    const Eigenpair d1 = dominant_eigenpair_2x2(s.cycle.a, options.tolerance);
    const Eigenpair d2 = dominant_eigenpair_2x2(s.cycle.a_t, options.tolerance);
    s.method_gap = std::max(l1_distance(d1.vector, s.forward.vector), l1_distance(d2.vector, s.transposed.vector));
    if (*s.method_gap > 1e-10) {
      s.warnings.push_back("power iteration and closed form differ by " + std::to_string(*s.method_gap));
    }
  }
  if (s.forward.nonnegative_mode || s.transposed.nonnegative_mode) {
    s.warnings.push_back("cycle matrix has zero entries; Perron uniqueness not guaranteed");
  }

  s.alpha.cycle_eigenvalue = s.forward.value;
  s.alpha.recursion_alpha = 1.0 / s.forward.value;
  s.alpha.transposed_cycle_eigenvalue = s.transposed.value;
  s.alpha.first_leaf_slice_eigenvalue = slice_eigenvalue(s.cycle.first_likelihood);
  s.alpha.second_leaf_slice_eigenvalue = slice_eigenvalue(s.cycle.second_likelihood);
  s.alpha.note =
      "alpha convention is ambiguous: the one-trip recursion normalizer is 1/cycle_eigenvalue, "
      "while a single leaf slice's dominant eigenvalue is a different quantity; both are reported";

  try {
    s.two_cycle_beliefs = two_cycle_fixed_point(s.cycle, options);
  } catch (const Error& e) {
    s.warnings.push_back(std::string("two-cycle beliefs unavailable: ") + e.what());
  }
  return s;
}

}  // namespace recognet

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "recognet/matrix.hpp"
#include "recognet/net.hpp"

namespace recognet {

/// How the leaf likelihood slices enter the message cycle.
///
/// Literal composes the slices as written, a = H1 P2 H2 P1, with
/// every P indexed (first root) x (second root). Explicit orients each slice
/// receiving-parent x sending-parent, which transposes the factor that feeds
/// the second root: a = H1 P2 H2 P1^T.
enum class CycleOrientation { Literal, Explicit };

std::string_view to_string(CycleOrientation o) noexcept;

/// The message cycle of a two-root shared-leaf net.
///
/// `a` maps the pi message the first root sends its first leaf back onto
/// itself after one trip round the cycle; `a_t` is the transposed cycle for
/// the second root. H1 and H2 are diagonal matrices of the effective priors.
struct CycleMatrix {
  std::string first_root;
  std::string second_root;
  std::string first_leaf;
  std::string second_leaf;
  Vector first_prior;
  Vector second_prior;
  /// p(leaf = observed | first root = i, second root = j).
  Matrix first_likelihood;
  Matrix second_likelihood;
  CycleOrientation orientation = CycleOrientation::Literal;
  Matrix a;
  Matrix a_t;
};

/// Roots are taken in declaration order, as are the two shared leaves.
/// Evidence on single-parent leaves, or on a root, is folded into that
/// root's effective prior.
CycleMatrix build_cycle_matrix(const BayesNet& net, const Evidence& evidence,
                               CycleOrientation orientation = CycleOrientation::Literal);

struct Eigenpair {
  double value = 0.0;
  Vector vector;  // L1-normalized, nonnegative
  double residual = 0.0;  // || A v - value v ||_1
  std::size_t iterations = 0;
  /// Set when the matrix has zero entries, so Perron uniqueness is not
  /// guaranteed.
  bool nonnegative_mode = false;
};

inline constexpr double kPowerTolerance = 1e-12;
inline constexpr std::size_t kPowerMaxIterations = 10000;

/// Power iteration from the uniform vector, L1-normalized each step, stopping
/// when successive iterates differ by less than `tolerance` in L1. For 2x2
/// input the closed-form spectrum is checked first and a repeated dominant
/// modulus raises DegenerateSpectrum.
Eigenpair dominant_eigenpair(const Matrix& m, double tolerance = kPowerTolerance,
                             std::size_t max_iterations = kPowerMaxIterations);

/// Closed-form dominant eigenpair of a 2x2 nonnegative matrix.
Eigenpair dominant_eigenpair_2x2(const Matrix& m, double tolerance = kPowerTolerance);

/// L1 distance between normalize(a * candidate) and candidate.
double fixed_point_residual(const CycleMatrix& cycle, std::span<const double> candidate);

/// Result of running the message recursion itself rather than solving the
/// eigenproblem.
struct CycleIteration {
  Vector first_pi;   // pi from the first root into the first leaf
  Vector second_pi;  // pi from the second root, from the transposed cycle
  std::size_t iterations = 0;
};

/// Iterates both cycles message by message from uniform messages,
/// normalizing every message, until both pi vectors move less than
/// `tolerance` in L1. Throws NonConvergence at the cap.
CycleIteration iterate_message_cycle(const CycleMatrix& cycle, double tolerance = kPowerTolerance,
                                     std::size_t max_iterations = kPowerMaxIterations);

/// Normalizing constants that appear in the solution. The cycle matrix's
/// eigenvalue is 1/alpha of the one-trip recursion; the dominant eigenvalue
/// of each square leaf slice is reported alongside because the two are
/// easily confused in the single-slice symmetric case.
struct AlphaReport {
  double cycle_eigenvalue = 0.0;
  double recursion_alpha = 0.0;
  double transposed_cycle_eigenvalue = 0.0;
  std::optional<double> first_leaf_slice_eigenvalue;
  std::optional<double> second_leaf_slice_eigenvalue;
  std::string note;
};

struct SharedLeafSolution {
  std::string first_root;
  std::string second_root;
  /// Dominant eigenvector of a.
  Vector first_belief;
  /// Dominant eigenvector of a_t.
  Vector second_belief;
  Eigenpair forward;
  Eigenpair transposed;
  AlphaReport alpha;
  /// Largest L1 gap between power iteration and the closed form (2-state roots only).
  std::optional<double> method_gap;
  /// Beliefs from prior times the lambda of both shared leaves at the fixed
  /// point of both message cycles (receiving x sending orientation). Empty
  /// if either cycle had no unique fixed point.
  std::optional<std::pair<Vector, Vector>> two_cycle_beliefs;
  CycleMatrix cycle;
  std::vector<std::string> warnings;
};

struct EigenSolveOptions {
  CycleOrientation orientation = CycleOrientation::Literal;
  double tolerance = kPowerTolerance;
  std::size_t max_iterations = kPowerMaxIterations;
};

SharedLeafSolution solve_shared_leaf_pair(const BayesNet& net, const Evidence& evidence,
                                          const EigenSolveOptions& options = {});

}  // namespace recognet

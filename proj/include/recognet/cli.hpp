#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recognet/bnet_format.hpp"
#include "recognet/eigensolver.hpp"
#include "recognet/oracle.hpp"

namespace recognet::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Solver { Auto, Exact, Pearl, Eigen, LambdaOnly };

std::optional<Solver> parse_solver(std::string_view name);
std::string_view to_string(Solver s) noexcept;

enum class ReportFormat { Text, Records };

enum class ReferenceMatch { Exact, Permuted, Mismatch };

std::string_view to_string(ReferenceMatch m) noexcept;

/// `Permuted` when the components agree only after sorting, so a reference
/// written in the other state order is flagged rather than silently passed.
ReferenceMatch match_reference(std::span<const double> computed, std::span<const double> reference,
                               double tolerance);

struct ReferenceCheck {
  std::string node;
  Vector expected;
  ReferenceMatch match = ReferenceMatch::Mismatch;
};

struct InferOptions {
  std::size_t size_cap = kDefaultSizeCap;
  CycleOrientation orientation = CycleOrientation::Literal;
  /// Expected beliefs to check the result against, keyed by node.
  std::map<std::string, Vector> references;
  double reference_tolerance = 2e-3;
};

struct InferenceReport {
  std::string solver;
  std::string structure;
  /// In query order.
  std::vector<std::pair<std::string, Vector>> beliefs;
  /// Solver-specific diagnostics, in a fixed order per solver.
  std::vector<std::pair<std::string, std::string>> diagnostics;
  std::vector<std::string> warnings;
  std::vector<ReferenceCheck> references;

  const Vector* belief(std::string_view node) const;
};

struct Divergence {
  std::string node;
  std::string first_solver;
  std::string second_solver;
  double l1 = 0.0;
};

struct ComparisonReport {
  std::string structure;
  std::vector<InferenceReport> runs;
  std::vector<Divergence> divergences;
};

/// Solver that `auto` resolves to for this document and query set.
Solver select_solver(const BnetDocument& doc, const std::vector<std::string>& queries);

/// Runs one solver on the document's evidence. An empty query list means the
/// solver's natural outputs: every node for exact and pearl, the tree root for
/// lambda-only, the two roots for eigen. Structural mismatches surface as
/// SolverInapplicable naming an applicable solver.
InferenceReport infer(const BnetDocument& doc, Solver solver, const std::vector<std::string>& queries,
                      const InferOptions& options = {});

/// Runs every solver and tabulates pairwise L1 distances per shared node.
ComparisonReport compare(const BnetDocument& doc, const std::vector<Solver>& solvers,
                         const std::vector<std::string>& queries, const InferOptions& options = {});

std::string render(const InferenceReport& report, ReportFormat format);
std::string render(const ComparisonReport& report, ReportFormat format);

/// Entry point for the `recognet` executable. Returns the exit status; every
/// failure writes exactly one "error: <Code>: <detail>" line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recognet::cli

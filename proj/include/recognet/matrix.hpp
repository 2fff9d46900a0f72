#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace recognet {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sized for message-passing work over a
/// handful of states, not for large linear algebra.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix diagonal(std::span<const double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  double max_abs() const noexcept;
  double min_entry() const noexcept;

  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
  friend Vector operator*(const Matrix& lhs, std::span<const double> rhs);
  friend Matrix operator*(double scale, const Matrix& rhs);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Vector helpers shared by the solvers.

/// L1-normalizes in place. Returns the original sum; throws
/// InconsistentEvidence if the sum is zero or not finite.
double normalize_in_place(Vector& v);
Vector normalized(Vector v);
double l1_distance(std::span<const double> a, std::span<const double> b);
double max_abs_difference(std::span<const double> a, std::span<const double> b);
Vector hadamard(std::span<const double> a, std::span<const double> b);

}  // namespace recognet

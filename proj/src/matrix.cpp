#include "recognet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recognet/error.hpp"

namespace recognet {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix initializer");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::min_entry() const noexcept {
  if (data_.empty()) return 0.0;
  return *std::min_element(data_.begin(), data_.end());
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols_ != rhs.rows_) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix product " + std::to_string(lhs.rows_) + "x" + std::to_string(lhs.cols_) +
                    " by " + std::to_string(rhs.rows_) + "x" + std::to_string(rhs.cols_));
  }
  Matrix out(lhs.rows_, rhs.cols_);
  for (std::size_t i = 0; i < lhs.rows_; ++i)
    for (std::size_t k = 0; k < lhs.cols_; ++k) {
      const double x = lhs(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += x * rhs(k, j);
    }
  return out;
}

Vector operator*(const Matrix& lhs, std::span<const double> rhs) {
  if (lhs.cols_ != rhs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector product with mismatched length");
  }
  Vector out(lhs.rows_, 0.0);
  for (std::size_t i = 0; i < lhs.rows_; ++i)
    for (std::size_t j = 0; j < lhs.cols_; ++j) out[i] += lhs(i, j) * rhs[j];
  return out;
}

Matrix operator*(double scale, const Matrix& rhs) {
  Matrix out = rhs;
  for (double& x : out.data_) x *= scale;
  return out;
}

double normalize_in_place(Vector& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorCode::InconsistentEvidence, "vector has no positive mass to normalize");
  }
  for (double& x : v) x /= sum;
  return sum;
}

Vector normalized(Vector v) {
  normalize_in_place(v);
  return v;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "l1_distance length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "max_abs_difference length mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Vector hadamard(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "hadamard length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace recognet

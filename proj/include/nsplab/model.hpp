#pragma once

#include "nsplab/scalar.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nsplab {

using Vec = std::vector<double>;
using ExactVec = std::vector<Rational>;

/// Dense row-major matrix over double or Rational.
template <class T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static BasicMatrix from_rows(const std::vector<std::vector<T>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<T> multiply(std::span<const T> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using ExactMatrix = BasicMatrix<Rational>;

Matrix to_double(const ExactMatrix& m);

/// Column basis of ker(A), stored column-by-column (each column has length
/// `ambient`). dim() == 0 means the kernel is trivial.
template <class T>
struct BasicKernelBasis {
  std::size_t ambient = 0;
  std::vector<std::vector<T>> columns;
  ScalarMode mode;

  std::size_t dim() const { return columns.size(); }

  /// V * coords.
  std::vector<T> combine(std::span<const T> coords) const;
};

using KernelBasis = BasicKernelBasis<double>;
using ExactKernelBasis = BasicKernelBasis<Rational>;

KernelBasis to_double(const ExactKernelBasis& k);

/// Orthonormal basis of the same subspace (modified Gram-Schmidt, twice).
KernelBasis orthonormalized(const KernelBasis& k);

/// Kernel basis via reduced row echelon form with partial pivoting. Pivots
/// below tol_zero times the row scale are treated as zero.
KernelBasis nullspace_basis(const Matrix& a, double tol_zero = 1e-9);
ExactKernelBasis nullspace_basis(const ExactMatrix& a);

std::size_t rank(const Matrix& a, double tol_zero = 1e-9);
std::size_t rank(const ExactMatrix& a);

/// Index subset of {0, ..., ambient-1}, strictly increasing. Rendered 1-based
/// in every external interface.
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::vector<std::size_t> indices, std::size_t ambient);

  static SupportSet from_one_based(const std::vector<std::size_t>& indices, std::size_t ambient);
  static SupportSet full(std::size_t ambient);

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t ambient() const { return ambient_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t i) const;

  SupportSet complement() const;
  std::vector<std::size_t> one_based() const;
  std::string to_string() const;  // "{1,3}"

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t ambient_ = 0;
};

SupportSet support_of(std::span<const double> z, double tol_zero = 1e-9);
SupportSet support_of(std::span<const Rational> z);

bool is_equal_height(std::span<const double> z, double tol_zero = 1e-9);
bool is_equal_height(std::span<const Rational> z);

/// Magnitudes in nonincreasing order.
Vec sorted_magnitudes(std::span<const double> z);
ExactVec sorted_magnitudes(std::span<const Rational> z);

/// Indices ordered by decreasing magnitude, ties by ascending index.
template <class T>
std::vector<std::size_t> magnitude_order(std::span<const T> z);

/// z restricted to S (entries outside S zeroed).
template <class T>
std::vector<T> restrict_to(std::span<const T> z, const SupportSet& s);

template <class T>
T norm_inf(std::span<const T> z);

double norm1(std::span<const double> z);

bool all_finite(std::span<const double> z);

/// Matrix text format: "m N" on the first line, then m rows of N scalars in
/// decimal or p/q form. Lines starting with '#' are ignored.
ExactMatrix read_matrix(std::istream& in);
ExactMatrix read_matrix_file(const std::string& path);
ExactMatrix parse_matrix(const std::string& text);

/// Comma- or whitespace-separated scalar list, e.g. "1,1,0,0,0".
ExactVec parse_vector(std::string_view text);
Vec to_double(const ExactVec& v);

}  // namespace nsplab

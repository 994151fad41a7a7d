#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "simtlab/scalar.hpp"

namespace simtlab {

/// Dense row-major matrix: element (i, j) lives at flat index i * cols + j.
/// Complex elements are interleaved (real, imaginary) pairs.
template <Scalar T>
class Matrix {
 public:
  using value_type = T;
  static constexpr ScalarKind kind = scalar_traits<T>::kind;

  /// Zero-filled. Throws std::invalid_argument on a zero dimension.
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
    data_.assign(rows * cols, T{});
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index_of(std::size_t i, std::size_t j) const {
    check(i, j);
    return i * cols_ + j;
  }

  T get(std::size_t i, std::size_t j) const { return data_[index_of(i, j)]; }
  void set(std::size_t i, std::size_t j, T v) { data_[index_of(i, j)] = v; }

  // Unchecked access for inner loops.
  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> row(std::size_t i) noexcept { return data().subspan(i * cols_, cols_); }
  std::span<const T> row(std::size_t i) const noexcept {
    return data().subspan(i * cols_, cols_);
  }

 private:
  void check(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw std::out_of_range("index (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") outside " + std::to_string(rows_) + "x" +
                              std::to_string(cols_) + " matrix");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> data_;
};

/// Matrix whose element kind is chosen at runtime.
using AnyMatrix = std::variant<Matrix<float>, Matrix<double>, Matrix<c64>>;

ScalarKind kind_of(const AnyMatrix& m) noexcept;
std::size_t rows_of(const AnyMatrix& m) noexcept;
std::size_t cols_of(const AnyMatrix& m) noexcept;

struct Zeros {};
struct Identity {};
/// Uniform in [-1, 1) per component, drawn from std::mt19937_64(seed).
/// Real kinds use one draw per element; complex uses two (real first).
/// float64: (x >> 11) * 2^-53 * 2 - 1; float32: (x >> 40) * 2^-24 * 2 - 1.
/// Both are exact, so the result is bit-identical on every platform.
struct SeededRandom {
  std::uint64_t seed = 0;
};
/// Integers in [-bound, bound] per component: (x % (2*bound + 1)) - bound.
/// Products and sums of such values stay exact in float64 for the sizes
/// used here, which makes bitwise comparisons meaningful.
struct SeededInteger {
  std::uint64_t seed = 0;
  int bound = 8;
};
using Fill = std::variant<Zeros, Identity, SeededRandom, SeededInteger>;

template <Scalar T>
Matrix<T> make_matrix(std::size_t rows, std::size_t cols, const Fill& fill);

AnyMatrix make_any_matrix(std::size_t rows, std::size_t cols, ScalarKind kind,
                          const Fill& fill);

/// Same shape and bit-identical element storage.
template <Scalar T>
bool bitwise_equal(const Matrix<T>& a, const Matrix<T>& b) noexcept;
bool bitwise_equal(const AnyMatrix& a, const AnyMatrix& b) noexcept;

struct ErrorMetric {
  double rel_frobenius = 0.0;
  double max_abs = 0.0;
};

/// rel_frobenius = ||a - b||_F / max(||b||_F, smallest positive normal of the
/// component type); max_abs is the largest |a_ij - b_ij| (complex modulus).
/// Accumulated in double. Throws std::invalid_argument on shape or kind
/// mismatch.
template <Scalar T>
ErrorMetric compare(const Matrix<T>& a, const Matrix<T>& b);
ErrorMetric compare(const AnyMatrix& a, const AnyMatrix& b);

}  // namespace simtlab

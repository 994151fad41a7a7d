#pragma once

// Sequential host algorithms: correctness oracles and benchmark baselines.
// All are pure functions of their inputs. When a counter is passed, the
// logical multiply and add counts of the algorithm are added to it.

#include <cstddef>
#include <span>
#include <vector>

#include "simtlab/matrix.hpp"
#include "simtlab/op_counter.hpp"
#include "simtlab/simd/row_ops.hpp"

namespace simtlab {

enum class ElementOp { add, sub };

/// Cauchy product. Every c_ij starts at zero and accumulates a_ir * b_rj in
/// ascending r, one rounded multiply then one rounded add per term; the
/// engine kernels reproduce this sequence exactly.
/// Throws std::invalid_argument if a.cols() != b.rows().
template <Scalar T>
Matrix<T> matmul_sequential(const Matrix<T>& a, const Matrix<T>& b,
                            OpCounter* counter = nullptr);
template <Scalar T>
Matrix<T> matmul_sequential(const Matrix<T>& a, const Matrix<T>& b, simd::Isa isa,
                            OpCounter* counter = nullptr);
AnyMatrix matmul_sequential(const AnyMatrix& a, const AnyMatrix& b,
                            OpCounter* counter = nullptr);

/// One addition (or subtraction) per element, complex included.
template <Scalar T>
Matrix<T> elementwise(const Matrix<T>& a, const Matrix<T>& b, ElementOp op,
                      OpCounter* counter = nullptr);
AnyMatrix elementwise(const AnyMatrix& a, const AnyMatrix& b, ElementOp op,
                      OpCounter* counter = nullptr);

/// Product of two diagonal matrices given by their diagonals: n multiplies.
template <Scalar T>
std::vector<T> matmul_diagonal(std::span<const T> diag_a, std::span<const T> diag_b,
                               OpCounter* counter = nullptr);

struct StrassenConfig {
  /// Sides at or below this use the Cauchy product. Must be >= 1.
  std::size_t cutoff = 64;
};

/// Seven-product Strassen recursion on square power-of-two sides, real kinds
/// only. Each level performs 18 quadrant additions/subtractions.
template <RealScalar T>
Matrix<T> matmul_strassen(const Matrix<T>& a, const Matrix<T>& b, StrassenConfig cfg = {},
                          OpCounter* counter = nullptr);
/// Throws std::invalid_argument for complex operands.
AnyMatrix matmul_strassen(const AnyMatrix& a, const AnyMatrix& b, StrassenConfig cfg = {},
                          OpCounter* counter = nullptr);

}  // namespace simtlab

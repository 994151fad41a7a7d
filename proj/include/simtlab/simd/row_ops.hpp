#pragma once

// Row-level inner loops shared by the host reference algorithms. Every ISA
// variant must produce results bitwise identical to the scalar one: products
// and sums are rounded separately (no fused multiply-add) and each output
// element sees the same operation sequence.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "simtlab/scalar.hpp"

namespace simtlab::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

/// ISAs compiled in and supported by the running CPU, scalar first.
const std::vector<Isa>& available_isas();

/// Best available ISA, unless SIMTLAB_ISA names another available one.
Isa active_isa();

template <Scalar T>
struct RowOps {
  /// c[j] = c[j] + a * b[j]
  void (*axpy)(T* c, T a, const T* b, std::size_t n) noexcept;
  /// out[j] = x[j] + y[j]; out may alias x or y.
  void (*add)(const T* x, const T* y, T* out, std::size_t n) noexcept;
  /// out[j] = x[j] - y[j]; out may alias x or y.
  void (*sub)(const T* x, const T* y, T* out, std::size_t n) noexcept;
};

/// Throws std::invalid_argument if isa is not in available_isas().
template <Scalar T>
const RowOps<T>& row_ops(Isa isa);

template <Scalar T>
const RowOps<T>& row_ops() {
  return row_ops<T>(active_isa());
}

// Per-ISA tables; defined only in the translation unit built for that ISA.
template <Scalar T>
const RowOps<T>& scalar_row_ops() noexcept;
template <Scalar T>
const RowOps<T>& avx2_row_ops() noexcept;
template <Scalar T>
const RowOps<T>& neon_row_ops() noexcept;

template <> const RowOps<float>& avx2_row_ops<float>() noexcept;
template <> const RowOps<double>& avx2_row_ops<double>() noexcept;
template <> const RowOps<c64>& avx2_row_ops<c64>() noexcept;
template <> const RowOps<float>& neon_row_ops<float>() noexcept;
template <> const RowOps<double>& neon_row_ops<double>() noexcept;
template <> const RowOps<c64>& neon_row_ops<c64>() noexcept;

}  // namespace simtlab::simd

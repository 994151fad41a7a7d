#include "simtlab/simd/row_ops.hpp"

namespace simtlab::simd {

namespace {

template <Scalar T>
void axpy(T* c, T a, const T* b, std::size_t n) noexcept {
  for (std::size_t j = 0; j < n; ++j) c[j] = add(c[j], mul(a, b[j]));
}

template <Scalar T>
void add_rows(const T* x, const T* y, T* out, std::size_t n) noexcept {
  for (std::size_t j = 0; j < n; ++j) out[j] = add(x[j], y[j]);
}

template <Scalar T>
void sub_rows(const T* x, const T* y, T* out, std::size_t n) noexcept {
  for (std::size_t j = 0; j < n; ++j) out[j] = sub(x[j], y[j]);
}

}  // namespace

template <Scalar T>
const RowOps<T>& scalar_row_ops() noexcept {
  static constexpr RowOps<T> ops{&axpy<T>, &add_rows<T>, &sub_rows<T>};
  return ops;
}

template const RowOps<float>& scalar_row_ops<float>() noexcept;
template const RowOps<double>& scalar_row_ops<double>() noexcept;
template const RowOps<c64>& scalar_row_ops<c64>() noexcept;

}  // namespace simtlab::simd

// Built with -mavx2. Only reached after the dispatcher has confirmed AVX2.

#include <immintrin.h>

#include "simtlab/simd/row_ops.hpp"

namespace simtlab::simd {

namespace {

void axpy_f32(float* c, float a, const float* b, std::size_t n) noexcept {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256 prod = _mm256_mul_ps(va, _mm256_loadu_ps(b + j));
    _mm256_storeu_ps(c + j, _mm256_add_ps(_mm256_loadu_ps(c + j), prod));
  }
  for (; j < n; ++j) c[j] = c[j] + a * b[j];
}

void axpy_f64(double* c, double a, const double* b, std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(b + j));
    _mm256_storeu_pd(c + j, _mm256_add_pd(_mm256_loadu_pd(c + j), prod));
  }
  for (; j < n; ++j) c[j] = c[j] + a * b[j];
}

// Four complex values per register as [re0, im0, re1, im1, ...].
// addsub(ar*b, ai*swap(b)) = [ar*br - ai*bi, ar*bi + ai*br], the same
// roundings as complex_mul.
void axpy_c64(c64* c, c64 a, const c64* b, std::size_t n) noexcept {
  const __m256 vre = _mm256_set1_ps(a.real());
  const __m256 vim = _mm256_set1_ps(a.imag());
  auto* cf = reinterpret_cast<float*>(c);
  const auto* bf = reinterpret_cast<const float*>(b);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256 vb = _mm256_loadu_ps(bf + 2 * j);
    const __m256 swapped = _mm256_permute_ps(vb, 0b10110001);
    const __m256 prod =
        _mm256_addsub_ps(_mm256_mul_ps(vre, vb), _mm256_mul_ps(vim, swapped));
    _mm256_storeu_ps(cf + 2 * j, _mm256_add_ps(_mm256_loadu_ps(cf + 2 * j), prod));
  }
  for (; j < n; ++j) c[j] = add(c[j], complex_mul(a, b[j]));
}

template <bool Subtract>
void binary_f32(const float* x, const float* y, float* out, std::size_t n) noexcept {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256 vx = _mm256_loadu_ps(x + j);
    const __m256 vy = _mm256_loadu_ps(y + j);
    _mm256_storeu_ps(out + j, Subtract ? _mm256_sub_ps(vx, vy) : _mm256_add_ps(vx, vy));
  }
  for (; j < n; ++j) out[j] = Subtract ? x[j] - y[j] : x[j] + y[j];
}

template <bool Subtract>
void binary_f64(const double* x, const double* y, double* out, std::size_t n) noexcept {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d vx = _mm256_loadu_pd(x + j);
    const __m256d vy = _mm256_loadu_pd(y + j);
    _mm256_storeu_pd(out + j, Subtract ? _mm256_sub_pd(vx, vy) : _mm256_add_pd(vx, vy));
  }
  for (; j < n; ++j) out[j] = Subtract ? x[j] - y[j] : x[j] + y[j];
}

// Complex add/sub is componentwise, so it is the float32 loop over 2n values.
template <bool Subtract>
void binary_c64(const c64* x, const c64* y, c64* out, std::size_t n) noexcept {
  binary_f32<Subtract>(reinterpret_cast<const float*>(x), reinterpret_cast<const float*>(y),
                       reinterpret_cast<float*>(out), 2 * n);
}

}  // namespace

template <>
const RowOps<float>& avx2_row_ops<float>() noexcept {
  static constexpr RowOps<float> ops{&axpy_f32, &binary_f32<false>, &binary_f32<true>};
  return ops;
}

template <>
const RowOps<double>& avx2_row_ops<double>() noexcept {
  static constexpr RowOps<double> ops{&axpy_f64, &binary_f64<false>, &binary_f64<true>};
  return ops;
}

template <>
const RowOps<c64>& avx2_row_ops<c64>() noexcept {
  static constexpr RowOps<c64> ops{&axpy_c64, &binary_c64<false>, &binary_c64<true>};
  return ops;
}

}  // namespace simtlab::simd

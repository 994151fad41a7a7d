// AArch64 only; NEON is part of the base ISA there.

#include <arm_neon.h>

#include "simtlab/simd/row_ops.hpp"

namespace simtlab::simd {

namespace {

// vmulq + vaddq, never vfmaq/vmlaq: the latter fuse on AArch64.
void axpy_f32(float* c, float a, const float* b, std::size_t n) noexcept {
  const float32x4_t va = vdupq_n_f32(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const float32x4_t prod = vmulq_f32(va, vld1q_f32(b + j));
    vst1q_f32(c + j, vaddq_f32(vld1q_f32(c + j), prod));
  }
  for (; j < n; ++j) c[j] = c[j] + a * b[j];
}

void axpy_f64(double* c, double a, const double* b, std::size_t n) noexcept {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t prod = vmulq_f64(va, vld1q_f64(b + j));
    vst1q_f64(c + j, vaddq_f64(vld1q_f64(c + j), prod));
  }
  for (; j < n; ++j) c[j] = c[j] + a * b[j];
}

// Deinterleaving load: re = [br...], im = [bi...].
void axpy_c64(c64* c, c64 a, const c64* b, std::size_t n) noexcept {
  const float32x4_t ar = vdupq_n_f32(a.real());
  const float32x4_t ai = vdupq_n_f32(a.imag());
  auto* cf = reinterpret_cast<float*>(c);
  const auto* bf = reinterpret_cast<const float*>(b);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const float32x4x2_t vb = vld2q_f32(bf + 2 * j);
    float32x4x2_t vc = vld2q_f32(cf + 2 * j);
    const float32x4_t re = vsubq_f32(vmulq_f32(ar, vb.val[0]), vmulq_f32(ai, vb.val[1]));
    const float32x4_t im = vaddq_f32(vmulq_f32(ar, vb.val[1]), vmulq_f32(ai, vb.val[0]));
    vc.val[0] = vaddq_f32(vc.val[0], re);
    vc.val[1] = vaddq_f32(vc.val[1], im);
    vst2q_f32(cf + 2 * j, vc);
  }
  for (; j < n; ++j) c[j] = add(c[j], complex_mul(a, b[j]));
}

template <bool Subtract>
void binary_f32(const float* x, const float* y, float* out, std::size_t n) noexcept {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const float32x4_t vx = vld1q_f32(x + j);
    const float32x4_t vy = vld1q_f32(y + j);
    vst1q_f32(out + j, Subtract ? vsubq_f32(vx, vy) : vaddq_f32(vx, vy));
  }
  for (; j < n; ++j) out[j] = Subtract ? x[j] - y[j] : x[j] + y[j];
}

template <bool Subtract>
void binary_f64(const double* x, const double* y, double* out, std::size_t n) noexcept {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t vx = vld1q_f64(x + j);
    const float64x2_t vy = vld1q_f64(y + j);
    vst1q_f64(out + j, Subtract ? vsubq_f64(vx, vy) : vaddq_f64(vx, vy));
  }
  for (; j < n; ++j) out[j] = Subtract ? x[j] - y[j] : x[j] + y[j];
}

template <bool Subtract>
void binary_c64(const c64* x, const c64* y, c64* out, std::size_t n) noexcept {
  binary_f32<Subtract>(reinterpret_cast<const float*>(x), reinterpret_cast<const float*>(y),
                       reinterpret_cast<float*>(out), 2 * n);
}

}  // namespace

template <>
const RowOps<float>& neon_row_ops<float>() noexcept {
  static constexpr RowOps<float> ops{&axpy_f32, &binary_f32<false>, &binary_f32<true>};
  return ops;
}

template <>
const RowOps<double>& neon_row_ops<double>() noexcept {
  static constexpr RowOps<double> ops{&axpy_f64, &binary_f64<false>, &binary_f64<true>};
  return ops;
}

template <>
const RowOps<c64>& neon_row_ops<c64>() noexcept {
  static constexpr RowOps<c64> ops{&axpy_c64, &binary_c64<false>, &binary_c64<true>};
  return ops;
}

}  // namespace simtlab::simd

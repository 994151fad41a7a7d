#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <type_traits>

namespace simtlab {

/// Element types the library operates on. The numeric tag values are the
/// on-disk kind bytes of the STMX matrix format.
enum class ScalarKind : std::uint8_t { f32 = 0, f64 = 1, c64 = 2 };

/// Two float32 components stored as (real, imaginary).
using c64 = std::complex<float>;

constexpr std::size_t byte_width(ScalarKind kind) noexcept {
  return kind == ScalarKind::f32 ? 4 : 8;
}

std::string_view to_string(ScalarKind kind) noexcept;

/// Accepts "f32"/"float32", "f64"/"float64", "c64"/"complex64".
/// Throws std::invalid_argument for anything else.
ScalarKind parse_scalar_kind(std::string_view text);

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<float> {
  static constexpr ScalarKind kind = ScalarKind::f32;
  using component = float;
};

template <>
struct scalar_traits<double> {
  static constexpr ScalarKind kind = ScalarKind::f64;
  using component = double;
};

template <>
struct scalar_traits<c64> {
  static constexpr ScalarKind kind = ScalarKind::c64;
  using component = float;
};

template <class T>
concept Scalar = std::is_same_v<T, float> || std::is_same_v<T, double> ||
                 std::is_same_v<T, c64>;

template <class T>
concept RealScalar = std::is_same_v<T, float> || std::is_same_v<T, double>;

static_assert(sizeof(c64) == 8 && alignof(c64) == alignof(float));

/// (a+bi)(c+di) = (ac - bd) + (ad + bc)i, evaluated in float32 with no
/// special-casing of infinities or NaN.
constexpr c64 complex_mul(c64 x, c64 y) noexcept {
  const float a = x.real(), b = x.imag();
  const float c = y.real(), d = y.imag();
  return {a * c - b * d, a * d + b * c};
}

// Arithmetic used by every kernel, so all code paths round identically.
template <RealScalar T>
constexpr T mul(T x, T y) noexcept {
  return x * y;
}
constexpr c64 mul(c64 x, c64 y) noexcept { return complex_mul(x, y); }

template <Scalar T>
constexpr T add(T x, T y) noexcept {
  if constexpr (std::is_same_v<T, c64>) {
    return {x.real() + y.real(), x.imag() + y.imag()};
  } else {
    return x + y;
  }
}

template <Scalar T>
constexpr T sub(T x, T y) noexcept {
  if constexpr (std::is_same_v<T, c64>) {
    return {x.real() - y.real(), x.imag() - y.imag()};
  } else {
    return x - y;
  }
}

}  // namespace simtlab

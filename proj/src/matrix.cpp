#include "simtlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace simtlab {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

template <class C>
C uniform_component(std::mt19937_64& gen) {
  const std::uint64_t x = gen();
  if constexpr (std::is_same_v<C, double>) {
    return static_cast<double>(x >> 11) * 0x1p-53 * 2.0 - 1.0;
  } else {
    return static_cast<float>(x >> 40) * 0x1p-24f * 2.0f - 1.0f;
  }
}

template <class C>
C integer_component(std::mt19937_64& gen, int bound) {
  const auto span = static_cast<std::uint64_t>(2 * bound + 1);
  return static_cast<C>(static_cast<std::int64_t>(gen() % span) - bound);
}

template <Scalar T, class Draw>
void fill_with(Matrix<T>& m, Draw draw) {
  for (T& v : m.data()) {
    if constexpr (std::is_same_v<T, c64>) {
      const float re = draw();
      const float im = draw();
      v = c64{re, im};
    } else {
      v = draw();
    }
  }
}

template <Scalar T>
double magnitude(T v) {
  if constexpr (std::is_same_v<T, c64>) {
    return std::hypot(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  } else {
    return std::abs(static_cast<double>(v));
  }
}

}  // namespace

ScalarKind kind_of(const AnyMatrix& m) noexcept {
  return std::visit([](const auto& x) { return std::decay_t<decltype(x)>::kind; }, m);
}
std::size_t rows_of(const AnyMatrix& m) noexcept {
  return std::visit([](const auto& x) { return x.rows(); }, m);
}
std::size_t cols_of(const AnyMatrix& m) noexcept {
  return std::visit([](const auto& x) { return x.cols(); }, m);
}

template <Scalar T>
Matrix<T> make_matrix(std::size_t rows, std::size_t cols, const Fill& fill) {
  using C = typename scalar_traits<T>::component;
  Matrix<T> m(rows, cols);
  std::visit(overloaded{
                 [](const Zeros&) {},
                 [&](const Identity&) {
                   if (rows != cols) {
                     throw std::invalid_argument("identity fill requires a square matrix");
                   }
                   for (std::size_t i = 0; i < rows; ++i) m(i, i) = T{1};
                 },
                 [&](const SeededRandom& r) {
                   std::mt19937_64 gen(r.seed);
                   fill_with(m, [&] { return uniform_component<C>(gen); });
                 },
                 [&](const SeededInteger& r) {
                   if (r.bound < 0) throw std::invalid_argument("integer bound must be >= 0");
                   std::mt19937_64 gen(r.seed);
                   fill_with(m, [&] { return integer_component<C>(gen, r.bound); });
                 },
             },
             fill);
  return m;
}

AnyMatrix make_any_matrix(std::size_t rows, std::size_t cols, ScalarKind kind,
                          const Fill& fill) {
  switch (kind) {
    case ScalarKind::f32: return make_matrix<float>(rows, cols, fill);
    case ScalarKind::f64: return make_matrix<double>(rows, cols, fill);
    case ScalarKind::c64: return make_matrix<c64>(rows, cols, fill);
  }
  throw std::invalid_argument("unknown scalar kind");
}

template <Scalar T>
bool bitwise_equal(const Matrix<T>& a, const Matrix<T>& b) noexcept {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(T)) == 0;
}

bool bitwise_equal(const AnyMatrix& a, const AnyMatrix& b) noexcept {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using M = std::decay_t<decltype(x)>;
        return bitwise_equal(x, std::get<M>(b));
      },
      a);
}

template <Scalar T>
ErrorMetric compare(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  using C = typename scalar_traits<T>::component;
  double diff_sq = 0.0;
  double ref_sq = 0.0;
  double max_abs = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = magnitude(sub(x[k], y[k]));
    const double r = magnitude(y[k]);
    diff_sq += d * d;
    ref_sq += r * r;
    max_abs = std::max(max_abs, d);
  }
  const double floor = static_cast<double>(std::numeric_limits<C>::min());
  return {std::sqrt(diff_sq) / std::max(std::sqrt(ref_sq), floor), max_abs};
}

ErrorMetric compare(const AnyMatrix& a, const AnyMatrix& b) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("kind mismatch: " + std::string(to_string(kind_of(a))) +
                                " vs " + std::string(to_string(kind_of(b))));
  }
  return std::visit(
      [&](const auto& x) {
        using M = std::decay_t<decltype(x)>;
        return compare(x, std::get<M>(b));
      },
      a);
}

#define SIMTLAB_INSTANTIATE(T)                                                         \
  template Matrix<T> make_matrix<T>(std::size_t, std::size_t, const Fill&);            \
  template bool bitwise_equal<T>(const Matrix<T>&, const Matrix<T>&) noexcept;         \
  template ErrorMetric compare<T>(const Matrix<T>&, const Matrix<T>&);

SIMTLAB_INSTANTIATE(float)
SIMTLAB_INSTANTIATE(double)
SIMTLAB_INSTANTIATE(c64)

#undef SIMTLAB_INSTANTIATE

}  // namespace simtlab

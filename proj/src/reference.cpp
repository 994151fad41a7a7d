#include "simtlab/reference.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace simtlab {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

template <Scalar T>
void require_same_shape(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("shape mismatch: " + shape(a.rows(), a.cols()) + " vs " +
                                shape(b.rows(), b.cols()));
  }
}

void require_same_kind(const AnyMatrix& a, const AnyMatrix& b) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("kind mismatch: " + std::string(to_string(kind_of(a))) +
                                " vs " + std::string(to_string(kind_of(b))));
  }
}

template <class F>
AnyMatrix visit_pair(const AnyMatrix& a, const AnyMatrix& b, F&& f) {
  require_same_kind(a, b);
  return std::visit(
      [&](const auto& x) -> AnyMatrix {
        using M = std::decay_t<decltype(x)>;
        return f(x, std::get<M>(b));
      },
      a);
}

template <Scalar T>
void add_into(const simd::RowOps<T>& ops, ElementOp op, const Matrix<T>& x,
              const Matrix<T>& y, Matrix<T>& out) {
  const auto fn = op == ElementOp::add ? ops.add : ops.sub;
  fn(x.data().data(), y.data().data(), out.data().data(), out.size());
}

template <RealScalar T>
class Strassen {
 public:
  Strassen(std::size_t cutoff, OpCounter* counter)
      : cutoff_(cutoff), counter_(counter), ops_(simd::row_ops<T>()) {}

  Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
    const std::size_t n = a.rows();
    if (n <= cutoff_) return matmul_sequential(a, b, counter_);

    const std::size_t h = n / 2;
    const auto a11 = quadrant(a, 0, 0), a12 = quadrant(a, 0, h);
    const auto a21 = quadrant(a, h, 0), a22 = quadrant(a, h, h);
    const auto b11 = quadrant(b, 0, 0), b12 = quadrant(b, 0, h);
    const auto b21 = quadrant(b, h, 0), b22 = quadrant(b, h, h);

    const auto m1 = multiply(combine(a11, ElementOp::add, a22), combine(b11, ElementOp::add, b22));
    const auto m2 = multiply(combine(a21, ElementOp::add, a22), b11);
    const auto m3 = multiply(a11, combine(b12, ElementOp::sub, b22));
    const auto m4 = multiply(a22, combine(b21, ElementOp::sub, b11));
    const auto m5 = multiply(combine(a11, ElementOp::add, a12), b22);
    const auto m6 = multiply(combine(a21, ElementOp::sub, a11), combine(b11, ElementOp::add, b12));
    const auto m7 = multiply(combine(a12, ElementOp::sub, a22), combine(b21, ElementOp::add, b22));

    // c11 = m1 + m4 - m5 + m7, c12 = m3 + m5, c21 = m2 + m4, c22 = m1 - m2 + m3 + m6
    auto c11 = combine(m1, ElementOp::add, m4);
    accumulate(c11, ElementOp::sub, m5);
    accumulate(c11, ElementOp::add, m7);
    const auto c12 = combine(m3, ElementOp::add, m5);
    const auto c21 = combine(m2, ElementOp::add, m4);
    auto c22 = combine(m1, ElementOp::sub, m2);
    accumulate(c22, ElementOp::add, m3);
    accumulate(c22, ElementOp::add, m6);

    Matrix<T> c(n, n);
    place(c, c11, 0, 0);
    place(c, c12, 0, h);
    place(c, c21, h, 0);
    place(c, c22, h, h);
    return c;
  }

 private:
  static Matrix<T> quadrant(const Matrix<T>& m, std::size_t r0, std::size_t c0) {
    const std::size_t h = m.rows() / 2;
    Matrix<T> q(h, h);
    for (std::size_t i = 0; i < h; ++i) {
      const auto src = m.row(r0 + i).subspan(c0, h);
      std::copy(src.begin(), src.end(), q.row(i).begin());
    }
    return q;
  }

  static void place(Matrix<T>& dst, const Matrix<T>& q, std::size_t r0, std::size_t c0) {
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const auto src = q.row(i);
      std::copy(src.begin(), src.end(), dst.row(r0 + i).begin() + static_cast<std::ptrdiff_t>(c0));
    }
  }

  Matrix<T> combine(const Matrix<T>& x, ElementOp op, const Matrix<T>& y) {
    Matrix<T> out(x.rows(), x.cols());
    add_into(ops_, op, x, y, out);
    tally(out.size());
    return out;
  }

  void accumulate(Matrix<T>& x, ElementOp op, const Matrix<T>& y) {
    add_into(ops_, op, x, y, x);
    tally(x.size());
  }

  void tally(std::size_t n) {
    if (counter_ != nullptr) counter_->additions += n;
  }

  std::size_t cutoff_;
  OpCounter* counter_;
  const simd::RowOps<T>& ops_;
};

}  // namespace

template <Scalar T>
Matrix<T> matmul_sequential(const Matrix<T>& a, const Matrix<T>& b, simd::Isa isa,
                            OpCounter* counter) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("inner dimension mismatch: " + shape(a.rows(), a.cols()) +
                                " * " + shape(b.rows(), b.cols()));
  }
  const auto& ops = simd::row_ops<T>(isa);
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  Matrix<T> c(a.rows(), cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T* crow = c.row(i).data();
    for (std::size_t r = 0; r < inner; ++r) ops.axpy(crow, a(i, r), b.row(r).data(), cols);
  }
  if (counter != nullptr) {
    const std::uint64_t terms = static_cast<std::uint64_t>(a.rows()) * inner * cols;
    counter->multiplies += terms;
    counter->additions += terms;
  }
  return c;
}

template <Scalar T>
Matrix<T> matmul_sequential(const Matrix<T>& a, const Matrix<T>& b, OpCounter* counter) {
  return matmul_sequential(a, b, simd::active_isa(), counter);
}

AnyMatrix matmul_sequential(const AnyMatrix& a, const AnyMatrix& b, OpCounter* counter) {
  return visit_pair(a, b, [&](const auto& x, const auto& y) -> AnyMatrix {
    return matmul_sequential(x, y, counter);
  });
}

template <Scalar T>
Matrix<T> elementwise(const Matrix<T>& a, const Matrix<T>& b, ElementOp op,
                      OpCounter* counter) {
  require_same_shape(a, b);
  Matrix<T> c(a.rows(), a.cols());
  add_into(simd::row_ops<T>(), op, a, b, c);
  if (counter != nullptr) counter->additions += c.size();
  return c;
}

AnyMatrix elementwise(const AnyMatrix& a, const AnyMatrix& b, ElementOp op,
                      OpCounter* counter) {
  return visit_pair(a, b, [&](const auto& x, const auto& y) -> AnyMatrix {
    return elementwise(x, y, op, counter);
  });
}

template <Scalar T>
std::vector<T> matmul_diagonal(std::span<const T> diag_a, std::span<const T> diag_b,
                               OpCounter* counter) {
  if (diag_a.size() != diag_b.size()) {
    throw std::invalid_argument("diagonal length mismatch: " + std::to_string(diag_a.size()) +
                                " vs " + std::to_string(diag_b.size()));
  }
  std::vector<T> out(diag_a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = mul(diag_a[k], diag_b[k]);
  if (counter != nullptr) counter->multiplies += out.size();
  return out;
}

template <RealScalar T>
Matrix<T> matmul_strassen(const Matrix<T>& a, const Matrix<T>& b, StrassenConfig cfg,
                          OpCounter* counter) {
  if (cfg.cutoff == 0) throw std::invalid_argument("Strassen cutoff must be >= 1");
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("Strassen requires square operands, got " +
                                shape(a.rows(), a.cols()) + " and " + shape(b.rows(), b.cols()));
  }
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("Strassen operand sides differ: " + std::to_string(a.rows()) +
                                " vs " + std::to_string(b.rows()));
  }
  if (!std::has_single_bit(a.rows())) {
    throw std::invalid_argument("Strassen requires a power-of-two side, got " +
                                std::to_string(a.rows()));
  }
  return Strassen<T>(cfg.cutoff, counter).multiply(a, b);
}

AnyMatrix matmul_strassen(const AnyMatrix& a, const AnyMatrix& b, StrassenConfig cfg,
                          OpCounter* counter) {
  return visit_pair(a, b, [&](const auto& x, const auto& y) -> AnyMatrix {
    using T = typename std::decay_t<decltype(x)>::value_type;
    if constexpr (RealScalar<T>) {
      return matmul_strassen(x, y, cfg, counter);
    } else {
      throw std::invalid_argument("Strassen supports f32 and f64 only, got " +
                                  std::string(to_string(Matrix<T>::kind)));
    }
  });
}

#define SIMTLAB_INSTANTIATE(T)                                                                \
  template Matrix<T> matmul_sequential<T>(const Matrix<T>&, const Matrix<T>&, OpCounter*);    \
  template Matrix<T> matmul_sequential<T>(const Matrix<T>&, const Matrix<T>&, simd::Isa,      \
                                          OpCounter*);                                        \
  template Matrix<T> elementwise<T>(const Matrix<T>&, const Matrix<T>&, ElementOp,           \
                                    OpCounter*);                                              \
  template std::vector<T> matmul_diagonal<T>(std::span<const T>, std::span<const T>,          \
                                             OpCounter*);

SIMTLAB_INSTANTIATE(float)
SIMTLAB_INSTANTIATE(double)
SIMTLAB_INSTANTIATE(c64)
#undef SIMTLAB_INSTANTIATE

template Matrix<float> matmul_strassen<float>(const Matrix<float>&, const Matrix<float>&,
                                              StrassenConfig, OpCounter*);
template Matrix<double> matmul_strassen<double>(const Matrix<double>&, const Matrix<double>&,
                                                StrassenConfig, OpCounter*);

}  // namespace simtlab

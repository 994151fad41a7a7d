#include "simtlab/kernels.hpp"

#include <stdexcept>
#include <string>

namespace simtlab::kernels {

namespace {

using simt::Dim2;
using simt::LaunchConfig;
using simt::LaunchError;
using simt::Violation;

void require_valid(const LaunchConfig& config) {
  if (auto v = simt::validate(config); !v.empty()) throw LaunchError(std::move(v));
}

[[noreturn]] void reject(std::string rule, std::string message) {
  throw LaunchError({{std::move(rule), std::move(message)}});
}

template <Scalar T>
void require_operands(const MatmulOperands<T>& in, std::span<T> c) {
  if (in.rows == 0 || in.inner == 0 || in.cols == 0) {
    throw std::invalid_argument("matmul operands must have positive dimensions");
  }
  if (in.a.size() != in.rows * in.inner || in.b.size() != in.inner * in.cols ||
      c.size() != in.rows * in.cols) {
    throw std::invalid_argument("matmul operand storage does not match dimensions");
  }
}

template <Scalar T>
void require_inner(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("inner dimension mismatch: " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()));
  }
}

template <Scalar T>
MatmulOperands<T> operands(const Matrix<T>& a, const Matrix<T>& b) {
  return {a.data(), b.data(), a.rows(), a.cols(), b.cols()};
}

void require_divisible(std::size_t rows, std::size_t inner, std::size_t cols,
                       std::size_t side) {
  if (rows % side != 0 || inner % side != 0 || cols % side != 0) {
    reject("divisibility", "tiled kernel requires rows, inner and cols to be multiples of "
                           "block side " + std::to_string(side) + ", got " +
                               std::to_string(rows) + "x" + std::to_string(inner) + "x" +
                               std::to_string(cols));
  }
}

template <class F>
AnyMatrix visit_pair(const AnyMatrix& a, const AnyMatrix& b, F&& f) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("kind mismatch: " + std::string(to_string(kind_of(a))) +
                                " vs " + std::string(to_string(kind_of(b))));
  }
  return std::visit(
      [&](const auto& x) -> AnyMatrix {
        using M = std::decay_t<decltype(x)>;
        return f(x, std::get<M>(b));
      },
      a);
}

}  // namespace

LaunchConfig plan_single_block(std::size_t rows, std::size_t cols, const KernelOptions& opts) {
  LaunchConfig config{{1, 1}, {cols, rows}, 0, opts.profile};
  if (rows * cols > opts.profile.max_threads_per_block) {
    reject("threads_per_block", "block cap " + std::to_string(opts.profile.max_threads_per_block) +
                                    ": single block needs " + std::to_string(rows * cols) +
                                    " threads for a " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " output");
  }
  require_valid(config);
  return config;
}

LaunchConfig plan_global(std::size_t rows, std::size_t cols, const KernelOptions& opts) {
  const Dim2 block{opts.block_side, opts.block_side};
  LaunchConfig config{simt::grid_for(rows, cols, block), block, 0, opts.profile};
  require_valid(config);
  return config;
}

LaunchConfig plan_tiled(std::size_t rows, std::size_t inner, std::size_t cols,
                        std::size_t elem_bytes, const KernelOptions& opts) {
  const std::size_t side = opts.block_side;
  if (side == 0) reject("block_dim", "block side must be >= 1");
  require_divisible(rows, inner, cols, side);
  const Dim2 block{side, side};
  LaunchConfig config{simt::grid_for(rows, cols, block), block,
                      simt::shared_budget(side, 2, elem_bytes), opts.profile};
  require_valid(config);
  return config;
}

LaunchConfig plan_elementwise(std::size_t rows, std::size_t cols, const KernelOptions& opts) {
  return plan_global(rows, cols, opts);
}

template <Scalar T>
OpCounter launch_matmul_single_block(const LaunchConfig& config, MatmulOperands<T> in,
                                     std::span<T> c, simt::LaunchOptions options) {
  require_operands(in, c);
  if (config.grid != Dim2{1, 1}) {
    reject("grid_dim", "single-block kernel needs grid (1,1), got " + simt::to_string(config.grid));
  }
  if (config.block.x < in.cols || config.block.y < in.rows) {
    reject("block_dim", "block " + simt::to_string(config.block) + " does not cover a " +
                            std::to_string(in.rows) + "x" + std::to_string(in.cols) + " output");
  }
  return simt::launch(
      config,
      [&](simt::KernelContext& ctx) {
        return matmul_single_block_kernel<T>(ctx, in, DenseStore<T>{c});
      },
      options);
}

template <Scalar T>
OpCounter launch_matmul_global(const LaunchConfig& config, MatmulOperands<T> in, std::span<T> c,
                               simt::LaunchOptions options) {
  require_operands(in, c);
  return simt::launch(
      config,
      [&](simt::KernelContext& ctx) { return matmul_global_kernel<T>(ctx, in, DenseStore<T>{c}); },
      options);
}

template <Scalar T>
OpCounter launch_matmul_tiled(const LaunchConfig& config, MatmulOperands<T> in, std::span<T> c,
                              simt::LaunchOptions options) {
  require_operands(in, c);
  const std::size_t side = config.block.x;
  if (config.block.y != side) {
    reject("block_shape", "tiled kernel needs a square block, got " + simt::to_string(config.block));
  }
  if (side == 0) reject("block_dim", "block side must be >= 1");
  require_divisible(in.rows, in.inner, in.cols, side);
  const Dim2 needed_grid{in.cols / side, in.rows / side};
  if (config.grid != needed_grid) {
    reject("grid_dim", "tiled kernel needs grid " + simt::to_string(needed_grid) + ", got " +
                           simt::to_string(config.grid));
  }
  const std::size_t budget = simt::shared_budget(side, 2, sizeof(T));
  if (config.shared_bytes < budget) {
    reject("shared_bytes", "tiled kernel needs " + std::to_string(budget) + " B shared, got " +
                               std::to_string(config.shared_bytes) + " B");
  }
  return simt::launch(
      config,
      [&](simt::KernelContext& ctx) { return matmul_tiled_kernel<T>(ctx, in, DenseStore<T>{c}); },
      options);
}

template <Scalar T>
OpCounter launch_elementwise(const LaunchConfig& config, ElementwiseOperands<T> in, ElementOp op,
                             std::span<T> c, simt::LaunchOptions options) {
  if (in.a.size() != in.rows * in.cols || in.b.size() != in.a.size() || c.size() != in.a.size()) {
    throw std::invalid_argument("elementwise operand storage does not match dimensions");
  }
  return simt::launch(
      config,
      [&](simt::KernelContext& ctx) {
        return elementwise_kernel<T>(ctx, in, op, DenseStore<T>{c});
      },
      options);
}

template <Scalar T>
Matrix<T> run_matmul_single_block(const Matrix<T>& a, const Matrix<T>& b,
                                  const KernelOptions& opts, OpCounter* counter) {
  require_inner(a, b);
  const auto config = plan_single_block(a.rows(), b.cols(), opts);
  Matrix<T> c(a.rows(), b.cols());
  const auto ops = launch_matmul_single_block(config, operands(a, b), c.data(), {opts.workers});
  if (counter != nullptr) *counter += ops;
  return c;
}

template <Scalar T>
Matrix<T> run_matmul_global(const Matrix<T>& a, const Matrix<T>& b, const KernelOptions& opts,
                            OpCounter* counter) {
  require_inner(a, b);
  const auto config = plan_global(a.rows(), b.cols(), opts);
  Matrix<T> c(a.rows(), b.cols());
  const auto ops = launch_matmul_global(config, operands(a, b), c.data(), {opts.workers});
  if (counter != nullptr) *counter += ops;
  return c;
}

template <Scalar T>
Matrix<T> run_matmul_tiled(const Matrix<T>& a, const Matrix<T>& b, const KernelOptions& opts,
                           OpCounter* counter) {
  require_inner(a, b);
  const auto config = plan_tiled(a.rows(), a.cols(), b.cols(), sizeof(T), opts);
  Matrix<T> c(a.rows(), b.cols());
  const auto ops = launch_matmul_tiled(config, operands(a, b), c.data(), {opts.workers});
  if (counter != nullptr) *counter += ops;
  return c;
}

template <Scalar T>
Matrix<T> run_elementwise(const Matrix<T>& a, const Matrix<T>& b, ElementOp op,
                          const KernelOptions& opts, OpCounter* counter) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("shape mismatch: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  const auto config = plan_elementwise(a.rows(), a.cols(), opts);
  Matrix<T> c(a.rows(), a.cols());
  const auto ops = launch_elementwise(config, ElementwiseOperands<T>{a.data(), b.data(), a.rows(), a.cols()},
                                      op, c.data(), {opts.workers});
  if (counter != nullptr) *counter += ops;
  return c;
}

AnyMatrix run_matmul(MatmulKernel kernel, const AnyMatrix& a, const AnyMatrix& b,
                     const KernelOptions& opts, OpCounter* counter) {
  return visit_pair(a, b, [&](const auto& x, const auto& y) -> AnyMatrix {
    switch (kernel) {
      case MatmulKernel::single_block: return run_matmul_single_block(x, y, opts, counter);
      case MatmulKernel::global: return run_matmul_global(x, y, opts, counter);
      case MatmulKernel::tiled: return run_matmul_tiled(x, y, opts, counter);
    }
    throw std::invalid_argument("unknown matmul kernel");
  });
}

AnyMatrix run_elementwise(const AnyMatrix& a, const AnyMatrix& b, ElementOp op,
                          const KernelOptions& opts, OpCounter* counter) {
  return visit_pair(a, b, [&](const auto& x, const auto& y) -> AnyMatrix {
    return run_elementwise(x, y, op, opts, counter);
  });
}

#define SIMTLAB_INSTANTIATE(T)                                                                 \
  template OpCounter launch_matmul_single_block<T>(const LaunchConfig&, MatmulOperands<T>,     \
                                                   std::span<T>, simt::LaunchOptions);         \
  template OpCounter launch_matmul_global<T>(const LaunchConfig&, MatmulOperands<T>,           \
                                             std::span<T>, simt::LaunchOptions);               \
  template OpCounter launch_matmul_tiled<T>(const LaunchConfig&, MatmulOperands<T>,            \
                                            std::span<T>, simt::LaunchOptions);                \
  template OpCounter launch_elementwise<T>(const LaunchConfig&, ElementwiseOperands<T>,        \
                                           ElementOp, std::span<T>, simt::LaunchOptions);      \
  template Matrix<T> run_matmul_single_block<T>(const Matrix<T>&, const Matrix<T>&,            \
                                                const KernelOptions&, OpCounter*);             \
  template Matrix<T> run_matmul_global<T>(const Matrix<T>&, const Matrix<T>&,                  \
                                          const KernelOptions&, OpCounter*);                   \
  template Matrix<T> run_matmul_tiled<T>(const Matrix<T>&, const Matrix<T>&,                   \
                                         const KernelOptions&, OpCounter*);                    \
  template Matrix<T> run_elementwise<T>(const Matrix<T>&, const Matrix<T>&, ElementOp,         \
                                        const KernelOptions&, OpCounter*);

SIMTLAB_INSTANTIATE(float)
SIMTLAB_INSTANTIATE(double)
SIMTLAB_INSTANTIATE(c64)
#undef SIMTLAB_INSTANTIATE

}  // namespace simtlab::kernels

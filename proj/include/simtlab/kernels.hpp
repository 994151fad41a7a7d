#pragma once

// Matrix kernels written against the SIMT engine.
//
// Index names follow the classic CUDA formulation: `inner` is the width of A
// (size_A), `cols` the width of B and C (size_B). Every kernel accumulates
// into a thread-local value in ascending inner index and writes its output
// element exactly once, so results match matmul_sequential bit for bit.

#include <cstddef>
#include <span>

#include "simtlab/engine.hpp"
#include "simtlab/matrix.hpp"
#include "simtlab/op_counter.hpp"
#include "simtlab/reference.hpp"

namespace simtlab::kernels {

template <Scalar T>
struct MatmulOperands {
  std::span<const T> a;  // rows x inner
  std::span<const T> b;  // inner x cols
  std::size_t rows = 0;
  std::size_t inner = 0;
  std::size_t cols = 0;
};

template <Scalar T>
struct ElementwiseOperands {
  std::span<const T> a;
  std::span<const T> b;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Default output sink: plain writes into C.
template <Scalar T>
struct DenseStore {
  std::span<T> c;
  void store(std::size_t index, T value) const noexcept { c[index] = value; }
};

/// Hooks into the tiled kernel's load and read steps; the default does nothing.
struct NoTileProbe {
  void loaded(const simt::KernelContext&, std::size_t /*tile*/, std::size_t /*slot*/) const noexcept {}
  void read(const simt::KernelContext&, std::size_t /*tile*/, std::size_t /*a_slot*/,
            std::size_t /*b_slot*/) const noexcept {}
};

/// One block covers the whole output; thread (x, y) owns C[y][x].
template <Scalar T, class Store = DenseStore<T>>
simt::ThreadTask matmul_single_block_kernel(simt::KernelContext& ctx, MatmulOperands<T> in,
                                            Store out) {
  const std::size_t thread_x = ctx.thread_idx().x;
  const std::size_t thread_y = ctx.thread_idx().y;
  if (thread_x < in.cols && thread_y < in.rows) {
    T value{};
    for (std::size_t i = 0; i < in.inner; ++i) {
      value = add(value, mul(in.a[thread_y * in.inner + i], in.b[i * in.cols + thread_x]));
    }
    out.store(thread_y * in.cols + thread_x, value);
    ctx.ops() += {in.inner, in.inner};
  }
  co_return;
}

/// Multi-block kernel reading operands straight from global memory. Global
/// coordinates are block_idx * block_dim + thread_idx; threads past the edge
/// of C do nothing.
template <Scalar T, class Store = DenseStore<T>>
simt::ThreadTask matmul_global_kernel(simt::KernelContext& ctx, MatmulOperands<T> in,
                                      Store out) {
  const std::size_t thread_x = ctx.block_idx().x * ctx.block_dim().x + ctx.thread_idx().x;
  const std::size_t thread_y = ctx.block_idx().y * ctx.block_dim().y + ctx.thread_idx().y;
  if (thread_x < in.cols && thread_y < in.rows) {
    T value{};
    for (std::size_t i = 0; i < in.inner; ++i) {
      value = add(value, mul(in.a[thread_y * in.inner + i], in.b[i * in.cols + thread_x]));
    }
    out.store(thread_y * in.cols + thread_x, value);
    ctx.ops() += {in.inner, in.inner};
  }
  co_return;
}

/// Shared-memory tiled kernel. Square blocks of side s; rows, inner and cols
/// must be multiples of s (loads are unguarded). The scratch buffer holds the
/// A tile in its first s*s elements and the B tile in the next s*s.
///
/// Per inner tile: every thread stages one element of A and one of B, all
/// threads meet at a barrier, each accumulates s products from the tiles, and
/// a second barrier keeps the next load from overwriting tiles still in use.
template <Scalar T, class Store = DenseStore<T>, class Probe = NoTileProbe>
simt::ThreadTask matmul_tiled_kernel(simt::KernelContext& ctx, MatmulOperands<T> in, Store out,
                                     Probe probe = {}) {
  const std::size_t side = ctx.block_dim().x;
  const std::size_t block_x = ctx.block_idx().x;
  const std::size_t block_y = ctx.block_idx().y;
  const std::size_t thread_x = ctx.thread_idx().x;
  const std::size_t thread_y = ctx.thread_idx().y;

  const auto a_shared = ctx.shared_array<T>(0, side * side);
  const auto b_shared = ctx.shared_array<T>(side * side * sizeof(T), side * side);

  const std::size_t a_start = in.inner * side * block_y;
  const std::size_t a_stop = a_start + in.inner - 1;
  const std::size_t a_step = side;
  const std::size_t b_start = side * block_x;
  const std::size_t b_step = side * in.cols;

  T value{};
  std::size_t tile = 0;
  for (std::size_t a = a_start, b = b_start; a <= a_stop; a += a_step, b += b_step, ++tile) {
    const std::size_t slot = thread_y * side + thread_x;
    a_shared[slot] = in.a[a + in.inner * thread_y + thread_x];
    b_shared[slot] = in.b[b + in.cols * thread_y + thread_x];
    probe.loaded(ctx, tile, slot);

    co_await ctx.barrier();

    for (std::size_t k = 0; k < side; ++k) {
      probe.read(ctx, tile, thread_y * side + k, k * side + thread_x);
      value = add(value, mul(a_shared[thread_y * side + k], b_shared[k * side + thread_x]));
    }
    ctx.ops() += {side, side};

    co_await ctx.barrier();
  }

  const std::size_t c = in.cols * side * block_y + side * block_x;
  out.store(c + in.cols * thread_y + thread_x, value);
}

/// One thread per element; one addition counted per in-range element.
template <Scalar T, class Store = DenseStore<T>>
simt::ThreadTask elementwise_kernel(simt::KernelContext& ctx, ElementwiseOperands<T> in,
                                    ElementOp op, Store out) {
  const std::size_t col = ctx.block_idx().x * ctx.block_dim().x + ctx.thread_idx().x;
  const std::size_t row = ctx.block_idx().y * ctx.block_dim().y + ctx.thread_idx().y;
  if (col < in.cols && row < in.rows) {
    const std::size_t idx = row * in.cols + col;
    out.store(idx, op == ElementOp::add ? add(in.a[idx], in.b[idx]) : sub(in.a[idx], in.b[idx]));
    ctx.ops().additions += 1;
  }
  co_return;
}

// ---------------------------------------------------------------------------
// Launch planning. Each plan_* returns the LaunchConfig the corresponding
// run_* uses, or throws simt::LaunchError naming the violated rule
// (threads_per_block, shared_bytes, divisibility, block_shape, ...).

struct KernelOptions {
  std::size_t block_side = 16;
  simt::DeviceProfile profile = simt::DeviceProfile::modern();
  std::size_t workers = 0;  // 0: simt::default_workers()
};

/// Grid (1,1), block (cols, rows).
simt::LaunchConfig plan_single_block(std::size_t rows, std::size_t cols,
                                     const KernelOptions& opts);
/// grid_for(rows, cols, (s, s)).
simt::LaunchConfig plan_global(std::size_t rows, std::size_t cols, const KernelOptions& opts);
/// grid_for with square blocks, shared_budget(s, 2, elem_bytes) scratch, and
/// the divisibility rule on rows, inner and cols.
simt::LaunchConfig plan_tiled(std::size_t rows, std::size_t inner, std::size_t cols,
                              std::size_t elem_bytes, const KernelOptions& opts);
simt::LaunchConfig plan_elementwise(std::size_t rows, std::size_t cols,
                                    const KernelOptions& opts);

// Launch against an explicit config. These check the kernel-specific rules
// (single block: grid (1,1) covering C; tiled: square block, divisibility,
// scratch large enough) before handing off to simt::launch.

template <Scalar T>
OpCounter launch_matmul_single_block(const simt::LaunchConfig& config, MatmulOperands<T> in,
                                     std::span<T> c, simt::LaunchOptions options = {});
template <Scalar T>
OpCounter launch_matmul_global(const simt::LaunchConfig& config, MatmulOperands<T> in,
                               std::span<T> c, simt::LaunchOptions options = {});
template <Scalar T>
OpCounter launch_matmul_tiled(const simt::LaunchConfig& config, MatmulOperands<T> in,
                              std::span<T> c, simt::LaunchOptions options = {});
template <Scalar T>
OpCounter launch_elementwise(const simt::LaunchConfig& config, ElementwiseOperands<T> in,
                             ElementOp op, std::span<T> c, simt::LaunchOptions options = {});

// Matrix-level conveniences: plan, allocate C, launch.

template <Scalar T>
Matrix<T> run_matmul_single_block(const Matrix<T>& a, const Matrix<T>& b,
                                  const KernelOptions& opts = {}, OpCounter* counter = nullptr);
template <Scalar T>
Matrix<T> run_matmul_global(const Matrix<T>& a, const Matrix<T>& b,
                            const KernelOptions& opts = {}, OpCounter* counter = nullptr);
template <Scalar T>
Matrix<T> run_matmul_tiled(const Matrix<T>& a, const Matrix<T>& b,
                           const KernelOptions& opts = {}, OpCounter* counter = nullptr);
template <Scalar T>
Matrix<T> run_elementwise(const Matrix<T>& a, const Matrix<T>& b, ElementOp op,
                          const KernelOptions& opts = {}, OpCounter* counter = nullptr);

enum class MatmulKernel { single_block, global, tiled };

AnyMatrix run_matmul(MatmulKernel kernel, const AnyMatrix& a, const AnyMatrix& b,
                     const KernelOptions& opts = {}, OpCounter* counter = nullptr);
AnyMatrix run_elementwise(const AnyMatrix& a, const AnyMatrix& b, ElementOp op,
                          const KernelOptions& opts = {}, OpCounter* counter = nullptr);

}  // namespace simtlab::kernels

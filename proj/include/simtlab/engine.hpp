#pragma once

// Host-side SIMT execution model.
//
// A launch runs a grid of blocks; each block runs block.x * block.y logical
// threads. A kernel is a coroutine returning ThreadTask, invoked once per
// logical thread with that thread's KernelContext. Threads of a block share a
// zero-initialized scratch buffer and synchronize with
//
//     co_await ctx.barrier();
//
// Within a block, threads execute in lockstep phases on one host thread: each
// phase resumes every live thread in (y, x) order until it reaches the next
// barrier or returns. A phase that ends with some threads returned and others
// waiting, or with threads waiting at different barrier call sites, is a
// deadlock and raises BarrierDeadlock. Blocks are independent and are spread
// over a pool of host workers.

#include <atomic>
#include <coroutine>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <source_location>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "simtlab/op_counter.hpp"

namespace simtlab::simt {

struct Dim2 {
  std::size_t x = 1;
  std::size_t y = 1;

  constexpr std::size_t count() const noexcept { return x * y; }
  friend constexpr bool operator==(const Dim2&, const Dim2&) = default;
};

std::string to_string(Dim2 d);

struct DeviceProfile {
  std::string label;
  std::size_t max_threads_per_block = 0;
  std::size_t shared_mem_bytes_per_block = 0;

  /// 512 threads, 16 KiB shared per block.
  static DeviceProfile legacy();
  /// 1024 threads, 48 KiB shared per block.
  static DeviceProfile modern();
};

/// "legacy" or "modern"; throws std::invalid_argument otherwise.
DeviceProfile profile_by_name(std::string_view name);

struct LaunchConfig {
  Dim2 grid;
  Dim2 block;
  std::size_t shared_bytes = 0;
  DeviceProfile profile = DeviceProfile::modern();
};

struct Violation {
  std::string rule;     // grid_dim, block_dim, threads_per_block, shared_bytes, profile
  std::string message;  // carries the offending numbers
};

/// Every violated LaunchConfig invariant; empty means the config is valid.
std::vector<Violation> validate(const LaunchConfig& config);

/// tiles * block_side^2 * elem_bytes. Throws std::invalid_argument on zero.
std::size_t shared_budget(std::size_t block_side, std::size_t tiles, std::size_t elem_bytes);

/// One logical thread per output element: (ceil(cols / bx), ceil(rows / by)).
Dim2 grid_for(std::size_t rows, std::size_t cols, Dim2 block);

/// Worker count from SIMT_WORKERS, else the host's hardware concurrency.
/// Throws std::invalid_argument if SIMT_WORKERS is set but not a positive
/// integer.
std::size_t default_workers();

class LaunchError : public std::runtime_error {
 public:
  explicit LaunchError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// A kernel body threw; carries the coordinates of the failing thread.
class KernelFault : public std::runtime_error {
 public:
  KernelFault(Dim2 block, Dim2 thread, const std::string& what);
  Dim2 block() const noexcept { return block_; }
  Dim2 thread() const noexcept { return thread_; }

 private:
  Dim2 block_;
  Dim2 thread_;
};

/// Non-uniform barrier use inside a block. thread() names one of the threads
/// that diverged from the rest.
class BarrierDeadlock : public KernelFault {
 public:
  using KernelFault::KernelFault;
};

class KernelContext;

/// Coroutine handle owned by the engine for one logical thread.
class ThreadTask {
 public:
  struct promise_type {
    std::exception_ptr error;

    ThreadTask get_return_object() noexcept {
      return ThreadTask(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() noexcept {}
    void unhandled_exception() noexcept { error = std::current_exception(); }

    // Frames are recycled through a per-host-thread free list.
    static void* operator new(std::size_t size);
    static void operator delete(void* ptr, std::size_t size) noexcept;
  };

  ThreadTask() = default;
  ThreadTask(ThreadTask&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  ThreadTask& operator=(ThreadTask&& other) noexcept {
    if (this != &other) {
      reset();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  ThreadTask(const ThreadTask&) = delete;
  ThreadTask& operator=(const ThreadTask&) = delete;
  ~ThreadTask() { reset(); }

  bool valid() const noexcept { return static_cast<bool>(handle_); }
  bool done() const noexcept { return handle_.done(); }
  void resume() const { handle_.resume(); }
  std::exception_ptr error() const noexcept { return handle_.promise().error; }

  void reset() noexcept {
    if (handle_) handle_.destroy();
    handle_ = {};
  }

 private:
  explicit ThreadTask(std::coroutine_handle<promise_type> h) noexcept : handle_(h) {}
  std::coroutine_handle<promise_type> handle_;
};

struct BarrierSite {
  const char* file = "";
  std::uint_least32_t line = 0;
  std::uint_least32_t column = 0;

  friend bool operator==(const BarrierSite& a, const BarrierSite& b) noexcept {
    return a.line == b.line && a.column == b.column && std::string_view(a.file) == b.file;
  }
};

/// State shared by all threads of the block currently executing.
struct BlockState {
  Dim2 block_idx;
  Dim2 block_dim;
  Dim2 grid_dim;
  std::span<std::byte> shared;
  OpCounter ops;
};

/// Per-logical-thread view of the launch.
class KernelContext {
 public:
  struct BarrierAwaiter {
    KernelContext* ctx;
    BarrierSite site;

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<>) const noexcept {
      ctx->waiting_ = true;
      ctx->site_ = site;
    }
    void await_resume() const noexcept {}
  };

  KernelContext(BlockState* block, Dim2 thread) noexcept : block_(block), thread_(thread) {}

  Dim2 block_idx() const noexcept { return block_->block_idx; }
  Dim2 thread_idx() const noexcept { return thread_; }
  Dim2 block_dim() const noexcept { return block_->block_dim; }
  Dim2 grid_dim() const noexcept { return block_->grid_dim; }

  /// The block's scratch buffer, identical storage for every thread of the
  /// block and never visible to another block.
  std::span<std::byte> shared() const noexcept { return block_->shared; }

  /// count elements of T starting byte_offset bytes into the scratch buffer.
  /// Throws std::out_of_range if the region exceeds the launch's request.
  template <class T>
  std::span<T> shared_array(std::size_t byte_offset, std::size_t count) const {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto buf = block_->shared;
    if (byte_offset % alignof(T) != 0 || byte_offset > buf.size() ||
        count > (buf.size() - byte_offset) / sizeof(T)) {
      throw std::out_of_range("shared region [" + std::to_string(byte_offset) + ", +" +
                              std::to_string(count * sizeof(T)) + ") outside " +
                              std::to_string(buf.size()) + " B scratch");
    }
    return {reinterpret_cast<T*>(buf.data() + byte_offset), count};
  }

  /// Block-wide tally; threads of one block never run concurrently.
  OpCounter& ops() const noexcept { return block_->ops; }

  [[nodiscard]] BarrierAwaiter barrier(
      std::source_location loc = std::source_location::current()) noexcept {
    return {this, {loc.file_name(), loc.line(), loc.column()}};
  }

 private:
  friend class BlockRunner;

  BlockState* block_;
  Dim2 thread_;
  bool waiting_ = false;
  BarrierSite site_;
};

/// Non-owning reference to a callable ThreadTask(KernelContext&).
class KernelRef {
 public:
  // The referenced callable must outlive the launch; a temporary passed
  // directly to launch() does.
  template <class F>
    requires std::is_invocable_r_v<ThreadTask, std::remove_reference_t<F>&, KernelContext&> &&
             (!std::is_same_v<std::remove_cvref_t<F>, KernelRef>)
  KernelRef(F&& f) noexcept  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* o, KernelContext& ctx) {
          return (*static_cast<std::remove_reference_t<F>*>(o))(ctx);
        }) {}

  ThreadTask operator()(KernelContext& ctx) const { return call_(obj_, ctx); }

 private:
  void* obj_;
  ThreadTask (*call_)(void*, KernelContext&);
};

struct LaunchOptions {
  /// 0 selects default_workers().
  std::size_t workers = 0;
};

/// Runs kernel once per (block, thread) pair and returns the summed block
/// tallies. Throws LaunchError for an invalid config, KernelFault when a
/// kernel throws, BarrierDeadlock on non-uniform barrier use.
OpCounter launch(const LaunchConfig& config, KernelRef kernel, LaunchOptions options = {});

}  // namespace simtlab::simt

#include "simtlab/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <thread>

namespace simtlab::simt {

namespace {

// Coroutine frames of one kernel all have the same size, so a handful of
// size-keyed free lists per host thread absorb nearly every allocation.
class FramePool {
 public:
  ~FramePool() {
    for (auto& bucket : buckets_) {
      for (void* p : bucket.free) ::operator delete(p);
    }
  }

  void* allocate(std::size_t size) {
    if (Bucket* b = find(size); b != nullptr && !b->free.empty()) {
      void* p = b->free.back();
      b->free.pop_back();
      return p;
    }
    return ::operator new(size);
  }

  void release(void* p, std::size_t size) noexcept {
    Bucket* b = find(size);
    if (b == nullptr && buckets_.size() < kMaxBuckets) {
      try {
        buckets_.push_back({size, {}});
        b = &buckets_.back();
      } catch (...) {
        b = nullptr;
      }
    }
    if (b != nullptr && b->free.size() < kMaxCachedPerBucket) {
      try {
        b->free.push_back(p);
        return;
      } catch (...) {
      }
    }
    ::operator delete(p);
  }

 private:
  static constexpr std::size_t kMaxBuckets = 8;
  static constexpr std::size_t kMaxCachedPerBucket = 4096;

  struct Bucket {
    std::size_t size;
    std::vector<void*> free;
  };

  Bucket* find(std::size_t size) noexcept {
    for (auto& b : buckets_) {
      if (b.size == size) return &b;
    }
    return nullptr;
  }

  std::vector<Bucket> buckets_;
};

FramePool& frame_pool() {
  thread_local FramePool pool;
  return pool;
}

std::string site_string(const BarrierSite& s) {
  return std::string(s.file) + ":" + std::to_string(s.line) + ":" + std::to_string(s.column);
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "non-standard exception";
  }
}

std::string join_messages(const std::vector<Violation>& violations) {
  std::string msg = "invalid launch configuration:";
  for (const auto& v : violations) msg += " [" + v.rule + "] " + v.message + ";";
  return msg;
}

}  // namespace

void* ThreadTask::promise_type::operator new(std::size_t size) {
  return frame_pool().allocate(size);
}

void ThreadTask::promise_type::operator delete(void* ptr, std::size_t size) noexcept {
  frame_pool().release(ptr, size);
}

std::string to_string(Dim2 d) {
  return "(" + std::to_string(d.x) + "," + std::to_string(d.y) + ")";
}

DeviceProfile DeviceProfile::legacy() { return {"legacy", 512, 16 * 1024}; }
DeviceProfile DeviceProfile::modern() { return {"modern", 1024, 48 * 1024}; }

DeviceProfile profile_by_name(std::string_view name) {
  if (name == "legacy") return DeviceProfile::legacy();
  if (name == "modern") return DeviceProfile::modern();
  throw std::invalid_argument("unknown device profile '" + std::string(name) +
                              "' (expected legacy or modern)");
}

std::vector<Violation> validate(const LaunchConfig& config) {
  std::vector<Violation> out;
  const auto& p = config.profile;
  if (p.max_threads_per_block == 0 || p.shared_mem_bytes_per_block == 0) {
    out.push_back({"profile", "profile '" + p.label + "' has a zero limit"});
  }
  if (config.grid.x == 0 || config.grid.y == 0) {
    out.push_back({"grid_dim", "grid " + to_string(config.grid) + " has a zero dimension"});
  }
  if (config.block.x == 0 || config.block.y == 0) {
    out.push_back({"block_dim", "block " + to_string(config.block) + " has a zero dimension"});
  }
  // Guard the product against overflow before comparing with the cap.
  const std::size_t bx = config.block.x;
  const std::size_t by = config.block.y;
  if (bx != 0 && by > p.max_threads_per_block / bx) {
    const bool overflow = by > SIZE_MAX / bx;
    out.push_back({"threads_per_block",
                   (overflow ? std::string("block ") + to_string(config.block)
                             : std::to_string(bx * by)) +
                       " threads > " + std::to_string(p.max_threads_per_block)});
  }
  if (config.shared_bytes > p.shared_mem_bytes_per_block) {
    out.push_back({"shared_bytes", std::to_string(config.shared_bytes) + " B shared > " +
                                       std::to_string(p.shared_mem_bytes_per_block) + " B"});
  }
  return out;
}

std::size_t shared_budget(std::size_t block_side, std::size_t tiles, std::size_t elem_bytes) {
  if (block_side == 0 || tiles == 0 || elem_bytes == 0) {
    throw std::invalid_argument("shared_budget arguments must be >= 1");
  }
  return tiles * block_side * block_side * elem_bytes;
}

Dim2 grid_for(std::size_t rows, std::size_t cols, Dim2 block) {
  if (rows == 0 || cols == 0 || block.x == 0 || block.y == 0) {
    throw std::invalid_argument("grid_for arguments must be >= 1");
  }
  return {(cols + block.x - 1) / block.x, (rows + block.y - 1) / block.y};
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SIMT_WORKERS"); env != nullptr) {
    const std::string_view text(env);
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || end != text.data() + text.size() || n == 0) {
      throw std::invalid_argument("SIMT_WORKERS must be a positive integer, got '" +
                                  std::string(text) + "'");
    }
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LaunchError::LaunchError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

KernelFault::KernelFault(Dim2 block, Dim2 thread, const std::string& what)
    : std::runtime_error("block " + to_string(block) + " thread " + to_string(thread) + ": " +
                         what),
      block_(block),
      thread_(thread) {}

// Executes whole blocks for one host worker, reusing its scratch storage.
class BlockRunner {
 public:
  BlockRunner(const LaunchConfig& config, KernelRef kernel)
      : config_(config),
        kernel_(kernel),
        // 8-byte words keep every scalar kind aligned.
        storage_((config.shared_bytes + 7) / 8) {
    state_.block_dim = config.block;
    state_.grid_dim = config.grid;
    state_.shared = std::as_writable_bytes(std::span(storage_)).first(config.shared_bytes);
    const std::size_t n = config.block.count();
    contexts_.reserve(n);
    for (std::size_t ty = 0; ty < config.block.y; ++ty) {
      for (std::size_t tx = 0; tx < config.block.x; ++tx) {
        contexts_.emplace_back(&state_, Dim2{tx, ty});
      }
    }
    tasks_.resize(n);
  }

  OpCounter run(Dim2 block_idx) {
    state_.block_idx = block_idx;
    state_.ops = {};
    std::fill(storage_.begin(), storage_.end(), 0);
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
      contexts_[t].waiting_ = false;
      tasks_[t] = kernel_(contexts_[t]);
    }
    try {
      run_phases();
    } catch (...) {
      for (auto& task : tasks_) task.reset();
      throw;
    }
    for (auto& task : tasks_) task.reset();
    return state_.ops;
  }

 private:
  void run_phases() {
    for (;;) {
      std::size_t waiting = 0;
      std::optional<std::size_t> first_waiting;
      std::optional<std::size_t> first_finished;
      for (std::size_t t = 0; t < tasks_.size(); ++t) {
        ThreadTask& task = tasks_[t];
        if (task.done()) continue;
        contexts_[t].waiting_ = false;
        task.resume();
        if (task.done()) {
          if (auto err = task.error()) {
            throw KernelFault(state_.block_idx, contexts_[t].thread_idx(), describe(err));
          }
          if (!first_finished) first_finished = t;
        } else if (!contexts_[t].waiting_) {
          throw KernelFault(state_.block_idx, contexts_[t].thread_idx(),
                            "kernel suspended on something other than barrier()");
        } else {
          ++waiting;
          if (!first_waiting) first_waiting = t;
        }
      }
      if (waiting == 0) return;
      if (first_finished) {
        const auto& w = contexts_[*first_waiting];
        throw BarrierDeadlock(
            state_.block_idx, contexts_[*first_finished].thread_idx(),
            "deadlock: thread returned while " + std::to_string(waiting) + " of " +
                std::to_string(tasks_.size()) + " threads wait at barrier " +
                site_string(w.site_) + " (first waiter thread " + to_string(w.thread_idx()) +
                ")");
      }
      const BarrierSite& site = contexts_[*first_waiting].site_;
      for (std::size_t t = 0; t < tasks_.size(); ++t) {
        if (!(contexts_[t].site_ == site)) {
          throw BarrierDeadlock(state_.block_idx, contexts_[t].thread_idx(),
                                "deadlock: thread waits at barrier " +
                                    site_string(contexts_[t].site_) + " while thread " +
                                    to_string(contexts_[*first_waiting].thread_idx()) +
                                    " waits at " + site_string(site));
        }
      }
    }
  }

  const LaunchConfig& config_;
  KernelRef kernel_;
  std::vector<std::uint64_t> storage_;
  BlockState state_;
  std::vector<KernelContext> contexts_;
  std::vector<ThreadTask> tasks_;
};

OpCounter launch(const LaunchConfig& config, KernelRef kernel, LaunchOptions options) {
  if (auto violations = validate(config); !violations.empty()) {
    throw LaunchError(std::move(violations));
  }
  const std::size_t blocks = config.grid.count();
  const std::size_t workers =
      std::min(blocks, options.workers != 0 ? options.workers : default_workers());

  // Per-block tallies, summed in block order after the launch.
  std::vector<OpCounter> tallies(blocks);
  const auto block_at = [&](std::size_t linear) {
    return Dim2{linear % config.grid.x, linear / config.grid.x};
  };

  if (workers <= 1) {
    BlockRunner runner(config, kernel);
    for (std::size_t b = 0; b < blocks; ++b) tallies[b] = runner.run(block_at(b));
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex failure_mutex;
    std::size_t failed_block = SIZE_MAX;
    std::exception_ptr failure;

    auto work = [&] {
      try {
        BlockRunner runner(config, kernel);
        while (!stop.load(std::memory_order_relaxed)) {
          const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
          if (b >= blocks) break;
          try {
            tallies[b] = runner.run(block_at(b));
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (b < failed_block) {
              failed_block = b;
              failure = std::current_exception();
            }
            stop = true;
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  OpCounter total;
  for (const auto& t : tallies) total += t;
  return total;
}

}  // namespace simtlab::simt

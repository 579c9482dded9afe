#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace meshcast {

/// Persistent worker pool for fan-out over independent items. Workers claim
/// indices from a shared counter; callers are responsible for combining
/// per-index results in a fixed order, which keeps reductions deterministic
/// regardless of scheduling. threads <= 1 runs inline.
class ThreadPool {
 public:
  explicit ThreadPool(int threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  /// Runs fn(i) for every i in [0, count); blocks until all complete.
  /// Rethrows the first exception a worker hit.
  void run(int count, const std::function<void(int)>& fn);

  int thread_count() const { return static_cast<int>(workers_.size()) + 1; }

 private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  int job_count_ = 0;
  int next_index_ = 0;
  int active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace meshcast

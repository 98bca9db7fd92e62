#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace vme {

/// Fixed-size pool that runs index ranges in contiguous static chunks.
/// Each index is processed by exactly one worker, so per-index outputs are
/// independent of the worker count; any reduction is left to the caller.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  /// Calls fn(i) for i in [0, n). Rethrows the first exception by index.
  void parallel_for(int n, const std::function<void(int)>& fn);

 private:
  void worker_loop(int id);
  void run_chunk(int id);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  int job_n_ = 0;
  long generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
  std::vector<int> error_index_;
};

}  // namespace vme

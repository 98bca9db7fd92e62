#include "vme/parallel.hpp"

#include <algorithm>
#include <limits>

namespace vme {

WorkerPool::WorkerPool(int workers) {
  const int n = std::max(1, workers);
  errors_.resize(static_cast<std::size_t>(n));
  error_index_.assign(static_cast<std::size_t>(n), std::numeric_limits<int>::max());
  for (int id = 1; id < n; ++id) threads_.emplace_back([this, id] { worker_loop(id); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run_chunk(int id) {
  const int workers = size();
  const int begin = static_cast<int>(static_cast<long long>(job_n_) * id / workers);
  const int end = static_cast<int>(static_cast<long long>(job_n_) * (id + 1) / workers);
  for (int i = begin; i < end; ++i) {
    try {
      (*job_)(i);
    } catch (...) {
      errors_[id] = std::current_exception();
      error_index_[id] = i;
      return;
    }
  }
}

void WorkerPool::worker_loop(int id) {
  long seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    run_chunk(id);
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  std::fill(errors_.begin(), errors_.end(), nullptr);
  std::fill(error_index_.begin(), error_index_.end(), std::numeric_limits<int>::max());
  job_ = &fn;
  job_n_ = n;
  if (!threads_.empty()) {
    {
      std::lock_guard lock(mutex_);
      pending_ = static_cast<int>(threads_.size());
      ++generation_;
    }
    start_cv_.notify_all();
  }
  run_chunk(0);
  if (!threads_.empty()) {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
  }
  job_ = nullptr;
  int first = 0;
  for (int id = 1; id < size(); ++id)
    if (error_index_[id] < error_index_[first]) first = id;
  if (errors_[first]) std::rethrow_exception(errors_[first]);
}

}  // namespace vme

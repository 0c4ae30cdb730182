// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace rcl {

/// Worker count from the RCL_THREADS environment variable, falling back to the
/// hardware concurrency. Always at least 1.
std::size_t default_worker_count();

/// Runs fn(task) for task in [0, n_tasks) on up to `workers` threads and
/// returns the results indexed by task. Results never depend on the worker
/// count because each task owns its slot. The first exception thrown by any
/// task is rethrown after all workers join.
template <class Fn>
auto run_tasks(std::size_t n_tasks, std::size_t workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> results(n_tasks);
  if (workers == 0) workers = default_worker_count();
  if (workers > n_tasks) workers = n_tasks;

  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) results[t] = fn(t);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks) return;
      try {
        results[t] = fn(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace rcl

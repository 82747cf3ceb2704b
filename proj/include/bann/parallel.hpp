// Trial-parallel kernels.
//
// Monte Carlo trials are keyed by their index and every per-trial random
// stream is derived from (master_seed, trial_index), so a trial's outcome does
// not depend on which thread runs it. Accumulators merge exact integer
// counters, which makes the aggregate independent of scheduling and of the
// worker count. The `_serial` variants are the reference the tests compare
// against.
#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

#include <omp.h>

namespace bann {

template <class Acc, class Fn>
Acc accumulate_trials_serial(std::uint64_t n, Acc init, Fn&& fn) {
  Acc acc = init;
  for (std::uint64_t t = 0; t < n; ++t) fn(t, acc);
  return acc;
}

/// Runs fn(trial_index, local_acc) for every trial on `workers` OpenMP
/// threads; Acc must provide a commutative, associative merge().
template <class Acc, class Fn>
Acc accumulate_trials(std::uint64_t n, int workers, Acc init, Fn&& fn) {
  if (workers <= 1) return accumulate_trials_serial(n, std::move(init), fn);
  std::vector<Acc> partial(static_cast<std::size_t>(workers), init);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel num_threads(workers)
  {
    Acc& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < count; ++t) {
      try {
        fn(static_cast<std::uint64_t>(t), local);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  Acc out = std::move(init);
  for (const Acc& p : partial) out.merge(p);
  return out;
}

/// Per-trial results stored by trial index.
template <class R, class Fn>
std::vector<R> map_trials(std::uint64_t n, int workers, Fn&& fn) {
  std::vector<R> out(n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers > 1 ? workers : 1)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      out[static_cast<std::size_t>(t)] = fn(static_cast<std::uint64_t>(t));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace bann

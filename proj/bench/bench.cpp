// Wall-clock comparison of the event-driven engine against the rescanning
// oracle, and of serial against OpenMP estimator kernels.
//
//   bann_bench [workers]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "bann/engine.hpp"
#include "bann/estimators.hpp"
#include "bann/model.hpp"

using namespace bann;

namespace {

template <class Fn>
double time_seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void bench_engine(std::size_t size, std::size_t configs) {
  std::vector<Configuration> batch;
  for (std::size_t t = 0; t < configs; ++t) {
    RngStream s = derive_stream(1, t);
    batch.push_back(sample_halfline({0.4}, size, s));
  }
  std::size_t sink = 0;
  const double heap = time_seconds([&] {
    for (const auto& c : batch) sink += resolve(c).events.size();
  });
  const double oracle = time_seconds([&] {
    for (const auto& c : batch) sink += resolve_oracle(c).events.size();
  });
  std::cout << "engine size=" << size << " configs=" << configs << " resolve=" << heap
            << "s resolve_oracle=" << oracle << "s ratio=" << oracle / heap << " (events " << sink << ")\n";
}

void bench_estimator(int workers) {
  Estimate serial, parallel;
  const double t1 = time_seconds([&] { serial = estimate_qk({0.49}, 2000, 4000, 3, 1); });
  const double tw = time_seconds([&] { parallel = estimate_qk({0.49}, 2000, 4000, 3, workers); });
  std::cout << "estimate_qk k=2000 trials=4000 serial=" << t1 << "s workers=" << workers << ": " << tw
            << "s speedup=" << t1 / tw << " identical=" << (serial.value == parallel.value ? "yes" : "no") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::atoi(argv[1]) : omp_get_num_procs();
  if (workers < 1) {
    std::cerr << "usage: bann_bench [workers]\n";
    return 1;
  }
  bench_engine(12, 20000);
  bench_engine(200, 500);
  bench_engine(1000, 50);
  bench_estimator(workers);
  return 0;
}

// Serial vs OpenMP repetitions on one instance; checks the two agree bit for bit.
//   bench_replicate [reps] [cap]
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "smarena/replicate.hpp"

using namespace smarena;

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  SimConfig c;
  c.repetitions = argc > 1 ? static_cast<std::uint32_t>(std::atoi(argv[1])) : 16;
  c.step_cap = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 100000;
  c.seed = 7;
  const PowerAllocation a{{0.3, 0.2, 0.5}};
  const std::vector<StrategyKind> s{StrategyKind::SM, StrategyKind::SM, StrategyKind::HM};

  SimResult serial, parallel;
  const double ts = seconds([&] { serial = run_replicated_serial(a, s, c); });
  const double tp = seconds([&] { parallel = run_replicated(a, s, c); });

  const bool same = serial.mean_rewards == parallel.mean_rewards && serial.sem == parallel.sem;
  fmt::print("threads {}  reps {}  cap {}\n", omp_get_max_threads(), c.repetitions, c.step_cap);
  fmt::print("serial   {:8.3f} s\n", ts);
  fmt::print("parallel {:8.3f} s  speedup {:.2f}x\n", tp, ts / tp);
  fmt::print("results {}\n", same ? "identical" : "DIFFER");
  return same ? 0 : 1;
}

// duplex/bench.hpp - Interlocking throughput measurement: full duplex cycles
// (four instance executions plus comparison and frames) over an n-equation
// boolean network.
#pragma once

#include <cstdint>
#include <string>

#include "duplex/util.hpp"

namespace duplex
{

struct BenchOptions
{
  uint32_t equations = 50000;
  uint64_t seed = 1;
  double min_seconds = 2.0;
  uint32_t min_cycles = 3;
  uint32_t selftest_opcodes_per_cycle = 4;
};

struct BenchReport
{
  uint32_t equations = 0;
  uint64_t cycles = 0;
  double seconds = 0.0;
  double cycles_per_second = 0.0;
  double equation_evals_per_second = 0.0;  // equations x 4 instances x cps
  std::string fingerprint;
  uint64_t max_ops = 0;
};

Result<BenchReport> run_bench(const BenchOptions & options);

}  // namespace duplex

// duplex/fuzz.hpp - Differential campaigns: random models executed on both
// chains and checked three ways against the reference interpreter, plus the
// single-bit-flip detection campaign.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace duplex
{

struct FuzzOptions
{
  uint32_t programs = 1000;
  uint32_t cycles = 100;
  uint64_t seed = 0;
  uint32_t jobs = 0;  // 0: hardware concurrency
  uint32_t selftest_opcodes_per_cycle = 4;
};

struct FuzzFailure
{
  uint64_t seed = 0;
  std::string reason;
  std::string repro;  // standalone command line
};

struct FuzzReport
{
  uint32_t programs = 0;
  uint64_t total_cycles = 0;
  uint64_t asm_lines = 0;         // instruction lines over the whole corpus
  uint64_t hex_records_b = 0;     // chain-two data records over the corpus
  std::vector<FuzzFailure> failures;  // sorted by seed

  bool ok() const { return failures.empty(); }
};

FuzzReport run_fuzz(const FuzzOptions & options);

struct BitflipOptions
{
  uint32_t faults = 500;
  uint32_t cycles = 50;
  uint64_t seed = 0;
  uint32_t jobs = 0;
};

struct BitflipReport
{
  uint32_t faults_run = 0;
  uint32_t behavior_changing = 0;  // faults that produced a divergence event
  uint32_t silent = 0;             // faults with no observable effect
  std::vector<FuzzFailure> failures;

  bool ok() const { return failures.empty(); }
};

// For each random single code/data bit flip: the faulted run must stay
// bitwise equal to the fault-free run up to the first divergence event, must
// never energize a board output the fault-free run leaves off, and a run
// without any divergence event must match the fault-free run everywhere.
BitflipReport run_bitflip_campaign(const BitflipOptions & options);

}  // namespace duplex

// duplex/exhaustive.hpp - Bounded exhaustive invariant check: breadth-first
// enumeration of the reachable state space under all per-cycle input vectors.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duplex/interp.hpp"
#include "duplex/typecheck.hpp"

namespace duplex
{

struct ExhaustiveReport
{
  enum class Verdict
  {
    Holds,
    Violated,
    TooLarge,
  };

  Verdict verdict = Verdict::Holds;
  uint64_t states_visited = 0;
  uint64_t estimate = 0;  // |declared state space| x |input space|, saturating
  // One flattened input-cell vector per cycle, shortest path to the violation.
  std::vector<std::vector<int64_t>> witness;
  std::string violation;  // human-readable cause
  std::optional<Trap> trap;
};

// Refuses (TooLarge) when the declared-range estimate exceeds max_states.
ExhaustiveReport check_exhaustive(const TypedModel & tm, uint64_t max_states);

}  // namespace duplex

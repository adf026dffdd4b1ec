// duplex/gen.hpp - Seeded model generators: random well-typed programs for
// differential campaigns, and interlocking-style boolean networks for
// throughput measurement.
#pragma once

#include <cstdint>

#include "duplex/ast.hpp"

namespace duplex
{

struct GenConfig
{
  uint64_t seed = 0;
  uint32_t statement_budget = 12;
  uint32_t max_inputs = 5;
  uint32_t max_outputs = 4;
  uint32_t max_state = 4;
};

// Always well-typed and trap-free: integer expressions carry interval
// tracking and are wrapped into their target ranges, divisors are built
// nonzero or guarded, indices are wrapped into bounds. Identical seeds give
// identical models.
Model gen_program(const GenConfig & config);

// n boolean equations over 20 digital inputs and the previous scan's coil
// values, with 8 digital outputs; coils live in one array, the previous scan
// in a shadow array copied by a leading FOR loop.
Model gen_interlocking(uint32_t equations, uint64_t seed);

}  // namespace duplex

// duplex/interp.hpp - Reference interpreter: the semantic oracle both
// executable images are checked against.
//
// All arithmetic is evaluated in signed 64 bits. A value assigned to a ranged
// variable must lie in its declared range, division and modulo trap on a zero
// divisor and truncate toward zero, 64-bit intermediate overflow traps, and
// array indices trap outside bounds. Outputs are reset to their fail-safe
// defaults at the start of every cycle.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "duplex/typecheck.hpp"

namespace duplex
{

enum class TrapKind
{
  Range,
  DivZero,
  Overflow,
  Index,
};

const char * trap_name(TrapKind k);

struct Trap
{
  TrapKind kind = TrapKind::Range;
  SourceSpan span;
};

struct StepResult
{
  std::optional<Trap> trap;
  uint64_t ops = 0;  // dynamic primitive-operation count of the body
  explicit operator bool() const { return !trap.has_value(); }
};

// One i64 slot per 32-bit data cell, declared variables then loop scratch.
std::vector<int64_t> initial_cells(const TypedModel & tm);

// Runs one cycle in place: resets outputs, latches inputs into their cells,
// executes the body. `inputs` is one value per input cell (arrays flattened).
StepResult interp_step(const TypedModel & tm, std::vector<int64_t> & cells,
                       std::span<const int64_t> inputs);

// Number of input cells expected by interp_step (array inputs flattened).
uint32_t input_cell_count(const TypedModel & tm);

// Values of one section in canonical order. `ids` from output_var_ids /
// state_var_ids.
std::vector<int64_t> read_section(const TypedModel & tm, const std::vector<int64_t> & cells,
                                  const std::vector<int> & ids);

// Canonical serialization: 32-bit little-endian two's complement per cell,
// variables in declaration order, array elements in order.
std::vector<uint8_t> canonical_bytes(const TypedModel & tm, const std::vector<int64_t> & cells,
                                     const std::vector<int> & ids);

// Evaluates the model invariant over the current state; true when absent.
// The invariant is side-effect free and cannot trap on reachable states with
// in-range cells, but a trap is reported as false plus `trapped`.
bool eval_invariant(const TypedModel & tm, const std::vector<int64_t> & cells, bool * trapped);

}  // namespace duplex

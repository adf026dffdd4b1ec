// duplex/complexity.hpp - Static worst-case cycle cost.
//
// Cost table (pinned by tests): every operator, literal/variable load, and
// store costs 1; an IF costs its condition plus the most expensive branch;
// a FOR costs trip_count * (body + 2), the 2 covering per-iteration loop
// bookkeeping. The result over-approximates the dynamic operation count of
// the reference interpreter for every input trace.
#pragma once

#include <cstdint>

#include "duplex/typecheck.hpp"

namespace duplex
{

struct CycleBound
{
  uint64_t max_ops = 0;          // saturating
  uint32_t max_stack_depth = 0;  // operand-stack need of expression evaluation
};

CycleBound complexity_check(const TypedModel & tm);

// Per-instance instruction budget used by the controller watchdog: a margin of
// 4 on the body bound plus a fixed allowance for the input/output prologue and
// epilogue that every generated cycle program carries.
uint64_t instruction_budget(const TypedModel & tm, const CycleBound & bound);

}  // namespace duplex

// duplex/vm_common.hpp - Shared execution-outcome types for both virtual
// machines.
#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "duplex/interp.hpp"

namespace duplex
{

enum class VmFault
{
  Decode,          // invalid or truncated instruction
  PcRange,         // program counter left the code region
  Mem,             // data access outside the instance's data region
  StackOverflow,   // operand stack exhausted (stack machine)
  StackUnderflow,  // pop on an empty stack (stack machine)
  Range,           // range check failed
  DivZero,         // zero divisor
  Overflow,        // 64-bit intermediate overflow
  Index,           // array index check failed
  IoRange,         // input/output line index out of range
  Budget,          // per-cycle instruction budget exhausted
};

const char * vm_fault_name(VmFault f);

// The faults that correspond one-to-one to reference-interpreter traps.
std::optional<VmFault> fault_for_trap(TrapKind k);

struct VmOutcome
{
  bool ok = false;
  VmFault fault = VmFault::Decode;
  uint32_t fault_pc = 0;
  uint64_t executed = 0;         // instructions retired
  uint32_t stack_highwater = 0;  // stack machine only
  int64_t halt_top = 0;          // observation point at halt: stack top / r1
};

// Per-opcode retirement counters, indexed by raw opcode byte.
struct VmStats
{
  std::array<uint64_t, 256> executed{};
};

// Semantics-corruption hook: when armed, the affected opcode misbehaves in a
// documented, deterministic way (wrong value, inverted decision, suppressed
// check). Models a processor that can no longer execute one instruction
// correctly.
struct OpcodeCorruption
{
  uint8_t opcode = 0;
};

}  // namespace duplex

// duplex/vm_a.hpp - Instance one target: an operand-stack machine with
// variable-length encoding, one opcode byte followed by little-endian 32-bit
// immediates. Data cells are 32-bit little-endian at absolute byte addresses.
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "duplex/memmap.hpp"
#include "duplex/vm_common.hpp"

namespace duplex
{

enum class OpA : uint8_t
{
  Pushi = 0x10,     // imm: value
  Load = 0x11,      // imm: absolute byte address
  Store = 0x12,     // imm: absolute byte address; pops value
  LoadIdx = 0x13,   // imm: base address; pops index, pushes cell[base + 4*idx]
  StoreIdx = 0x14,  // imm: base address; pops value, pops index
  Add = 0x15,
  Sub = 0x16,
  Mul = 0x17,
  Div = 0x18,
  Mod = 0x19,
  Neg = 0x1A,
  Not = 0x1B,
  And = 0x1C,
  Or = 0x1D,
  Xor = 0x1E,
  Eq = 0x1F,
  Ne = 0x20,
  Lt = 0x21,
  Le = 0x22,
  Gt = 0x23,
  Ge = 0x24,
  Jmp = 0x25,       // imm: signed byte offset from the next instruction
  Jz = 0x26,        // imm: offset; pops condition, jumps when zero
  RangeChk = 0x27,  // imm, imm2: bounds; peeks, traps outside [lo, hi]
  IdxChk = 0x28,    // imm: length; peeks, traps unless 0 <= v < length
  Loop = 0x29,      // imm: counter address, imm2: final value, imm3: offset
  In = 0x2A,        // imm: input line
  Out = 0x2B,       // imm: output line; pops value
  Halt = 0x2C,
};

constexpr uint32_t kVmAStackCapacity = 256;

// Number of 32-bit immediates for an opcode; -1 for an invalid opcode byte.
int vm_a_imm_count(uint8_t opcode);
const char * vm_a_mnemonic(uint8_t opcode);

// All valid opcode byte values, in encoding order (self-test rotation order).
std::span<const uint8_t> vm_a_opcodes();

struct VmAContext
{
  std::span<uint8_t> memory;  // the controller's whole address space
  Region code;                // fetch window (the image lives at code.base)
  Region data;                // load/store window
  uint32_t entry = 0;         // absolute address of the first instruction
};

VmOutcome run_vm_a(const VmAContext & ctx, std::span<const int64_t> inputs,
                   std::span<int64_t> out_latch, uint64_t budget,
                   const OpcodeCorruption * corruption = nullptr, VmStats * stats = nullptr);

}  // namespace duplex

// duplex/codegen_a.hpp - Instance one chain: linear IR -> stack bytecode.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duplex/ir.hpp"
#include "duplex/memmap.hpp"
#include "duplex/util.hpp"

namespace duplex
{

struct ImageA
{
  std::vector<uint8_t> code;  // loaded at map.code_a.base
  uint32_t entry = 0;         // offset of the first instruction within the code
  uint32_t required_stack_depth = 0;  // static bound on operand-stack need
  uint32_t data_cells = 0;            // 32-bit cells used in DATA_A
};

// Deterministic: identical IR and map produce identical bytes. Fails on code
// or data region overflow and when the static stack need exceeds capacity.
Result<ImageA> emit_a(const IrProgram & ir, const MemoryMap & map);

// Human-readable listing, one line per instruction with its absolute address.
std::string listing_a(const ImageA & image, const MemoryMap & map);

struct DecodedA
{
  uint8_t opcode = 0;
  int n_imm = 0;
  int32_t imm[3] = {0, 0, 0};
  uint32_t size = 0;
};

// Decodes one instruction at `offset` within the code bytes; nullopt on an
// invalid opcode or a truncated instruction.
std::optional<DecodedA> decode_a(std::span<const uint8_t> code, uint32_t offset);

}  // namespace duplex

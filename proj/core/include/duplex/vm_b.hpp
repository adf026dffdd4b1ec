// duplex/vm_b.hpp - Instance two target: a 16-register machine executing
// fixed 32-bit big-endian words; data cells are 32-bit big-endian, addressed
// relative to the instance's data region.
#pragma once

#include <span>

#include "duplex/codegen_b.hpp"
#include "duplex/memmap.hpp"
#include "duplex/vm_common.hpp"

namespace duplex
{

struct VmBContext
{
  std::span<uint8_t> memory;
  Region code;
  Region data;
  uint32_t entry = 0;  // absolute byte address, word-aligned
};

VmOutcome run_vm_b(const VmBContext & ctx, std::span<const int64_t> inputs,
                   std::span<int64_t> out_latch, uint64_t budget,
                   const OpcodeCorruption * corruption = nullptr, VmStats * stats = nullptr);

}  // namespace duplex

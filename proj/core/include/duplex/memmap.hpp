// duplex/memmap.hpp - Controller memory regions for the two instances.
#pragma once

#include <cstdint>
#include <string>

#include "duplex/util.hpp"

namespace duplex
{

struct Region
{
  uint32_t base = 0;
  uint32_t size = 0;

  uint64_t end() const { return static_cast<uint64_t>(base) + size; }
  bool contains(uint64_t addr, uint64_t len) const
  {
    return addr >= base && addr + len <= end();
  }
  bool overlaps(const Region & o) const { return base < o.end() && o.base < end(); }
};

// Code and data regions for both instances inside one flat address space.
// The default space is 65536 bytes (the size addressable by the image text
// format); larger spaces are supported for in-memory benchmark builds.
struct MemoryMap
{
  uint32_t space_size = 65536;
  Region code_a;
  Region code_b;
  Region data_a;
  Region data_b;
};

// Rejects empty regions, regions reaching outside the space, and any overlap
// between the four regions.
Result<bool> validate_map(const MemoryMap & map);

// Four equal quarters of the 64 KiB default space.
MemoryMap default_map();

// Equal quarters of an arbitrary space, for large benchmark models.
MemoryMap quartered_map(uint32_t space_size);

}  // namespace duplex

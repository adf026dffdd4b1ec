// duplex/memmap.cpp
#include "duplex/memmap.hpp"

#include <array>

namespace duplex
{

Result<bool> validate_map(const MemoryMap & map)
{
  struct Named
  {
    const char * name;
    const Region * r;
  };
  std::array<Named, 4> regions = {
    Named{"CODE_A", &map.code_a},
    Named{"CODE_B", &map.code_b},
    Named{"DATA_A", &map.data_a},
    Named{"DATA_B", &map.data_b},
  };
  for (const auto & n : regions) {
    if (n.r->size == 0) {
      return Result<bool>::fail(std::string(n.name) + ": region size must be positive");
    }
    if (n.r->end() > map.space_size) {
      return Result<bool>::fail(std::string(n.name) + ": region reaches outside memory");
    }
  }
  for (size_t i = 0; i < regions.size(); ++i) {
    for (size_t j = i + 1; j < regions.size(); ++j) {
      if (regions[i].r->overlaps(*regions[j].r)) {
        return Result<bool>::fail(std::string(regions[i].name) + " overlaps " + regions[j].name);
      }
    }
  }
  return Result<bool>::ok(true);
}

MemoryMap quartered_map(uint32_t space_size)
{
  MemoryMap m;
  m.space_size = space_size;
  uint32_t q = space_size / 4;
  m.code_a = {0, q};
  m.code_b = {q, q};
  m.data_a = {2 * q, q};
  m.data_b = {3 * q, q};
  return m;
}

MemoryMap default_map() { return quartered_map(65536); }

}  // namespace duplex

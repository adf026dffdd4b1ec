// duplex/selftest.hpp - Instruction oracle: stored operand/result vectors for
// every opcode of both machines, executed in an isolated scratch context.
// A processor whose instruction semantics drift is caught within one full
// rotation of the table.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "duplex/vm_common.hpp"

namespace duplex
{

enum class InstanceId
{
  I1,  // chain one: stack machine image
  I2,  // chain two: register machine image
};

const char * instance_name(InstanceId id);

struct SelfTestExpect
{
  enum class Kind
  {
    Value,  // observation register / stack top at halt
    Cell,   // scratch data cell
    Latch,  // output latch slot
    Fault,  // the snippet must fault with this kind
  };
  Kind kind = Kind::Value;
  int64_t value = 0;
  uint32_t index = 0;
  VmFault fault = VmFault::Decode;
};

struct SelfTestCase
{
  std::vector<uint8_t> code;
  std::vector<std::pair<uint32_t, int64_t>> pre_cells;  // scratch preloads
  SelfTestExpect expect;
};

struct OpcodeTest
{
  InstanceId vm = InstanceId::I1;
  uint8_t opcode = 0;
  std::string name;
  std::vector<SelfTestCase> cases;
};

struct SelfTestFailure
{
  InstanceId vm = InstanceId::I1;
  uint8_t opcode = 0;
  std::string name;
};

class SelfTestSuite
{
public:
  static const SelfTestSuite & instance();

  // Rotation length: one slot per opcode, chain one first.
  size_t opcode_count() const { return slots_.size(); }
  const OpcodeTest & slot(size_t i) const { return slots_[i]; }

  // Runs one slot under the given per-machine corruption hooks.
  std::optional<SelfTestFailure> run_slot(size_t i, const OpcodeCorruption * corrupt_a,
                                          const OpcodeCorruption * corrupt_b) const;

private:
  SelfTestSuite();
  std::vector<OpcodeTest> slots_;
};

}  // namespace duplex

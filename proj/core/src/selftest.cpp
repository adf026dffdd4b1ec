// duplex/selftest.cpp - Self-test vector tables and the scratch execution
// harness. Expected results are stored constants; a unit test cross-checks
// them against healthy machines, the runtime checks the machines against
// them.
#include "duplex/selftest.hpp"

#include "duplex/vm_a.hpp"
#include "duplex/vm_b.hpp"

namespace duplex
{

const char * instance_name(InstanceId id) { return id == InstanceId::I1 ? "I1" : "I2"; }

namespace
{

// Scratch context: 512-byte space, code in [0, 256), 16 data cells at 256.
constexpr uint32_t kScratchCodeSize = 256;
constexpr uint32_t kScratchDataBase = 256;
constexpr uint32_t kScratchCells = 16;
constexpr int64_t kScratchInputs[2] = {5, 7};

// --- chain one snippet assembly ---

struct CodeA
{
  std::vector<uint8_t> bytes;

  CodeA & op(OpA o)
  {
    bytes.push_back(static_cast<uint8_t>(o));
    return *this;
  }
  CodeA & imm(int32_t v)
  {
    auto w = static_cast<uint32_t>(v);
    bytes.push_back(static_cast<uint8_t>(w));
    bytes.push_back(static_cast<uint8_t>(w >> 8));
    bytes.push_back(static_cast<uint8_t>(w >> 16));
    bytes.push_back(static_cast<uint8_t>(w >> 24));
    return *this;
  }
  CodeA & pushi(int32_t v) { return op(OpA::Pushi).imm(v); }
};

uint32_t cell_addr(uint32_t cell) { return kScratchDataBase + 4 * cell; }

// --- chain two snippet assembly ---

struct CodeB
{
  std::vector<uint8_t> bytes;

  CodeB & word(OpB o, int ra, int rb, uint16_t imm)
  {
    bytes.push_back(static_cast<uint8_t>(o));
    bytes.push_back(static_cast<uint8_t>(ra << 4 | rb));
    bytes.push_back(static_cast<uint8_t>(imm >> 8));
    bytes.push_back(static_cast<uint8_t>(imm & 0xFF));
    return *this;
  }
  CodeB & ldi(int r, int16_t v) { return word(OpB::Ldi, r, 0, static_cast<uint16_t>(v)); }
  CodeB & halt() { return word(OpB::Halt, 0, 0, 0); }
};

SelfTestExpect val(int64_t v)
{
  SelfTestExpect e;
  e.kind = SelfTestExpect::Kind::Value;
  e.value = v;
  return e;
}

SelfTestExpect cellv(uint32_t idx, int64_t v)
{
  SelfTestExpect e;
  e.kind = SelfTestExpect::Kind::Cell;
  e.index = idx;
  e.value = v;
  return e;
}

SelfTestExpect latchv(uint32_t idx, int64_t v)
{
  SelfTestExpect e;
  e.kind = SelfTestExpect::Kind::Latch;
  e.index = idx;
  e.value = v;
  return e;
}

SelfTestExpect faultv(VmFault f)
{
  SelfTestExpect e;
  e.kind = SelfTestExpect::Kind::Fault;
  e.fault = f;
  return e;
}

}  // namespace

SelfTestSuite::SelfTestSuite()
{
  auto slot_a = [&](OpA op, std::vector<SelfTestCase> cases) {
    OpcodeTest t;
    t.vm = InstanceId::I1;
    t.opcode = static_cast<uint8_t>(op);
    t.name = vm_a_mnemonic(t.opcode);
    t.cases = std::move(cases);
    slots_.push_back(std::move(t));
  };
  auto slot_b = [&](OpB op, std::vector<SelfTestCase> cases) {
    OpcodeTest t;
    t.vm = InstanceId::I2;
    t.opcode = static_cast<uint8_t>(op);
    t.name = vm_b_mnemonic(t.opcode);
    t.cases = std::move(cases);
    slots_.push_back(std::move(t));
  };
  auto ca = [](CodeA c, SelfTestExpect e, std::vector<std::pair<uint32_t, int64_t>> pre = {}) {
    SelfTestCase tc;
    tc.code = std::move(c.bytes);
    tc.pre_cells = std::move(pre);
    tc.expect = e;
    return tc;
  };
  auto cb = [](CodeB c, SelfTestExpect e, std::vector<std::pair<uint32_t, int64_t>> pre = {}) {
    SelfTestCase tc;
    tc.code = std::move(c.bytes);
    tc.pre_cells = std::move(pre);
    tc.expect = e;
    return tc;
  };

  // ---- chain one (stack machine) ----
  slot_a(OpA::Pushi, {ca(CodeA().pushi(7).op(OpA::Halt), val(7))});
  slot_a(OpA::Load,
         {ca(CodeA().op(OpA::Load).imm(static_cast<int32_t>(cell_addr(3))).op(OpA::Halt), val(33),
             {{3, 33}})});
  slot_a(OpA::Store,
         {ca(CodeA().pushi(42).op(OpA::Store).imm(static_cast<int32_t>(cell_addr(2))).op(OpA::Halt),
             cellv(2, 42))});
  slot_a(OpA::LoadIdx,
         {ca(CodeA().pushi(5).op(OpA::LoadIdx).imm(static_cast<int32_t>(kScratchDataBase)).op(OpA::Halt),
             val(55), {{5, 55}})});
  slot_a(OpA::StoreIdx,
         {ca(CodeA().pushi(6).pushi(44).op(OpA::StoreIdx).imm(static_cast<int32_t>(kScratchDataBase)).op(
               OpA::Halt),
             cellv(6, 44))});
  slot_a(OpA::Add, {ca(CodeA().pushi(7).pushi(5).op(OpA::Add).op(OpA::Halt), val(12))});
  slot_a(OpA::Sub, {ca(CodeA().pushi(7).pushi(5).op(OpA::Sub).op(OpA::Halt), val(2))});
  slot_a(OpA::Mul, {ca(CodeA().pushi(7).pushi(5).op(OpA::Mul).op(OpA::Halt), val(35))});
  slot_a(OpA::Div, {
    ca(CodeA().pushi(17).pushi(5).op(OpA::Div).op(OpA::Halt), val(3)),
    ca(CodeA().pushi(-17).pushi(5).op(OpA::Div).op(OpA::Halt), val(-3)),
    ca(CodeA().pushi(7).pushi(0).op(OpA::Div).op(OpA::Halt), faultv(VmFault::DivZero)),
  });
  slot_a(OpA::Mod, {
    ca(CodeA().pushi(17).pushi(5).op(OpA::Mod).op(OpA::Halt), val(2)),
    ca(CodeA().pushi(-17).pushi(5).op(OpA::Mod).op(OpA::Halt), val(-2)),
  });
  slot_a(OpA::Neg, {ca(CodeA().pushi(7).op(OpA::Neg).op(OpA::Halt), val(-7))});
  slot_a(OpA::Not, {
    ca(CodeA().pushi(0).op(OpA::Not).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(1).op(OpA::Not).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::And, {
    ca(CodeA().pushi(1).pushi(1).op(OpA::And).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(1).pushi(0).op(OpA::And).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Or, {
    ca(CodeA().pushi(0).pushi(0).op(OpA::Or).op(OpA::Halt), val(0)),
    ca(CodeA().pushi(0).pushi(1).op(OpA::Or).op(OpA::Halt), val(1)),
  });
  slot_a(OpA::Xor, {
    ca(CodeA().pushi(1).pushi(1).op(OpA::Xor).op(OpA::Halt), val(0)),
    ca(CodeA().pushi(0).pushi(1).op(OpA::Xor).op(OpA::Halt), val(1)),
  });
  slot_a(OpA::Eq, {
    ca(CodeA().pushi(3).pushi(3).op(OpA::Eq).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(3).pushi(4).op(OpA::Eq).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Ne, {ca(CodeA().pushi(3).pushi(4).op(OpA::Ne).op(OpA::Halt), val(1))});
  slot_a(OpA::Lt, {
    ca(CodeA().pushi(3).pushi(4).op(OpA::Lt).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(4).pushi(3).op(OpA::Lt).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Le, {
    ca(CodeA().pushi(3).pushi(3).op(OpA::Le).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(4).pushi(3).op(OpA::Le).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Gt, {
    ca(CodeA().pushi(4).pushi(3).op(OpA::Gt).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(3).pushi(3).op(OpA::Gt).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Ge, {
    ca(CodeA().pushi(3).pushi(3).op(OpA::Ge).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(2).pushi(3).op(OpA::Ge).op(OpA::Halt), val(0)),
  });
  slot_a(OpA::Jmp, {ca(CodeA().pushi(1).op(OpA::Jmp).imm(5).pushi(99).op(OpA::Halt), val(1))});
  slot_a(OpA::Jz, {
    ca(CodeA().pushi(1).pushi(0).op(OpA::Jz).imm(5).pushi(99).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(1).pushi(1).op(OpA::Jz).imm(5).pushi(99).op(OpA::Halt), val(99)),
  });
  slot_a(OpA::RangeChk, {
    ca(CodeA().pushi(5).op(OpA::RangeChk).imm(0).imm(9).op(OpA::Halt), val(5)),
    ca(CodeA().pushi(12).op(OpA::RangeChk).imm(0).imm(9).op(OpA::Halt), faultv(VmFault::Range)),
  });
  slot_a(OpA::IdxChk, {
    ca(CodeA().pushi(1).op(OpA::IdxChk).imm(2).op(OpA::Halt), val(1)),
    ca(CodeA().pushi(2).op(OpA::IdxChk).imm(2).op(OpA::Halt), faultv(VmFault::Index)),
  });
  // counter in cell 0: 0 -> 3 (two taken back-edges, one fall-through)
  slot_a(OpA::Loop,
         {ca(CodeA()
               .pushi(0)
               .op(OpA::Store)
               .imm(static_cast<int32_t>(cell_addr(0)))
               .op(OpA::Loop)
               .imm(static_cast<int32_t>(cell_addr(0)))
               .imm(2)
               .imm(-13)
               .op(OpA::Load)
               .imm(static_cast<int32_t>(cell_addr(0)))
               .op(OpA::Halt),
             val(3))});
  slot_a(OpA::In, {
    ca(CodeA().op(OpA::In).imm(0).op(OpA::Halt), val(5)),
    ca(CodeA().op(OpA::In).imm(1).op(OpA::Halt), val(7)),
  });
  slot_a(OpA::Out, {ca(CodeA().pushi(9).op(OpA::Out).imm(1).op(OpA::Halt), latchv(1, 9))});
  slot_a(OpA::Halt,
         {ca(CodeA().pushi(7).op(OpA::Halt).pushi(1).op(OpA::Add).op(OpA::Halt), val(7))});

  // ---- chain two (register machine) ----
  slot_b(OpB::Ldi, {cb(CodeB().ldi(1, -5).halt(), val(-5))});
  slot_b(OpB::Lui, {
    cb(CodeB().word(OpB::Lui, 1, 0, 1).halt(), val(65536)),
    cb(CodeB().word(OpB::Lui, 1, 0, 0x8000).halt(), val(INT32_MIN)),
  });
  slot_b(OpB::Ori, {cb(CodeB().ldi(1, 256).word(OpB::Ori, 1, 0, 3).halt(), val(259))});
  slot_b(OpB::Lw, {cb(CodeB().word(OpB::Lw, 1, 0, 3).halt(), val(33), {{3, 33}})});
  slot_b(OpB::Sw, {cb(CodeB().ldi(1, 42).word(OpB::Sw, 1, 0, 2).halt(), cellv(2, 42))});
  slot_b(OpB::Lx, {cb(CodeB().ldi(2, 5).word(OpB::Lx, 1, 2, 2).halt(), val(77), {{7, 77}})});
  slot_b(OpB::Sx, {cb(CodeB().ldi(1, 88).ldi(2, 9).word(OpB::Sx, 1, 2, 0).halt(), cellv(9, 88))});
  slot_b(OpB::Add, {cb(CodeB().ldi(1, 7).ldi(2, 5).word(OpB::Add, 1, 2, 0).halt(), val(12))});
  slot_b(OpB::Sub, {cb(CodeB().ldi(1, 7).ldi(2, 5).word(OpB::Sub, 1, 2, 0).halt(), val(2))});
  slot_b(OpB::Mul, {cb(CodeB().ldi(1, 7).ldi(2, 5).word(OpB::Mul, 1, 2, 0).halt(), val(35))});
  slot_b(OpB::Div, {
    cb(CodeB().ldi(1, 17).ldi(2, 5).word(OpB::Div, 1, 2, 0).halt(), val(3)),
    cb(CodeB().ldi(1, -17).ldi(2, 5).word(OpB::Div, 1, 2, 0).halt(), val(-3)),
    cb(CodeB().ldi(1, 7).ldi(2, 0).word(OpB::Div, 1, 2, 0).halt(), faultv(VmFault::DivZero)),
  });
  slot_b(OpB::Mod, {
    cb(CodeB().ldi(1, 17).ldi(2, 5).word(OpB::Mod, 1, 2, 0).halt(), val(2)),
    cb(CodeB().ldi(1, -17).ldi(2, 5).word(OpB::Mod, 1, 2, 0).halt(), val(-2)),
  });
  slot_b(OpB::Neg, {cb(CodeB().ldi(1, 7).word(OpB::Neg, 1, 0, 0).halt(), val(-7))});
  slot_b(OpB::Notl, {
    cb(CodeB().ldi(1, 0).word(OpB::Notl, 1, 0, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 1).word(OpB::Notl, 1, 0, 0).halt(), val(0)),
  });
  slot_b(OpB::Andl, {
    cb(CodeB().ldi(1, 1).ldi(2, 1).word(OpB::Andl, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 1).ldi(2, 0).word(OpB::Andl, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::Orl, {
    cb(CodeB().ldi(1, 0).ldi(2, 0).word(OpB::Orl, 1, 2, 0).halt(), val(0)),
    cb(CodeB().ldi(1, 0).ldi(2, 1).word(OpB::Orl, 1, 2, 0).halt(), val(1)),
  });
  slot_b(OpB::Xorl, {
    cb(CodeB().ldi(1, 1).ldi(2, 1).word(OpB::Xorl, 1, 2, 0).halt(), val(0)),
    cb(CodeB().ldi(1, 0).ldi(2, 1).word(OpB::Xorl, 1, 2, 0).halt(), val(1)),
  });
  slot_b(OpB::Ceq, {
    cb(CodeB().ldi(1, 3).ldi(2, 3).word(OpB::Ceq, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 3).ldi(2, 4).word(OpB::Ceq, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::Cne, {cb(CodeB().ldi(1, 3).ldi(2, 4).word(OpB::Cne, 1, 2, 0).halt(), val(1))});
  slot_b(OpB::Clt, {
    cb(CodeB().ldi(1, 3).ldi(2, 4).word(OpB::Clt, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 4).ldi(2, 3).word(OpB::Clt, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::Cle, {
    cb(CodeB().ldi(1, 3).ldi(2, 3).word(OpB::Cle, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 4).ldi(2, 3).word(OpB::Cle, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::Cgt, {
    cb(CodeB().ldi(1, 4).ldi(2, 3).word(OpB::Cgt, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 3).ldi(2, 3).word(OpB::Cgt, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::Cge, {
    cb(CodeB().ldi(1, 3).ldi(2, 3).word(OpB::Cge, 1, 2, 0).halt(), val(1)),
    cb(CodeB().ldi(1, 2).ldi(2, 3).word(OpB::Cge, 1, 2, 0).halt(), val(0)),
  });
  slot_b(OpB::J, {cb(CodeB().ldi(1, 1).word(OpB::J, 0, 0, 1).ldi(1, 99).halt(), val(1))});
  slot_b(OpB::Bz, {
    cb(CodeB().ldi(1, 1).ldi(2, 0).word(OpB::Bz, 2, 0, 1).ldi(1, 99).halt(), val(1)),
    cb(CodeB().ldi(1, 1).ldi(2, 1).word(OpB::Bz, 2, 0, 1).ldi(1, 99).halt(), val(99)),
  });
  slot_b(OpB::Bnz, {
    cb(CodeB().ldi(1, 1).ldi(2, 1).word(OpB::Bnz, 2, 0, 1).ldi(1, 99).halt(), val(1)),
    cb(CodeB().ldi(1, 1).ldi(2, 0).word(OpB::Bnz, 2, 0, 1).ldi(1, 99).halt(), val(99)),
  });
  slot_b(OpB::Tlt, {
    cb(CodeB().ldi(1, 9).ldi(2, 5).word(OpB::Tlt, 1, 2, 0).halt(), val(9)),
    cb(CodeB().ldi(1, 3).ldi(2, 5).word(OpB::Tlt, 1, 2, 0).halt(), faultv(VmFault::Range)),
  });
  slot_b(OpB::Tgt, {
    cb(CodeB().ldi(1, 3).ldi(2, 5).word(OpB::Tgt, 1, 2, 0).halt(), val(3)),
    cb(CodeB().ldi(1, 9).ldi(2, 5).word(OpB::Tgt, 1, 2, 0).halt(), faultv(VmFault::Range)),
  });
  slot_b(OpB::Trapz, {
    cb(CodeB().ldi(1, 5).word(OpB::Trapz, 1, 0, 0).halt(), val(5)),
    cb(CodeB().ldi(1, 0).word(OpB::Trapz, 1, 0, 0).halt(), faultv(VmFault::DivZero)),
  });
  slot_b(OpB::Tidx, {
    cb(CodeB().ldi(1, 1).word(OpB::Tidx, 1, 0, 2).halt(), val(1)),
    cb(CodeB().ldi(1, 2).word(OpB::Tidx, 1, 0, 2).halt(), faultv(VmFault::Index)),
  });
  slot_b(OpB::Addi, {cb(CodeB().ldi(1, 7).word(OpB::Addi, 1, 0, 5).halt(), val(12))});
  slot_b(OpB::In, {
    cb(CodeB().word(OpB::In, 1, 0, 0).halt(), val(5)),
    cb(CodeB().word(OpB::In, 1, 0, 1).halt(), val(7)),
  });
  slot_b(OpB::Out, {cb(CodeB().ldi(1, 9).word(OpB::Out, 1, 0, 1).halt(), latchv(1, 9))});
  slot_b(OpB::Halt, {cb(CodeB().ldi(1, 7).halt().ldi(1, 99).halt(), val(7))});
}

const SelfTestSuite & SelfTestSuite::instance()
{
  static const SelfTestSuite suite;
  return suite;
}

namespace
{

bool run_case(InstanceId vm, const SelfTestCase & tc, const OpcodeCorruption * corruption)
{
  std::vector<uint8_t> memory(kScratchCodeSize + 4 * kScratchCells, 0);
  std::copy(tc.code.begin(), tc.code.end(), memory.begin());
  bool big_endian = vm == InstanceId::I2;
  for (const auto & [cell, value] : tc.pre_cells) {
    auto w = static_cast<uint32_t>(static_cast<int32_t>(value));
    uint8_t * p = memory.data() + kScratchDataBase + 4 * cell;
    if (big_endian) {
      p[0] = static_cast<uint8_t>(w >> 24);
      p[1] = static_cast<uint8_t>(w >> 16);
      p[2] = static_cast<uint8_t>(w >> 8);
      p[3] = static_cast<uint8_t>(w);
    } else {
      p[0] = static_cast<uint8_t>(w);
      p[1] = static_cast<uint8_t>(w >> 8);
      p[2] = static_cast<uint8_t>(w >> 16);
      p[3] = static_cast<uint8_t>(w >> 24);
    }
  }
  int64_t latch[4] = {0, 0, 0, 0};
  VmOutcome out;
  if (vm == InstanceId::I1) {
    VmAContext ctx;
    ctx.memory = memory;
    ctx.code = {0, kScratchCodeSize};
    ctx.data = {kScratchDataBase, 4 * kScratchCells};
    ctx.entry = 0;
    out = run_vm_a(ctx, kScratchInputs, latch, 1000, corruption);
  } else {
    VmBContext ctx;
    ctx.memory = memory;
    ctx.code = {0, kScratchCodeSize};
    ctx.data = {kScratchDataBase, 4 * kScratchCells};
    ctx.entry = 0;
    out = run_vm_b(ctx, kScratchInputs, latch, 1000, corruption);
  }

  switch (tc.expect.kind) {
    case SelfTestExpect::Kind::Fault:
      return !out.ok && out.fault == tc.expect.fault;
    case SelfTestExpect::Kind::Value:
      return out.ok && out.halt_top == tc.expect.value;
    case SelfTestExpect::Kind::Latch:
      return out.ok && latch[tc.expect.index] == tc.expect.value;
    case SelfTestExpect::Kind::Cell: {
      if (!out.ok) return false;
      const uint8_t * p = memory.data() + kScratchDataBase + 4 * tc.expect.index;
      uint32_t w = big_endian
                     ? static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
                         static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3])
                     : static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
                         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
      return static_cast<int32_t>(w) == tc.expect.value;
    }
  }
  return false;
}

}  // namespace

std::optional<SelfTestFailure> SelfTestSuite::run_slot(size_t i, const OpcodeCorruption * corrupt_a,
                                                       const OpcodeCorruption * corrupt_b) const
{
  const OpcodeTest & t = slots_[i % slots_.size()];
  const OpcodeCorruption * c = t.vm == InstanceId::I1 ? corrupt_a : corrupt_b;
  for (const SelfTestCase & tc : t.cases) {
    if (!run_case(t.vm, tc, c)) {
      return SelfTestFailure{t.vm, t.opcode, t.name};
    }
  }
  return std::nullopt;
}

}  // namespace duplex

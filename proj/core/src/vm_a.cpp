// duplex/vm_a.cpp
#include "duplex/vm_a.hpp"

namespace duplex
{

const char * vm_fault_name(VmFault f)
{
  switch (f) {
    case VmFault::Decode: return "decode";
    case VmFault::PcRange: return "pc_range";
    case VmFault::Mem: return "mem";
    case VmFault::StackOverflow: return "stack_overflow";
    case VmFault::StackUnderflow: return "stack_underflow";
    case VmFault::Range: return "range_violation";
    case VmFault::DivZero: return "div_by_zero";
    case VmFault::Overflow: return "overflow";
    case VmFault::Index: return "index_out_of_bounds";
    case VmFault::IoRange: return "io_range";
    case VmFault::Budget: return "budget_exhausted";
  }
  return "?";
}

std::optional<VmFault> fault_for_trap(TrapKind k)
{
  switch (k) {
    case TrapKind::Range: return VmFault::Range;
    case TrapKind::DivZero: return VmFault::DivZero;
    case TrapKind::Overflow: return VmFault::Overflow;
    case TrapKind::Index: return VmFault::Index;
  }
  return std::nullopt;
}

int vm_a_imm_count(uint8_t opcode)
{
  switch (static_cast<OpA>(opcode)) {
    case OpA::Pushi:
    case OpA::Load:
    case OpA::Store:
    case OpA::LoadIdx:
    case OpA::StoreIdx:
    case OpA::Jmp:
    case OpA::Jz:
    case OpA::IdxChk:
    case OpA::In:
    case OpA::Out:
      return 1;
    case OpA::RangeChk:
      return 2;
    case OpA::Loop:
      return 3;
    case OpA::Add:
    case OpA::Sub:
    case OpA::Mul:
    case OpA::Div:
    case OpA::Mod:
    case OpA::Neg:
    case OpA::Not:
    case OpA::And:
    case OpA::Or:
    case OpA::Xor:
    case OpA::Eq:
    case OpA::Ne:
    case OpA::Lt:
    case OpA::Le:
    case OpA::Gt:
    case OpA::Ge:
    case OpA::Halt:
      return 0;
  }
  return -1;
}

const char * vm_a_mnemonic(uint8_t opcode)
{
  switch (static_cast<OpA>(opcode)) {
    case OpA::Pushi: return "PUSHI";
    case OpA::Load: return "LOAD";
    case OpA::Store: return "STORE";
    case OpA::LoadIdx: return "LOADI";
    case OpA::StoreIdx: return "STOREI";
    case OpA::Add: return "ADD";
    case OpA::Sub: return "SUB";
    case OpA::Mul: return "MUL";
    case OpA::Div: return "DIV";
    case OpA::Mod: return "MOD";
    case OpA::Neg: return "NEG";
    case OpA::Not: return "NOT";
    case OpA::And: return "AND";
    case OpA::Or: return "OR";
    case OpA::Xor: return "XOR";
    case OpA::Eq: return "EQ";
    case OpA::Ne: return "NE";
    case OpA::Lt: return "LT";
    case OpA::Le: return "LE";
    case OpA::Gt: return "GT";
    case OpA::Ge: return "GE";
    case OpA::Jmp: return "JMP";
    case OpA::Jz: return "JZ";
    case OpA::RangeChk: return "RANGECHK";
    case OpA::IdxChk: return "IDXCHK";
    case OpA::Loop: return "LOOP";
    case OpA::In: return "IN";
    case OpA::Out: return "OUT";
    case OpA::Halt: return "HALT";
  }
  return nullptr;
}

std::span<const uint8_t> vm_a_opcodes()
{
  static const uint8_t ops[] = {
    0x10, 0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x1B, 0x1C, 0x1D, 0x1E,
    0x1F, 0x20, 0x21, 0x22, 0x23, 0x24, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x2B, 0x2C,
  };
  return ops;
}

namespace
{

struct Machine
{
  const VmAContext & ctx;
  int64_t stack[kVmAStackCapacity];
  uint32_t sp = 0;
  uint32_t highwater = 0;

  bool push(int64_t v)
  {
    if (sp >= kVmAStackCapacity) return false;
    stack[sp++] = v;
    if (sp > highwater) highwater = sp;
    return true;
  }
  bool pop(int64_t & v)
  {
    if (sp == 0) return false;
    v = stack[--sp];
    return true;
  }

  bool read_cell(uint64_t addr, int64_t & out)
  {
    if (!ctx.data.contains(addr, 4)) return false;
    const uint8_t * p = ctx.memory.data() + addr;
    uint32_t w = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
                 static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
    out = static_cast<int32_t>(w);
    return true;
  }

  bool write_cell(uint64_t addr, int64_t v)
  {
    if (!ctx.data.contains(addr, 4)) return false;
    auto w = static_cast<uint32_t>(static_cast<int32_t>(v));
    uint8_t * p = ctx.memory.data() + addr;
    p[0] = static_cast<uint8_t>(w);
    p[1] = static_cast<uint8_t>(w >> 8);
    p[2] = static_cast<uint8_t>(w >> 16);
    p[3] = static_cast<uint8_t>(w >> 24);
    return true;
  }
};

}  // namespace

VmOutcome run_vm_a(const VmAContext & ctx, std::span<const int64_t> inputs,
                   std::span<int64_t> out_latch, uint64_t budget,
                   const OpcodeCorruption * corruption, VmStats * stats)
{
  VmOutcome out;
  Machine m{ctx, {}, 0, 0};
  uint64_t pc = ctx.entry;

  auto fault = [&](VmFault f, uint64_t at) {
    out.ok = false;
    out.fault = f;
    out.fault_pc = static_cast<uint32_t>(at);
    out.stack_highwater = m.highwater;
    return out;
  };

  while (true) {
    if (out.executed >= budget) return fault(VmFault::Budget, pc);
    if (!ctx.code.contains(pc, 1)) return fault(VmFault::PcRange, pc);
    uint8_t opcode = ctx.memory[pc];
    int n_imm = vm_a_imm_count(opcode);
    if (n_imm < 0) return fault(VmFault::Decode, pc);
    if (!ctx.code.contains(pc, 1 + 4 * static_cast<uint64_t>(n_imm))) {
      return fault(VmFault::Decode, pc);
    }
    int32_t imm[3] = {0, 0, 0};
    for (int i = 0; i < n_imm; ++i) {
      const uint8_t * p = ctx.memory.data() + pc + 1 + 4 * static_cast<uint64_t>(i);
      imm[i] = static_cast<int32_t>(static_cast<uint32_t>(p[0]) |
                                    static_cast<uint32_t>(p[1]) << 8 |
                                    static_cast<uint32_t>(p[2]) << 16 |
                                    static_cast<uint32_t>(p[3]) << 24);
    }
    uint64_t next = pc + 1 + 4 * static_cast<uint64_t>(n_imm);
    ++out.executed;
    if (stats) ++stats->executed[opcode];
    bool corrupt = corruption && corruption->opcode == opcode;

    auto op = static_cast<OpA>(opcode);
    int64_t a, b;
    switch (op) {
      case OpA::Pushi:
        if (!m.push(imm[0] + (corrupt ? 1 : 0))) return fault(VmFault::StackOverflow, pc);
        break;
      case OpA::Load: {
        if (!m.read_cell(static_cast<uint32_t>(imm[0]), a)) return fault(VmFault::Mem, pc);
        if (!m.push(a + (corrupt ? 1 : 0))) return fault(VmFault::StackOverflow, pc);
        break;
      }
      case OpA::Store: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        if (corrupt) a += 1;
        if (!m.write_cell(static_cast<uint32_t>(imm[0]), a)) return fault(VmFault::Mem, pc);
        break;
      }
      case OpA::LoadIdx: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        uint64_t addr = static_cast<uint64_t>(static_cast<uint32_t>(imm[0])) +
                        4 * static_cast<uint64_t>(a);
        if (a < 0 || !m.read_cell(addr, b)) return fault(VmFault::Mem, pc);
        if (!m.push(b + (corrupt ? 1 : 0))) return fault(VmFault::StackOverflow, pc);
        break;
      }
      case OpA::StoreIdx: {
        if (!m.pop(b)) return fault(VmFault::StackUnderflow, pc);  // value
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);  // index
        if (corrupt) b += 1;
        uint64_t addr = static_cast<uint64_t>(static_cast<uint32_t>(imm[0])) +
                        4 * static_cast<uint64_t>(a);
        if (a < 0 || !m.write_cell(addr, b)) return fault(VmFault::Mem, pc);
        break;
      }
      case OpA::Add:
      case OpA::Sub:
      case OpA::Mul:
      case OpA::Div:
      case OpA::Mod: {
        if (!m.pop(b) || !m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        int64_t r = 0;
        bool ovf = false;
        switch (op) {
          case OpA::Add: ovf = __builtin_add_overflow(a, b, &r); break;
          case OpA::Sub: ovf = __builtin_sub_overflow(a, b, &r); break;
          case OpA::Mul: ovf = __builtin_mul_overflow(a, b, &r); break;
          case OpA::Div:
          case OpA::Mod:
            if (b == 0) return fault(VmFault::DivZero, pc);
            if (a == INT64_MIN && b == -1) return fault(VmFault::Overflow, pc);
            r = op == OpA::Div ? a / b : a % b;
            break;
          default: break;
        }
        if (ovf) return fault(VmFault::Overflow, pc);
        m.push(r + (corrupt ? 1 : 0));
        break;
      }
      case OpA::Neg: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        int64_t r;
        if (__builtin_sub_overflow(int64_t{0}, a, &r)) return fault(VmFault::Overflow, pc);
        m.push(r + (corrupt ? 1 : 0));
        break;
      }
      case OpA::Not: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        int64_t r = a == 0 ? 1 : 0;
        m.push(corrupt ? r ^ 1 : r);
        break;
      }
      case OpA::And:
      case OpA::Or:
      case OpA::Xor:
      case OpA::Eq:
      case OpA::Ne:
      case OpA::Lt:
      case OpA::Le:
      case OpA::Gt:
      case OpA::Ge: {
        if (!m.pop(b) || !m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        int64_t r = 0;
        switch (op) {
          case OpA::And: r = (a != 0 && b != 0) ? 1 : 0; break;
          case OpA::Or: r = (a != 0 || b != 0) ? 1 : 0; break;
          case OpA::Xor: r = ((a != 0) != (b != 0)) ? 1 : 0; break;
          case OpA::Eq: r = a == b ? 1 : 0; break;
          case OpA::Ne: r = a != b ? 1 : 0; break;
          case OpA::Lt: r = a < b ? 1 : 0; break;
          case OpA::Le: r = a <= b ? 1 : 0; break;
          case OpA::Gt: r = a > b ? 1 : 0; break;
          case OpA::Ge: r = a >= b ? 1 : 0; break;
          default: break;
        }
        m.push(corrupt ? r ^ 1 : r);
        break;
      }
      case OpA::Jmp:
        if (!corrupt) next = next + static_cast<int64_t>(imm[0]);
        break;
      case OpA::Jz: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        bool take = a == 0;
        if (corrupt) take = !take;
        if (take) next = next + static_cast<int64_t>(imm[0]);
        break;
      }
      case OpA::RangeChk: {
        if (m.sp == 0) return fault(VmFault::StackUnderflow, pc);
        int64_t v = m.stack[m.sp - 1];
        if (!corrupt && (v < imm[0] || v > imm[1])) return fault(VmFault::Range, pc);
        break;
      }
      case OpA::IdxChk: {
        if (m.sp == 0) return fault(VmFault::StackUnderflow, pc);
        int64_t v = m.stack[m.sp - 1];
        if (!corrupt && (v < 0 || v >= static_cast<int64_t>(imm[0]))) {
          return fault(VmFault::Index, pc);
        }
        break;
      }
      case OpA::Loop: {
        if (!m.read_cell(static_cast<uint32_t>(imm[0]), a)) return fault(VmFault::Mem, pc);
        int64_t v = a + 1;
        if (!m.write_cell(static_cast<uint32_t>(imm[0]), v)) return fault(VmFault::Mem, pc);
        bool again = v <= static_cast<int64_t>(imm[1]);
        if (corrupt) again = !again;
        if (again) next = next + static_cast<int64_t>(imm[2]);
        break;
      }
      case OpA::In: {
        auto k = static_cast<uint32_t>(imm[0]);
        if (k >= inputs.size()) return fault(VmFault::IoRange, pc);
        if (!m.push(inputs[k] + (corrupt ? 1 : 0))) return fault(VmFault::StackOverflow, pc);
        break;
      }
      case OpA::Out: {
        if (!m.pop(a)) return fault(VmFault::StackUnderflow, pc);
        auto k = static_cast<uint32_t>(imm[0]);
        if (k >= out_latch.size()) return fault(VmFault::IoRange, pc);
        out_latch[k] = a + (corrupt ? 1 : 0);
        break;
      }
      case OpA::Halt:
        if (!corrupt) {
          out.ok = true;
          out.stack_highwater = m.highwater;
          out.halt_top = m.sp > 0 ? m.stack[m.sp - 1] : 0;
          return out;
        }
        break;
    }
    pc = next;
  }
}

}  // namespace duplex

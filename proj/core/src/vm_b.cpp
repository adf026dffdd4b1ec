// duplex/vm_b.cpp
#include "duplex/vm_b.hpp"

namespace duplex
{

const char * vm_b_mnemonic(uint8_t opcode)
{
  switch (static_cast<OpB>(opcode)) {
    case OpB::Ldi: return "LDI";
    case OpB::Lui: return "LUI";
    case OpB::Ori: return "ORI";
    case OpB::Lw: return "LW";
    case OpB::Sw: return "SW";
    case OpB::Lx: return "LX";
    case OpB::Sx: return "SX";
    case OpB::Add: return "ADD";
    case OpB::Sub: return "SUB";
    case OpB::Mul: return "MUL";
    case OpB::Div: return "DIV";
    case OpB::Mod: return "MOD";
    case OpB::Neg: return "NEG";
    case OpB::Notl: return "NOTL";
    case OpB::Andl: return "ANDL";
    case OpB::Orl: return "ORL";
    case OpB::Xorl: return "XORL";
    case OpB::Ceq: return "CEQ";
    case OpB::Cne: return "CNE";
    case OpB::Clt: return "CLT";
    case OpB::Cle: return "CLE";
    case OpB::Cgt: return "CGT";
    case OpB::Cge: return "CGE";
    case OpB::J: return "J";
    case OpB::Bz: return "BZ";
    case OpB::Bnz: return "BNZ";
    case OpB::Tlt: return "TLT";
    case OpB::Tgt: return "TGT";
    case OpB::Trapz: return "TRAPZ";
    case OpB::Tidx: return "TIDX";
    case OpB::Addi: return "ADDI";
    case OpB::In: return "IN";
    case OpB::Out: return "OUT";
    case OpB::Halt: return "HALT";
  }
  return nullptr;
}

bool vm_b_valid_opcode(uint8_t opcode) { return vm_b_mnemonic(opcode) != nullptr; }

std::span<const uint8_t> vm_b_opcodes()
{
  static const uint8_t ops[] = {
    0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x8B, 0x8C, 0x8D, 0x8E,
    0x8F, 0x90, 0x91, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
    0x9B, 0x9C, 0x9D, 0x9E, 0x9F, 0xA0, 0xA1, 0xA2, 0xA3, 0xA4,
  };
  return ops;
}

VmOutcome run_vm_b(const VmBContext & ctx, std::span<const int64_t> inputs,
                   std::span<int64_t> out_latch, uint64_t budget,
                   const OpcodeCorruption * corruption, VmStats * stats)
{
  VmOutcome out;
  int64_t regs[16] = {0};
  uint64_t pc = ctx.entry;
  uint32_t region_cells = ctx.data.size / 4;

  auto fault = [&](VmFault f, uint64_t at) {
    out.ok = false;
    out.fault = f;
    out.fault_pc = static_cast<uint32_t>(at);
    return out;
  };

  auto cell_addr = [&](uint64_t cell) { return ctx.data.base + 4 * cell; };

  auto read_cell = [&](uint64_t cell, int64_t & v) {
    if (cell >= region_cells) return false;
    const uint8_t * p = ctx.memory.data() + cell_addr(cell);
    uint32_t w = static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
                 static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
    v = static_cast<int32_t>(w);
    return true;
  };

  auto write_cell = [&](uint64_t cell, int64_t v) {
    if (cell >= region_cells) return false;
    auto w = static_cast<uint32_t>(static_cast<int32_t>(v));
    uint8_t * p = ctx.memory.data() + cell_addr(cell);
    p[0] = static_cast<uint8_t>(w >> 24);
    p[1] = static_cast<uint8_t>(w >> 16);
    p[2] = static_cast<uint8_t>(w >> 8);
    p[3] = static_cast<uint8_t>(w);
    return true;
  };

  while (true) {
    if (out.executed >= budget) return fault(VmFault::Budget, pc);
    if (!ctx.code.contains(pc, 4)) return fault(VmFault::PcRange, pc);
    const uint8_t * w = ctx.memory.data() + pc;
    uint8_t opcode = w[0];
    if (!vm_b_valid_opcode(opcode)) return fault(VmFault::Decode, pc);
    int ra = w[1] >> 4;
    int rb = w[1] & 0xF;
    uint16_t immu = static_cast<uint16_t>(static_cast<uint16_t>(w[2]) << 8 | w[3]);
    auto imms = static_cast<int16_t>(immu);
    uint64_t next = pc + 4;
    ++out.executed;
    if (stats) ++stats->executed[opcode];
    bool corrupt = corruption && corruption->opcode == opcode;
    int64_t & A = regs[ra];
    int64_t & B = regs[rb];

    switch (static_cast<OpB>(opcode)) {
      case OpB::Ldi: A = static_cast<int64_t>(imms) + (corrupt ? 1 : 0); break;
      case OpB::Lui:
        A = static_cast<int32_t>(static_cast<uint32_t>(immu) << 16) + (corrupt ? 1 : 0);
        break;
      case OpB::Ori:
        A = static_cast<int32_t>(static_cast<uint32_t>(A) | immu) + (corrupt ? 1 : 0);
        break;
      case OpB::Lw: {
        int64_t v;
        if (!read_cell(immu, v)) return fault(VmFault::Mem, pc);
        A = v + (corrupt ? 1 : 0);
        break;
      }
      case OpB::Sw:
        if (!write_cell(immu, A + (corrupt ? 1 : 0))) return fault(VmFault::Mem, pc);
        break;
      case OpB::Lx: {
        if (B < 0) return fault(VmFault::Mem, pc);
        int64_t v;
        if (!read_cell(static_cast<uint64_t>(B) + immu, v)) return fault(VmFault::Mem, pc);
        A = v + (corrupt ? 1 : 0);
        break;
      }
      case OpB::Sx:
        if (B < 0) return fault(VmFault::Mem, pc);
        if (!write_cell(static_cast<uint64_t>(B) + immu, A + (corrupt ? 1 : 0))) {
          return fault(VmFault::Mem, pc);
        }
        break;
      case OpB::Add:
      case OpB::Sub:
      case OpB::Mul: {
        int64_t r;
        bool ovf = static_cast<OpB>(opcode) == OpB::Add   ? __builtin_add_overflow(A, B, &r)
                   : static_cast<OpB>(opcode) == OpB::Sub ? __builtin_sub_overflow(A, B, &r)
                                                          : __builtin_mul_overflow(A, B, &r);
        if (ovf) return fault(VmFault::Overflow, pc);
        A = r + (corrupt ? 1 : 0);
        break;
      }
      case OpB::Div:
      case OpB::Mod:
        if (B == 0) return fault(VmFault::DivZero, pc);
        if (A == INT64_MIN && B == -1) return fault(VmFault::Overflow, pc);
        A = (static_cast<OpB>(opcode) == OpB::Div ? A / B : A % B) + (corrupt ? 1 : 0);
        break;
      case OpB::Neg: {
        int64_t r;
        if (__builtin_sub_overflow(int64_t{0}, A, &r)) return fault(VmFault::Overflow, pc);
        A = r + (corrupt ? 1 : 0);
        break;
      }
      case OpB::Notl: {
        int64_t r = A == 0 ? 1 : 0;
        A = corrupt ? r ^ 1 : r;
        break;
      }
      case OpB::Andl:
      case OpB::Orl:
      case OpB::Xorl:
      case OpB::Ceq:
      case OpB::Cne:
      case OpB::Clt:
      case OpB::Cle:
      case OpB::Cgt:
      case OpB::Cge: {
        int64_t r = 0;
        switch (static_cast<OpB>(opcode)) {
          case OpB::Andl: r = (A != 0 && B != 0) ? 1 : 0; break;
          case OpB::Orl: r = (A != 0 || B != 0) ? 1 : 0; break;
          case OpB::Xorl: r = ((A != 0) != (B != 0)) ? 1 : 0; break;
          case OpB::Ceq: r = A == B ? 1 : 0; break;
          case OpB::Cne: r = A != B ? 1 : 0; break;
          case OpB::Clt: r = A < B ? 1 : 0; break;
          case OpB::Cle: r = A <= B ? 1 : 0; break;
          case OpB::Cgt: r = A > B ? 1 : 0; break;
          case OpB::Cge: r = A >= B ? 1 : 0; break;
          default: break;
        }
        A = corrupt ? r ^ 1 : r;
        break;
      }
      case OpB::J:
        if (!corrupt) next = pc + 4 + 4 * static_cast<int64_t>(imms);
        break;
      case OpB::Bz: {
        bool take = A == 0;
        if (corrupt) take = !take;
        if (take) next = pc + 4 + 4 * static_cast<int64_t>(imms);
        break;
      }
      case OpB::Bnz: {
        bool take = A != 0;
        if (corrupt) take = !take;
        if (take) next = pc + 4 + 4 * static_cast<int64_t>(imms);
        break;
      }
      case OpB::Tlt:
        if (!corrupt && A < B) return fault(VmFault::Range, pc);
        break;
      case OpB::Tgt:
        if (!corrupt && A > B) return fault(VmFault::Range, pc);
        break;
      case OpB::Trapz:
        if (!corrupt && A == 0) return fault(VmFault::DivZero, pc);
        break;
      case OpB::Tidx: {
        int64_t n = immu == 0 ? 65536 : static_cast<int64_t>(immu);
        if (!corrupt && (A < 0 || A >= n)) return fault(VmFault::Index, pc);
        break;
      }
      case OpB::Addi: {
        int64_t r;
        if (__builtin_add_overflow(A, static_cast<int64_t>(imms), &r)) {
          return fault(VmFault::Overflow, pc);
        }
        A = r + (corrupt ? 1 : 0);
        break;
      }
      case OpB::In: {
        if (immu >= inputs.size()) return fault(VmFault::IoRange, pc);
        A = inputs[immu] + (corrupt ? 1 : 0);
        break;
      }
      case OpB::Out:
        if (immu >= out_latch.size()) return fault(VmFault::IoRange, pc);
        out_latch[immu] = A + (corrupt ? 1 : 0);
        break;
      case OpB::Halt:
        if (!corrupt) {
          out.ok = true;
          out.halt_top = regs[1];
          return out;
        }
        break;
    }
    pc = next;
  }
}

}  // namespace duplex

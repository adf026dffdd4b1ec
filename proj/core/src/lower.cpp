// duplex/lower.cpp
#include <unordered_map>

#include "duplex/ir.hpp"
#include "duplex/typecheck.hpp"

namespace duplex
{

namespace
{

constexpr int64_t kUnrollLimit = 8;

class Lowerer
{
public:
  explicit Lowerer(const TypedModel & tm) : tm_(tm) {}

  IrProgram run()
  {
    emit_prologue();
    for (const auto & s : tm_.model.body) lower_stmt(*s);
    emit_epilogue();
    ir_.data_cells = tm_.total_cells();
    for (const auto & v : tm_.vars) {
      ir_.symbols.push_back({v.name, v.cell_offset, v.type.cell_count()});
    }
    for (int i = 0; i < tm_.n_loops; ++i) {
      ir_.symbols.push_back(
        {"loop#" + std::to_string(i), tm_.loop_cells_base + static_cast<uint32_t>(i), 1});
    }
    return std::move(ir_);
  }

private:
  int new_temp() { return ir_.n_temps++; }
  int new_label() { return ir_.n_labels++; }

  IrInst & emit(IrOp op)
  {
    ir_.code.push_back(IrInst{});
    ir_.code.back().op = op;
    return ir_.code.back();
  }

  void emit_prologue()
  {
    int k = 0;
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Input) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        int t = new_temp();
        auto & rd = emit(IrOp::ReadInput);
        rd.dst = t;
        rd.io_index = k++;
        auto & st = emit(IrOp::StoreVar);
        st.a = t;
        st.cell = v.cell_offset + i;
      }
    }
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Output) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        int t = new_temp();
        auto & c = emit(IrOp::ConstI);
        c.dst = t;
        c.imm = scalar_default(v.type.scalar);
        auto & st = emit(IrOp::StoreVar);
        st.a = t;
        st.cell = v.cell_offset + i;
      }
    }
  }

  void emit_epilogue()
  {
    int k = 0;
    for (const auto & v : tm_.vars) {
      if (v.section != VarSection::Output) continue;
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        int t = new_temp();
        auto & ld = emit(IrOp::LoadVar);
        ld.dst = t;
        ld.cell = v.cell_offset + i;
        auto & wr = emit(IrOp::WriteOutput);
        wr.a = t;
        wr.io_index = k++;
      }
    }
    emit(IrOp::Halt);
  }

  uint32_t loop_cell(int loop_id) const
  {
    return tm_.loop_cells_base + static_cast<uint32_t>(loop_id);
  }

  int lower_expr(const Expr & e)
  {
    switch (e.kind) {
      case Expr::Kind::BoolLit: {
        int t = new_temp();
        auto & c = emit(IrOp::ConstI);
        c.dst = t;
        c.imm = e.bval ? 1 : 0;
        return t;
      }
      case Expr::Kind::IntLit: {
        int t = new_temp();
        auto & c = emit(IrOp::ConstI);
        c.dst = t;
        c.imm = e.ival;
        return t;
      }
      case Expr::Kind::Var: {
        int t = new_temp();
        auto & ld = emit(IrOp::LoadVar);
        ld.dst = t;
        auto it = loop_scope_.find(e.name);
        ld.cell = it != loop_scope_.end() ? it->second
                                          : tm_.var(tm_.lookup(e.name)).cell_offset;
        return t;
      }
      case Expr::Kind::Elem: {
        const VarInfo & v = tm_.var(tm_.lookup(e.name));
        int ti = lower_index(*e.a, v.type.length);
        int t = new_temp();
        auto & ld = emit(IrOp::LoadElem);
        ld.dst = t;
        ld.a = ti;
        ld.cell = v.cell_offset;
        return t;
      }
      case Expr::Kind::Unary: {
        int ta = lower_expr(*e.a);
        int t = new_temp();
        auto & u = emit(IrOp::Un);
        u.dst = t;
        u.a = ta;
        u.un = e.un;
        return t;
      }
      case Expr::Kind::Binary: {
        int ta = lower_expr(*e.a);
        int tb = lower_expr(*e.b);
        int t = new_temp();
        auto & b = emit(IrOp::Bin);
        b.dst = t;
        b.a = ta;
        b.b = tb;
        b.bin = e.bin;
        return t;
      }
    }
    return -1;
  }

  // Index expressions with a constant value skip the dynamic check: the
  // typechecker has already proven them in bounds.
  int lower_index(const Expr & idx, uint32_t len)
  {
    if (idx.kind == Expr::Kind::IntLit) {
      int t = new_temp();
      auto & c = emit(IrOp::ConstI);
      c.dst = t;
      c.imm = idx.ival;
      return t;
    }
    int t = lower_expr(idx);
    auto & chk = emit(IrOp::IdxChk);
    chk.a = t;
    chk.imm = len;
    return t;
  }

  void lower_stmt(const Stmt & s)
  {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        const VarInfo & v = tm_.var(tm_.lookup(s.target));
        if (s.index) {
          int ti = lower_index(*s.index, v.type.length);
          int tv = lower_expr(*s.value);
          maybe_range_check(tv, v);
          auto & st = emit(IrOp::StoreElem);
          st.a = ti;
          st.b = tv;
          st.cell = v.cell_offset;
        } else {
          int tv = lower_expr(*s.value);
          maybe_range_check(tv, v);
          auto & st = emit(IrOp::StoreVar);
          st.a = tv;
          st.cell = v.cell_offset;
        }
        break;
      }
      case Stmt::Kind::If: {
        int l_end = new_label();
        for (const auto & arm : s.arms) {
          int l_next = new_label();
          int tc = lower_expr(*arm.cond);
          auto & jf = emit(IrOp::JumpIfFalse);
          jf.a = tc;
          jf.label = l_next;
          for (const auto & st : arm.body) lower_stmt(*st);
          auto & j = emit(IrOp::Jump);
          j.label = l_end;
          emit(IrOp::Label).label = l_next;
        }
        for (const auto & st : s.else_body) lower_stmt(*st);
        emit(IrOp::Label).label = l_end;
        break;
      }
      case Stmt::Kind::For: {
        if (s.lo_val > s.hi_val) break;
        uint32_t cell = loop_cell(s.loop_id);
        loop_scope_[s.loop_var] = cell;
        int64_t trips = s.hi_val - s.lo_val + 1;
        if (trips <= kUnrollLimit) {
          for (int64_t i = s.lo_val; i <= s.hi_val; ++i) {
            auto & init = emit(IrOp::LoopInit);
            init.cell = cell;
            init.imm = i;
            for (const auto & st : s.body) lower_stmt(*st);
          }
        } else {
          auto & init = emit(IrOp::LoopInit);
          init.cell = cell;
          init.imm = s.lo_val;
          int l_top = new_label();
          emit(IrOp::Label).label = l_top;
          for (const auto & st : s.body) lower_stmt(*st);
          auto & back = emit(IrOp::LoopBack);
          back.cell = cell;
          back.imm = s.hi_val;
          back.label = l_top;
        }
        loop_scope_.erase(s.loop_var);
        break;
      }
    }
  }

  void maybe_range_check(int temp, const VarInfo & v)
  {
    if (v.type.scalar.kind != ScalarKind::Int) return;
    auto & chk = emit(IrOp::RangeChk);
    chk.a = temp;
    chk.imm = v.type.scalar.lo;
    chk.imm2 = v.type.scalar.hi;
  }

  const TypedModel & tm_;
  IrProgram ir_;
  std::unordered_map<std::string, uint32_t> loop_scope_;
};

}  // namespace

IrProgram lower(const TypedModel & tm)
{
  Lowerer l(tm);
  return l.run();
}

}  // namespace duplex

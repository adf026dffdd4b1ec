// duplex/interp.cpp
#include "duplex/interp.hpp"

#include <unordered_map>

namespace duplex
{

const char * trap_name(TrapKind k)
{
  switch (k) {
    case TrapKind::Range: return "range_violation";
    case TrapKind::DivZero: return "div_by_zero";
    case TrapKind::Overflow: return "overflow";
    case TrapKind::Index: return "index_out_of_bounds";
  }
  return "?";
}

namespace
{

struct TrapException
{
  Trap trap;
};

[[noreturn]] void raise(TrapKind kind, SourceSpan span) { throw TrapException{{kind, span}}; }

class Interp
{
public:
  Interp(const TypedModel & tm, std::vector<int64_t> & cells) : tm_(tm), cells_(cells) {}

  uint64_t ops = 0;

  void run_body()
  {
    for (const auto & s : tm_.model.body) exec_stmt(*s);
  }

  int64_t eval(const Expr & e)
  {
    switch (e.kind) {
      case Expr::Kind::BoolLit:
        ++ops;
        return e.bval ? 1 : 0;
      case Expr::Kind::IntLit:
        ++ops;
        return e.ival;
      case Expr::Kind::Var: {
        ++ops;
        auto it = loop_cells_.find(e.name);
        if (it != loop_cells_.end()) return cells_[it->second];
        const VarInfo & v = tm_.var(tm_.lookup(e.name));
        return cells_[v.cell_offset];
      }
      case Expr::Kind::Elem: {
        int64_t idx = eval(*e.a);
        ++ops;
        const VarInfo & v = tm_.var(tm_.lookup(e.name));
        if (idx < 0 || idx >= static_cast<int64_t>(v.type.length)) {
          raise(TrapKind::Index, e.span);
        }
        return cells_[v.cell_offset + static_cast<uint32_t>(idx)];
      }
      case Expr::Kind::Unary: {
        int64_t a = eval(*e.a);
        ++ops;
        if (e.un == UnOp::Not) return a == 0 ? 1 : 0;
        int64_t r;
        if (__builtin_sub_overflow(int64_t{0}, a, &r)) raise(TrapKind::Overflow, e.span);
        return r;
      }
      case Expr::Kind::Binary: {
        int64_t a = eval(*e.a);
        int64_t b = eval(*e.b);
        ++ops;
        return apply_bin(e.bin, a, b, e.span);
      }
    }
    return 0;
  }

  static int64_t apply_bin(BinOp op, int64_t a, int64_t b, SourceSpan span)
  {
    int64_t r = 0;
    switch (op) {
      case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
      case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
      case BinOp::Xor: return ((a != 0) != (b != 0)) ? 1 : 0;
      case BinOp::Eq: return a == b ? 1 : 0;
      case BinOp::Ne: return a != b ? 1 : 0;
      case BinOp::Lt: return a < b ? 1 : 0;
      case BinOp::Le: return a <= b ? 1 : 0;
      case BinOp::Gt: return a > b ? 1 : 0;
      case BinOp::Ge: return a >= b ? 1 : 0;
      case BinOp::Add:
        if (__builtin_add_overflow(a, b, &r)) raise(TrapKind::Overflow, span);
        return r;
      case BinOp::Sub:
        if (__builtin_sub_overflow(a, b, &r)) raise(TrapKind::Overflow, span);
        return r;
      case BinOp::Mul:
        if (__builtin_mul_overflow(a, b, &r)) raise(TrapKind::Overflow, span);
        return r;
      case BinOp::Div:
        if (b == 0) raise(TrapKind::DivZero, span);
        if (a == INT64_MIN && b == -1) raise(TrapKind::Overflow, span);
        return a / b;
      case BinOp::Mod:
        if (b == 0) raise(TrapKind::DivZero, span);
        if (a == INT64_MIN && b == -1) raise(TrapKind::Overflow, span);
        return a % b;
    }
    return r;
  }

  void exec_stmt(const Stmt & s)
  {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        const VarInfo & v = tm_.var(tm_.lookup(s.target));
        uint32_t cell = v.cell_offset;
        if (s.index) {
          int64_t idx = eval(*s.index);
          if (idx < 0 || idx >= static_cast<int64_t>(v.type.length)) {
            raise(TrapKind::Index, s.span);
          }
          cell += static_cast<uint32_t>(idx);
        }
        int64_t val = eval(*s.value);
        ++ops;  // store
        if (v.type.scalar.kind == ScalarKind::Int &&
            (val < v.type.scalar.lo || val > v.type.scalar.hi)) {
          raise(TrapKind::Range, s.span);
        }
        cells_[cell] = val;
        break;
      }
      case Stmt::Kind::If: {
        for (const auto & arm : s.arms) {
          if (eval(*arm.cond) != 0) {
            for (const auto & st : arm.body) exec_stmt(*st);
            return;
          }
        }
        for (const auto & st : s.else_body) exec_stmt(*st);
        break;
      }
      case Stmt::Kind::For: {
        if (s.lo_val > s.hi_val) break;
        uint32_t cell = tm_.loop_cells_base + static_cast<uint32_t>(s.loop_id);
        loop_cells_[s.loop_var] = cell;
        for (int64_t i = s.lo_val;; ++i) {
          cells_[cell] = i;
          ops += 2;  // per-iteration loop bookkeeping
          for (const auto & st : s.body) exec_stmt(*st);
          if (i == s.hi_val) break;
        }
        loop_cells_.erase(s.loop_var);
        break;
      }
    }
  }

private:
  const TypedModel & tm_;
  std::vector<int64_t> & cells_;
  std::unordered_map<std::string, uint32_t> loop_cells_;
};

}  // namespace

std::vector<int64_t> initial_cells(const TypedModel & tm)
{
  std::vector<int64_t> cells(tm.total_cells(), 0);
  for (const auto & v : tm.vars) {
    for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
      cells[v.cell_offset + i] = v.init;
    }
  }
  return cells;
}

uint32_t input_cell_count(const TypedModel & tm)
{
  uint32_t n = 0;
  for (const auto & v : tm.vars) {
    if (v.section == VarSection::Input) n += v.type.cell_count();
  }
  return n;
}

StepResult interp_step(const TypedModel & tm, std::vector<int64_t> & cells,
                       std::span<const int64_t> inputs)
{
  StepResult res;
  // Fail-safe reset of outputs, then input latch. Not part of the body cost.
  size_t in_pos = 0;
  for (const auto & v : tm.vars) {
    if (v.section == VarSection::Output) {
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        cells[v.cell_offset + i] = scalar_default(v.type.scalar);
      }
    } else if (v.section == VarSection::Input) {
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        cells[v.cell_offset + i] = in_pos < inputs.size() ? inputs[in_pos] : 0;
        ++in_pos;
      }
    }
  }
  Interp it(tm, cells);
  try {
    it.run_body();
  } catch (const TrapException & t) {
    res.trap = t.trap;
  }
  res.ops = it.ops;
  return res;
}

std::vector<int64_t> read_section(const TypedModel & tm, const std::vector<int64_t> & cells,
                                  const std::vector<int> & ids)
{
  std::vector<int64_t> out;
  for (int id : ids) {
    const VarInfo & v = tm.var(id);
    for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
      out.push_back(cells[v.cell_offset + i]);
    }
  }
  return out;
}

std::vector<uint8_t> canonical_bytes(const TypedModel & tm, const std::vector<int64_t> & cells,
                                     const std::vector<int> & ids)
{
  std::vector<uint8_t> out;
  for (int id : ids) {
    const VarInfo & v = tm.var(id);
    for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
      auto w = static_cast<uint32_t>(static_cast<int32_t>(cells[v.cell_offset + i]));
      out.push_back(static_cast<uint8_t>(w));
      out.push_back(static_cast<uint8_t>(w >> 8));
      out.push_back(static_cast<uint8_t>(w >> 16));
      out.push_back(static_cast<uint8_t>(w >> 24));
    }
  }
  return out;
}

bool eval_invariant(const TypedModel & tm, const std::vector<int64_t> & cells, bool * trapped)
{
  if (trapped) *trapped = false;
  if (!tm.model.invariant) return true;
  auto mutable_cells = cells;
  Interp it(tm, mutable_cells);
  try {
    return it.eval(*tm.model.invariant) != 0;
  } catch (const TrapException &) {
    if (trapped) *trapped = true;
    return false;
  }
}

}  // namespace duplex

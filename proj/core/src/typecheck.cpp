// duplex/typecheck.cpp
#include "duplex/typecheck.hpp"

#include <limits>
#include <unordered_set>

namespace duplex
{

namespace
{

class Checker
{
public:
  explicit Checker(const Model & m) : src_(m) {}

  TypecheckResult run()
  {
    TypecheckResult res;
    tm_.model = clone_model(src_);
    collect_decls();
    if (!diags_.empty()) {
      res.diagnostics = std::move(diags_);
      return res;
    }
    for (auto & s : tm_.model.body) check_stmt(*s);
    if (tm_.model.invariant) {
      ScalarKind k = check_expr(*tm_.model.invariant, true);
      if (k != ScalarKind::Bool) {
        error(tm_.model.invariant->span, "type-mismatch", "invariant must be boolean");
      }
    }
    finish_layout();
    res.diagnostics = std::move(diags_);
    if (res.diagnostics.empty()) {
      res.typed = std::move(tm_);
    }
    return res;
  }

private:
  void error(SourceSpan span, const char * code, std::string msg)
  {
    diags_.push_back(error_at(span, code, std::move(msg)));
  }

  void declare(const std::string & name, SourceSpan span)
  {
    if (!names_.insert(name).second) {
      error(span, "duplicate-identifier", "identifier '" + name + "' already declared");
    }
  }

  void collect_decls()
  {
    auto add_vars = [&](std::vector<VarDecl> & decls, VarSection section) {
      int si = 0;
      for (auto & d : decls) {
        declare(d.name, d.span);
        VarInfo info;
        info.name = d.name;
        info.section = section;
        info.section_index = si++;
        info.type = d.type;
        if (section == VarSection::State && d.init) {
          if (d.type.scalar.kind == ScalarKind::Bool) {
            if (*d.init != 0 && *d.init != 1) {
              error(d.span, "type-mismatch", "boolean initializer must be TRUE or FALSE");
            }
            info.init = *d.init ? 1 : 0;
          } else {
            if (*d.init < d.type.scalar.lo || *d.init > d.type.scalar.hi) {
              error(d.span, "range", "initializer outside declared range");
            }
            info.init = *d.init;
          }
        } else {
          info.init = scalar_default(d.type.scalar);
        }
        tm_.var_index[d.name] = static_cast<int>(tm_.vars.size());
        tm_.vars.push_back(std::move(info));
      }
    };
    add_vars(tm_.model.inputs, VarSection::Input);
    add_vars(tm_.model.outputs, VarSection::Output);
    add_vars(tm_.model.state, VarSection::State);
    tm_.n_inputs = static_cast<int>(tm_.model.inputs.size());
    tm_.n_outputs = static_cast<int>(tm_.model.outputs.size());
    tm_.n_state = static_cast<int>(tm_.model.state.size());
    for (const auto & c : tm_.model.constants) {
      declare(c.name, c.span);
      if (c.value < INT32_MIN || c.value > INT32_MAX) {
        error(c.span, "range", "constant must fit in signed 32 bits");
      }
      constants_[c.name] = c.value;
    }
  }

  void finish_layout()
  {
    uint32_t offset = 0;
    for (auto & v : tm_.vars) {
      v.cell_offset = offset;
      offset += v.type.cell_count();
    }
    tm_.var_cells = offset;
    tm_.loop_cells_base = offset;
  }

  // Rewrites constant references into literals in place.
  bool fold_constant_ref(Expr & e)
  {
    auto it = constants_.find(e.name);
    if (it == constants_.end()) return false;
    e.kind = Expr::Kind::IntLit;
    e.ival = it->second;
    e.name.clear();
    e.type = ScalarKind::Int;
    return true;
  }

  // Constant evaluation over folded literals; used for FOR bounds and
  // constant array indices. Returns nullopt when not constant.
  std::optional<int64_t> const_eval(const Expr & e)
  {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return e.ival;
      case Expr::Kind::Unary:
        if (e.un == UnOp::Neg) {
          auto v = const_eval(*e.a);
          if (v) return -*v;
        }
        return std::nullopt;
      case Expr::Kind::Binary: {
        auto a = const_eval(*e.a);
        auto b = const_eval(*e.b);
        if (!a || !b) return std::nullopt;
        switch (e.bin) {
          case BinOp::Add: return *a + *b;
          case BinOp::Sub: return *a - *b;
          case BinOp::Mul: return *a * *b;
          case BinOp::Div:
            if (*b == 0) return std::nullopt;
            return *a / *b;
          case BinOp::Mod:
            if (*b == 0) return std::nullopt;
            return *a % *b;
          default:
            return std::nullopt;
        }
      }
      default:
        return std::nullopt;
    }
  }

  ScalarKind check_expr(Expr & e, bool invariant_ctx)
  {
    switch (e.kind) {
      case Expr::Kind::BoolLit:
        e.type = ScalarKind::Bool;
        return e.type;
      case Expr::Kind::IntLit:
        if (e.ival < INT32_MIN || e.ival > INT32_MAX) {
          error(e.span, "range", "integer literal must fit in signed 32 bits");
        }
        e.type = ScalarKind::Int;
        return e.type;
      case Expr::Kind::Var: {
        if (fold_constant_ref(e)) return ScalarKind::Int;
        if (loop_vars_.count(e.name)) {
          if (invariant_ctx) {
            error(e.span, "unknown-identifier", "loop index not visible here");
          }
          e.type = ScalarKind::Int;
          return e.type;
        }
        int idx = tm_.lookup(e.name);
        if (idx < 0) {
          error(e.span, "unknown-identifier", "unknown identifier '" + e.name + "'");
          e.type = ScalarKind::Int;
          return e.type;
        }
        const VarInfo & v = tm_.var(idx);
        if (v.type.is_array) {
          error(e.span, "type-mismatch", "array '" + e.name + "' must be indexed");
        }
        if (invariant_ctx && v.section != VarSection::State) {
          error(e.span, "invariant-scope", "invariant may only reference state variables");
        }
        e.type = v.type.scalar.kind;
        return e.type;
      }
      case Expr::Kind::Elem: {
        int idx = tm_.lookup(e.name);
        if (idx < 0) {
          error(e.span, "unknown-identifier", "unknown identifier '" + e.name + "'");
          e.type = ScalarKind::Int;
          return e.type;
        }
        const VarInfo & v = tm_.var(idx);
        if (!v.type.is_array) {
          error(e.span, "type-mismatch", "'" + e.name + "' is not an array");
        }
        if (invariant_ctx && v.section != VarSection::State) {
          error(e.span, "invariant-scope", "invariant may only reference state variables");
        }
        ScalarKind it = check_expr(*e.a, invariant_ctx);
        if (it != ScalarKind::Int) {
          error(e.a->span, "index-type", "array index must be an integer");
        }
        if (auto ci = const_eval(*e.a)) {
          if (v.type.is_array && (*ci < 0 || *ci >= static_cast<int64_t>(v.type.length))) {
            error(e.a->span, "index-range", "constant index outside array bounds");
          }
        }
        e.type = v.type.scalar.kind;
        return e.type;
      }
      case Expr::Kind::Unary: {
        ScalarKind at = check_expr(*e.a, invariant_ctx);
        if (e.un == UnOp::Not) {
          if (at != ScalarKind::Bool) {
            error(e.span, "type-mismatch", "NOT requires a boolean operand");
          }
          e.type = ScalarKind::Bool;
        } else {
          if (at != ScalarKind::Int) {
            error(e.span, "type-mismatch", "unary minus requires an integer operand");
          }
          e.type = ScalarKind::Int;
        }
        return e.type;
      }
      case Expr::Kind::Binary: {
        ScalarKind at = check_expr(*e.a, invariant_ctx);
        ScalarKind bt = check_expr(*e.b, invariant_ctx);
        switch (e.bin) {
          case BinOp::And:
          case BinOp::Or:
          case BinOp::Xor:
            if (at != ScalarKind::Bool || bt != ScalarKind::Bool) {
              error(e.span, "type-mismatch", "boolean operator requires boolean operands");
            }
            e.type = ScalarKind::Bool;
            break;
          case BinOp::Eq:
          case BinOp::Ne:
            if (at != bt) {
              error(e.span, "type-mismatch", "comparison operands must have the same type");
            }
            e.type = ScalarKind::Bool;
            break;
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            if (at != ScalarKind::Int || bt != ScalarKind::Int) {
              error(e.span, "type-mismatch", "ordering comparison requires integer operands");
            }
            e.type = ScalarKind::Bool;
            break;
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
          case BinOp::Div:
          case BinOp::Mod:
            if (at != ScalarKind::Int || bt != ScalarKind::Int) {
              error(e.span, "type-mismatch", "arithmetic requires integer operands");
            }
            e.type = ScalarKind::Int;
            break;
        }
        return e.type;
      }
    }
    return ScalarKind::Int;
  }

  void check_stmt(Stmt & s)
  {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        if (loop_vars_.count(s.target)) {
          error(s.span, "assign-loop-index", "cannot assign to FOR index '" + s.target + "'");
          break;
        }
        if (constants_.count(s.target)) {
          error(s.span, "assign-constant", "cannot assign to constant '" + s.target + "'");
          break;
        }
        int idx = tm_.lookup(s.target);
        if (idx < 0) {
          error(s.span, "unknown-identifier", "unknown identifier '" + s.target + "'");
          break;
        }
        const VarInfo & v = tm_.var(idx);
        if (v.section == VarSection::Input) {
          error(s.span, "assign-input", "cannot assign to input '" + s.target + "'");
        }
        if (v.type.is_array) {
          if (!s.index) {
            error(s.span, "type-mismatch", "array assignment requires an element index");
          }
        } else if (s.index) {
          error(s.span, "type-mismatch", "'" + s.target + "' is not an array");
        }
        if (s.index) {
          ScalarKind it = check_expr(*s.index, false);
          if (it != ScalarKind::Int) {
            error(s.index->span, "index-type", "array index must be an integer");
          }
          if (auto ci = const_eval(*s.index)) {
            if (v.type.is_array && (*ci < 0 || *ci >= static_cast<int64_t>(v.type.length))) {
              error(s.index->span, "index-range", "constant index outside array bounds");
            }
          }
        }
        ScalarKind vt = check_expr(*s.value, false);
        if (vt != v.type.scalar.kind) {
          error(s.span, "type-mismatch", "assignment type mismatch for '" + s.target + "'");
        }
        break;
      }
      case Stmt::Kind::If:
        for (auto & arm : s.arms) {
          ScalarKind ct = check_expr(*arm.cond, false);
          if (ct != ScalarKind::Bool) {
            error(arm.cond->span, "type-mismatch", "IF condition must be boolean");
          }
          for (auto & st : arm.body) check_stmt(*st);
        }
        for (auto & st : s.else_body) check_stmt(*st);
        break;
      case Stmt::Kind::For: {
        if (names_.count(s.loop_var) || loop_vars_.count(s.loop_var)) {
          error(s.span, "duplicate-identifier",
                "loop index '" + s.loop_var + "' shadows another name");
        }
        check_expr(*s.lo_expr, false);
        check_expr(*s.hi_expr, false);
        auto lo = const_eval(*s.lo_expr);
        auto hi = const_eval(*s.hi_expr);
        if (!lo || !hi) {
          error(s.span, "non-constant-bound", "FOR bounds must be constant expressions");
          break;
        }
        if (*lo < INT32_MIN || *lo > INT32_MAX || *hi < INT32_MIN || *hi > INT32_MAX) {
          error(s.span, "range", "FOR bounds must fit in signed 32 bits");
          break;
        }
        s.lo_val = *lo;
        s.hi_val = *hi;
        s.loop_id = tm_.n_loops++;
        loop_vars_.insert(s.loop_var);
        loop_cell_of_[s.loop_var] = s.loop_id;
        for (auto & st : s.body) check_stmt(*st);
        loop_vars_.erase(s.loop_var);
        loop_cell_of_.erase(s.loop_var);
        break;
      }
    }
  }

  const Model & src_;
  TypedModel tm_;
  std::vector<Diagnostic> diags_;
  std::unordered_set<std::string> names_;
  std::unordered_set<std::string> loop_vars_;
  std::unordered_map<std::string, int> loop_cell_of_;
  std::unordered_map<std::string, int64_t> constants_;
};

}  // namespace

TypecheckResult typecheck(const Model & m)
{
  Checker c(m);
  return c.run();
}

std::vector<int> output_var_ids(const TypedModel & tm)
{
  std::vector<int> ids;
  for (size_t i = 0; i < tm.vars.size(); ++i) {
    if (tm.vars[i].section == VarSection::Output) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

std::vector<int> state_var_ids(const TypedModel & tm)
{
  std::vector<int> ids;
  for (size_t i = 0; i < tm.vars.size(); ++i) {
    if (tm.vars[i].section == VarSection::State) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

}  // namespace duplex

// duplex/gen.cpp
#include "duplex/gen.hpp"

#include <algorithm>

#include "duplex/util.hpp"

namespace duplex
{

namespace
{

constexpr int64_t kOpCap = 1ll << 20;

struct IExpr
{
  ExprPtr e;
  int64_t lo = 0;
  int64_t hi = 0;
};

struct GenVar
{
  std::string name;
  VarType type;
  bool writable = false;
};

class ProgramGen
{
public:
  explicit ProgramGen(const GenConfig & cfg) : cfg_(cfg), rng_(cfg.seed * 2654435761u + 1) {}

  Model run()
  {
    m_.name = "fuzz_" + std::to_string(cfg_.seed);
    declare_vars();
    uint32_t budget = cfg_.statement_budget;
    m_.body = gen_stmts(budget, 0);
    return std::move(m_);
  }

private:
  int64_t pick(int64_t lo, int64_t hi) { return rng_.range(lo, hi); }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  ScalarType random_int_type()
  {
    ScalarType t;
    t.kind = ScalarKind::Int;
    switch (pick(0, 3)) {
      case 0:
        t.lo = 0;
        t.hi = static_cast<int32_t>(pick(1, 30));
        break;
      case 1:
        t.lo = static_cast<int32_t>(pick(-30, -1));
        t.hi = static_cast<int32_t>(pick(0, 30));
        break;
      case 2:
        t.lo = static_cast<int32_t>(pick(-1000, 0));
        t.hi = t.lo + static_cast<int32_t>(pick(1, 5000));
        break;
      default:
        // occasionally a huge range to exercise wide constants
        t.lo = INT32_MIN;
        t.hi = INT32_MAX;
        break;
    }
    return t;
  }

  VarType random_var_type(bool allow_array)
  {
    VarType t;
    if (allow_array && chance(20)) {
      t.is_array = true;
      t.length = static_cast<uint32_t>(pick(2, 6));
    }
    if (chance(50)) {
      t.scalar.kind = ScalarKind::Bool;
    } else {
      t.scalar = random_int_type();
    }
    return t;
  }

  void declare_vars()
  {
    uint32_t n_in = static_cast<uint32_t>(pick(1, cfg_.max_inputs));
    uint32_t n_out = static_cast<uint32_t>(pick(1, cfg_.max_outputs));
    uint32_t n_state = static_cast<uint32_t>(pick(0, cfg_.max_state));
    for (uint32_t i = 0; i < n_in; ++i) {
      VarDecl d;
      d.name = "in" + std::to_string(i);
      d.type = random_var_type(true);
      m_.inputs.push_back(d);
      vars_.push_back({d.name, d.type, false});
    }
    for (uint32_t i = 0; i < n_out; ++i) {
      VarDecl d;
      d.name = "out" + std::to_string(i);
      d.type = random_var_type(true);
      m_.outputs.push_back(d);
      vars_.push_back({d.name, d.type, true});
    }
    for (uint32_t i = 0; i < n_state; ++i) {
      VarDecl d;
      d.name = "st" + std::to_string(i);
      d.type = random_var_type(true);
      if (chance(50)) {
        d.init = d.type.scalar.kind == ScalarKind::Bool
                   ? pick(0, 1)
                   : pick(d.type.scalar.lo, d.type.scalar.hi);
      }
      m_.state.push_back(d);
      vars_.push_back({d.name, d.type, true});
    }
    uint32_t n_const = static_cast<uint32_t>(pick(0, 2));
    for (uint32_t i = 0; i < n_const; ++i) {
      ConstDecl c;
      c.name = "C" + std::to_string(i);
      c.value = pick(-100, 100);
      m_.constants.push_back(c);
      constants_.push_back(c);
    }
  }

  // ((e MOD s) + s) MOD s + lo: total in [lo, lo+s-1], using only small
  // literals, valid for any operand interval.
  IExpr wrap_into(IExpr e, int64_t lo, int64_t hi)
  {
    if (e.lo >= lo && e.hi <= hi) return e;
    int64_t span = hi - lo + 1;
    if (span > kOpCap) span = kOpCap;
    ExprPtr x = make_binary(BinOp::Mod, std::move(e.e), make_int_lit(span));
    x = make_binary(BinOp::Add, std::move(x), make_int_lit(span));
    x = make_binary(BinOp::Mod, std::move(x), make_int_lit(span));
    if (lo != 0) {
      x = make_binary(BinOp::Add, std::move(x), make_int_lit(lo));
    }
    return {std::move(x), lo, lo + span - 1};
  }

  IExpr capped(IExpr e)
  {
    if (e.lo < -kOpCap || e.hi > kOpCap) {
      return wrap_into(std::move(e), -256, 255);
    }
    return e;
  }

  std::vector<size_t> vars_matching(ScalarKind kind, bool arrays)
  {
    std::vector<size_t> out;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].type.is_array == arrays && vars_[i].type.scalar.kind == kind) {
        out.push_back(i);
      }
    }
    return out;
  }

  ExprPtr gen_index(uint32_t length, int depth)
  {
    // A constant, an in-range loop variable, or a wrapped expression.
    if (!loops_.empty() && chance(40)) {
      for (const auto & l : loops_) {
        if (l.lo >= 0 && l.hi < static_cast<int64_t>(length)) {
          return make_var(l.name);
        }
      }
    }
    if (chance(50) || depth > 3) {
      return make_int_lit(pick(0, length - 1));
    }
    IExpr e = gen_int_expr(depth + 1);
    return wrap_into(std::move(e), 0, static_cast<int64_t>(length) - 1).e;
  }

  IExpr gen_int_leaf(int depth)
  {
    for (int attempt = 0; attempt < 4; ++attempt) {
      switch (pick(0, 4)) {
        case 0: {
          int64_t v = pick(-40, 40);
          return {make_int_lit(v), v, v};
        }
        case 1: {
          auto scalars = vars_matching(ScalarKind::Int, false);
          if (scalars.empty()) break;
          const GenVar & v = vars_[scalars[static_cast<size_t>(pick(0, scalars.size() - 1))]];
          return {make_var(v.name), v.type.scalar.lo, v.type.scalar.hi};
        }
        case 2: {
          auto arrays = vars_matching(ScalarKind::Int, true);
          if (arrays.empty()) break;
          const GenVar & v = vars_[arrays[static_cast<size_t>(pick(0, arrays.size() - 1))]];
          return {make_elem(v.name, gen_index(v.type.length, depth)), v.type.scalar.lo,
                  v.type.scalar.hi};
        }
        case 3: {
          if (loops_.empty()) break;
          const auto & l = loops_[static_cast<size_t>(pick(0, loops_.size() - 1))];
          return {make_var(l.name), l.lo, l.hi};
        }
        default: {
          if (constants_.empty()) break;
          const auto & c = constants_[static_cast<size_t>(pick(0, constants_.size() - 1))];
          return {make_var(c.name), c.value, c.value};
        }
      }
    }
    int64_t v = pick(-10, 10);
    return {make_int_lit(v), v, v};
  }

  IExpr gen_int_expr(int depth)
  {
    if (depth >= 4 || chance(30)) {
      return gen_int_leaf(depth);
    }
    switch (pick(0, 5)) {
      case 0: {  // negate
        IExpr a = capped(gen_int_expr(depth + 1));
        return {make_unary(UnOp::Neg, std::move(a.e)), -a.hi, -a.lo};
      }
      case 1: {  // add
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr b = capped(gen_int_expr(depth + 1));
        return capped({make_binary(BinOp::Add, std::move(a.e), std::move(b.e)), a.lo + b.lo,
                       a.hi + b.hi});
      }
      case 2: {  // sub
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr b = capped(gen_int_expr(depth + 1));
        return capped({make_binary(BinOp::Sub, std::move(a.e), std::move(b.e)), a.lo - b.hi,
                       a.hi - b.lo});
      }
      case 3: {  // mul
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr b = capped(gen_int_expr(depth + 1));
        int64_t p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        return capped({make_binary(BinOp::Mul, std::move(a.e), std::move(b.e)),
                       std::min(std::min(p1, p2), std::min(p3, p4)),
                       std::max(std::max(p1, p2), std::max(p3, p4))});
      }
      case 4: {  // division by a constructed nonzero divisor
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr d = wrap_into(gen_int_expr(depth + 1), 1, 8);
        int64_t m = std::max(std::abs(a.lo), std::abs(a.hi));
        return {make_binary(BinOp::Div, std::move(a.e), std::move(d.e)), -m, m};
      }
      default: {  // modulo by a constructed nonzero divisor
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr d = wrap_into(gen_int_expr(depth + 1), 1, 8);
        return {make_binary(BinOp::Mod, std::move(a.e), std::move(d.e)), -7, 7};
      }
    }
  }

  ExprPtr gen_bool_expr(int depth)
  {
    if (depth >= 4 || chance(25)) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        switch (pick(0, 2)) {
          case 0:
            return make_bool_lit(pick(0, 1) != 0);
          case 1: {
            auto scalars = vars_matching(ScalarKind::Bool, false);
            if (scalars.empty()) break;
            return make_var(vars_[scalars[static_cast<size_t>(pick(0, scalars.size() - 1))]].name);
          }
          default: {
            auto arrays = vars_matching(ScalarKind::Bool, true);
            if (arrays.empty()) break;
            const GenVar & v = vars_[arrays[static_cast<size_t>(pick(0, arrays.size() - 1))]];
            return make_elem(v.name, gen_index(v.type.length, depth));
          }
        }
      }
      return make_bool_lit(pick(0, 1) != 0);
    }
    switch (pick(0, 4)) {
      case 0:
        return make_unary(UnOp::Not, gen_bool_expr(depth + 1));
      case 1:
        return make_binary(BinOp::And, gen_bool_expr(depth + 1), gen_bool_expr(depth + 1));
      case 2:
        return make_binary(BinOp::Or, gen_bool_expr(depth + 1), gen_bool_expr(depth + 1));
      case 3:
        return make_binary(BinOp::Xor, gen_bool_expr(depth + 1), gen_bool_expr(depth + 1));
      default: {
        BinOp cmp = static_cast<BinOp>(static_cast<int>(BinOp::Eq) + pick(0, 5));
        IExpr a = capped(gen_int_expr(depth + 1));
        IExpr b = capped(gen_int_expr(depth + 1));
        return make_binary(cmp, std::move(a.e), std::move(b.e));
      }
    }
  }

  StmtPtr gen_assign(int depth)
  {
    std::vector<size_t> targets;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].writable) targets.push_back(i);
    }
    const GenVar & v = vars_[targets[static_cast<size_t>(pick(0, targets.size() - 1))]];
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->target = v.name;
    if (v.type.is_array) {
      s->index = gen_index(v.type.length, depth);
    }
    if (v.type.scalar.kind == ScalarKind::Bool) {
      s->value = gen_bool_expr(depth);
    } else {
      IExpr e = gen_int_expr(depth);
      s->value = wrap_into(std::move(e), v.type.scalar.lo, v.type.scalar.hi).e;
    }
    return s;
  }

  // IF d /= 0 THEN t := wrapped(a / d) ELSE t := fallback END
  StmtPtr gen_guarded_division(int depth)
  {
    auto scalars = vars_matching(ScalarKind::Int, false);
    std::vector<size_t> targets;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].writable && !vars_[i].type.is_array &&
          vars_[i].type.scalar.kind == ScalarKind::Int) {
        targets.push_back(i);
      }
    }
    if (scalars.empty() || targets.empty()) return gen_assign(depth);
    const GenVar & d = vars_[scalars[static_cast<size_t>(pick(0, scalars.size() - 1))]];
    const GenVar & t = vars_[targets[static_cast<size_t>(pick(0, targets.size() - 1))]];

    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    IfArm arm;
    arm.cond = make_binary(BinOp::Ne, make_var(d.name), make_int_lit(0));
    IExpr a = capped(gen_int_expr(depth + 1));
    int64_t m = std::max(std::abs(a.lo), std::abs(a.hi));
    IExpr q{make_binary(BinOp::Div, std::move(a.e), make_var(d.name)), -m, m};
    auto assign = std::make_unique<Stmt>();
    assign->kind = Stmt::Kind::Assign;
    assign->target = t.name;
    assign->value = wrap_into(std::move(q), t.type.scalar.lo, t.type.scalar.hi).e;
    arm.body.push_back(std::move(assign));
    s->arms.push_back(std::move(arm));
    auto fallback = std::make_unique<Stmt>();
    fallback->kind = Stmt::Kind::Assign;
    fallback->target = t.name;
    fallback->value = make_int_lit(t.type.scalar.lo);
    s->else_body.push_back(std::move(fallback));
    return s;
  }

  StmtList gen_stmts(uint32_t & budget, int depth)
  {
    StmtList out;
    while (budget > 0) {
      --budget;
      int roll = static_cast<int>(pick(1, 100));
      if (roll <= 55 || depth >= 3) {
        out.push_back(gen_assign(depth));
      } else if (roll <= 63) {
        out.push_back(gen_guarded_division(depth));
      } else if (roll <= 85) {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::If;
        IfArm arm;
        arm.cond = gen_bool_expr(depth + 1);
        uint32_t sub = std::min<uint32_t>(budget, static_cast<uint32_t>(pick(1, 3)));
        budget -= sub;
        arm.body = gen_stmts(sub, depth + 1);
        s->arms.push_back(std::move(arm));
        if (chance(40) && budget > 0) {
          IfArm elsif;
          elsif.cond = gen_bool_expr(depth + 1);
          uint32_t sub2 = std::min<uint32_t>(budget, static_cast<uint32_t>(pick(1, 2)));
          budget -= sub2;
          elsif.body = gen_stmts(sub2, depth + 1);
          s->arms.push_back(std::move(elsif));
        }
        if (chance(50) && budget > 0) {
          uint32_t sub3 = std::min<uint32_t>(budget, static_cast<uint32_t>(pick(1, 2)));
          budget -= sub3;
          s->else_body = gen_stmts(sub3, depth + 1);
        }
        out.push_back(std::move(s));
      } else {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::For;
        s->loop_var = "k" + std::to_string(loop_counter_++);
        int64_t lo = pick(0, 3);
        // Short loops unroll; longer ones take the counted back-edge path.
        int64_t trips = chance(60) ? pick(1, 6) : pick(9, 12);
        s->lo_expr = make_int_lit(lo);
        s->hi_expr = make_int_lit(lo + trips - 1);
        uint32_t sub = std::min<uint32_t>(budget, static_cast<uint32_t>(pick(1, 3)));
        budget -= sub;
        loops_.push_back({s->loop_var, lo, lo + trips - 1});
        s->body = gen_stmts(sub, depth + 1);
        loops_.pop_back();
        out.push_back(std::move(s));
      }
      if (depth > 0 && chance(25)) break;
    }
    return out;
  }

  struct LoopVar
  {
    std::string name;
    int64_t lo;
    int64_t hi;
  };

  GenConfig cfg_;
  Rng rng_;
  Model m_;
  std::vector<GenVar> vars_;
  std::vector<ConstDecl> constants_;
  std::vector<LoopVar> loops_;
  int loop_counter_ = 0;
};

}  // namespace

Model gen_program(const GenConfig & config)
{
  ProgramGen g(config);
  return g.run();
}

Model gen_interlocking(uint32_t equations, uint64_t seed)
{
  Rng rng(seed * 0x9E3779B97F4A7C15ull + 7);
  Model m;
  m.name = "interlock_" + std::to_string(equations);
  for (int i = 0; i < 20; ++i) {
    VarDecl d;
    d.name = "i" + std::to_string(i);
    d.type.scalar.kind = ScalarKind::Bool;
    m.inputs.push_back(std::move(d));
  }
  for (int i = 0; i < 8; ++i) {
    VarDecl d;
    d.name = "o" + std::to_string(i);
    d.type.scalar.kind = ScalarKind::Bool;
    m.outputs.push_back(std::move(d));
  }
  VarDecl coils;
  coils.name = "s";
  coils.type.is_array = true;
  coils.type.length = equations;
  coils.type.scalar.kind = ScalarKind::Bool;
  m.state.push_back(coils);
  VarDecl shadow = coils;
  shadow.name = "p";
  m.state.push_back(shadow);

  auto lit_ref = [&](uint32_t n) -> ExprPtr {
    // Mix of previous-scan coils and inputs, negated half the time.
    ExprPtr e;
    if (rng.range(0, 99) < 30) {
      e = make_var("i" + std::to_string(rng.range(0, 19)));
    } else {
      e = make_elem("p", make_int_lit(rng.range(0, static_cast<int64_t>(n) - 1)));
    }
    if (rng.range(0, 1) == 0) {
      e = make_unary(UnOp::Not, std::move(e));
    }
    return e;
  };

  // p := s (previous scan snapshot)
  {
    auto copy = std::make_unique<Stmt>();
    copy->kind = Stmt::Kind::For;
    copy->loop_var = "k";
    copy->lo_expr = make_int_lit(0);
    copy->hi_expr = make_int_lit(static_cast<int64_t>(equations) - 1);
    auto assign = std::make_unique<Stmt>();
    assign->kind = Stmt::Kind::Assign;
    assign->target = "p";
    assign->index = make_var("k");
    assign->value = make_elem("s", make_var("k"));
    copy->body.push_back(std::move(assign));
    m.body.push_back(std::move(copy));
  }
  for (uint32_t k = 0; k < equations; ++k) {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->target = "s";
    s->index = make_int_lit(k);
    ExprPtr e = lit_ref(equations);
    int terms = static_cast<int>(rng.range(1, 3));
    for (int t = 0; t < terms; ++t) {
      BinOp op = rng.range(0, 1) == 0 ? BinOp::And : BinOp::Or;
      e = make_binary(op, std::move(e), lit_ref(equations));
    }
    s->value = std::move(e);
    m.body.push_back(std::move(s));
  }
  for (int i = 0; i < 8; ++i) {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->target = "o" + std::to_string(i);
    s->value = make_elem("s", make_int_lit(rng.range(0, static_cast<int64_t>(equations) - 1)));
    m.body.push_back(std::move(s));
  }
  return m;
}

}  // namespace duplex

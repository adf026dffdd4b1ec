// duplex/complexity.cpp
#include "duplex/complexity.hpp"

#include <algorithm>

namespace duplex
{

namespace
{

uint64_t sat_add(uint64_t a, uint64_t b)
{
  uint64_t r = a + b;
  return r < a ? UINT64_MAX : r;
}

uint64_t sat_mul(uint64_t a, uint64_t b)
{
  if (a == 0 || b == 0) return 0;
  if (a > UINT64_MAX / b) return UINT64_MAX;
  return a * b;
}

uint64_t expr_cost(const Expr & e)
{
  switch (e.kind) {
    case Expr::Kind::BoolLit:
    case Expr::Kind::IntLit:
    case Expr::Kind::Var:
      return 1;
    case Expr::Kind::Elem:
      return sat_add(expr_cost(*e.a), 1);
    case Expr::Kind::Unary:
      return sat_add(expr_cost(*e.a), 1);
    case Expr::Kind::Binary:
      return sat_add(sat_add(expr_cost(*e.a), expr_cost(*e.b)), 1);
  }
  return 0;
}

uint64_t stmts_cost(const StmtList & body);

uint64_t stmt_cost(const Stmt & s)
{
  switch (s.kind) {
    case Stmt::Kind::Assign: {
      uint64_t c = sat_add(expr_cost(*s.value), 1);
      if (s.index) c = sat_add(c, expr_cost(*s.index));
      return c;
    }
    case Stmt::Kind::If: {
      // cost(c1) + max(body1, cost(c2) + max(body2, ... else))
      uint64_t acc = stmts_cost(s.else_body);
      for (auto it = s.arms.rbegin(); it != s.arms.rend(); ++it) {
        uint64_t branch = stmts_cost(it->body);
        acc = sat_add(expr_cost(*it->cond), std::max(branch, acc));
      }
      return acc;
    }
    case Stmt::Kind::For: {
      uint64_t trips = s.hi_val >= s.lo_val
                         ? static_cast<uint64_t>(s.hi_val - s.lo_val) + 1
                         : 0;
      return sat_mul(trips, sat_add(stmts_cost(s.body), 2));
    }
  }
  return 0;
}

uint64_t stmts_cost(const StmtList & body)
{
  uint64_t c = 0;
  for (const auto & s : body) c = sat_add(c, stmt_cost(*s));
  return c;
}

uint32_t expr_depth(const Expr & e)
{
  switch (e.kind) {
    case Expr::Kind::BoolLit:
    case Expr::Kind::IntLit:
    case Expr::Kind::Var:
      return 1;
    case Expr::Kind::Elem:
      return std::max<uint32_t>(expr_depth(*e.a), 1);
    case Expr::Kind::Unary:
      return expr_depth(*e.a);
    case Expr::Kind::Binary:
      return std::max(expr_depth(*e.a), expr_depth(*e.b) + 1);
  }
  return 1;
}

uint32_t stmts_depth(const StmtList & body);

uint32_t stmt_depth(const Stmt & s)
{
  switch (s.kind) {
    case Stmt::Kind::Assign: {
      uint32_t d = expr_depth(*s.value);
      if (s.index) d = std::max(d, expr_depth(*s.index) + 1);
      return d;
    }
    case Stmt::Kind::If: {
      uint32_t d = stmts_depth(s.else_body);
      for (const auto & arm : s.arms) {
        d = std::max(d, expr_depth(*arm.cond));
        d = std::max(d, stmts_depth(arm.body));
      }
      return d;
    }
    case Stmt::Kind::For:
      return stmts_depth(s.body);
  }
  return 0;
}

uint32_t stmts_depth(const StmtList & body)
{
  uint32_t d = 0;
  for (const auto & s : body) d = std::max(d, stmt_depth(*s));
  return d;
}

}  // namespace

CycleBound complexity_check(const TypedModel & tm)
{
  CycleBound b;
  b.max_ops = stmts_cost(tm.model.body);
  // The cycle prologue and epilogue need one slot even for an empty body.
  b.max_stack_depth = std::max<uint32_t>(stmts_depth(tm.model.body), 1);
  return b;
}

uint64_t instruction_budget(const TypedModel & tm, const CycleBound & bound)
{
  uint64_t io =
    8 * (static_cast<uint64_t>(tm.n_inputs) + static_cast<uint64_t>(tm.n_outputs)) + 16;
  return sat_add(sat_mul(4, bound.max_ops), io);
}

}  // namespace duplex

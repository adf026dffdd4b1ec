// duplex/ast.cpp
#include "duplex/ast.hpp"

namespace duplex
{

ExprPtr make_bool_lit(bool v, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::BoolLit;
  e->bval = v;
  e->span = span;
  e->type = ScalarKind::Bool;
  return e;
}

ExprPtr make_int_lit(int64_t v, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::IntLit;
  e->ival = v;
  e->span = span;
  e->type = ScalarKind::Int;
  return e;
}

ExprPtr make_var(std::string name, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_elem(std::string name, ExprPtr index, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Elem;
  e->name = std::move(name);
  e->a = std::move(index);
  e->span = span;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr a, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un = op;
  e->a = std::move(a);
  e->span = span;
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan span)
{
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin = op;
  e->a = std::move(a);
  e->b = std::move(b);
  e->span = span;
  return e;
}

ExprPtr clone_expr(const Expr & e)
{
  auto c = std::make_unique<Expr>();
  c->kind = e.kind;
  c->span = e.span;
  c->bval = e.bval;
  c->ival = e.ival;
  c->name = e.name;
  c->un = e.un;
  c->bin = e.bin;
  c->type = e.type;
  if (e.a) c->a = clone_expr(*e.a);
  if (e.b) c->b = clone_expr(*e.b);
  return c;
}

StmtPtr clone_stmt(const Stmt & s)
{
  auto c = std::make_unique<Stmt>();
  c->kind = s.kind;
  c->span = s.span;
  c->target = s.target;
  if (s.index) c->index = clone_expr(*s.index);
  if (s.value) c->value = clone_expr(*s.value);
  for (const auto & arm : s.arms) {
    IfArm a;
    a.cond = clone_expr(*arm.cond);
    for (const auto & st : arm.body) a.body.push_back(clone_stmt(*st));
    c->arms.push_back(std::move(a));
  }
  for (const auto & st : s.else_body) c->else_body.push_back(clone_stmt(*st));
  c->loop_var = s.loop_var;
  if (s.lo_expr) c->lo_expr = clone_expr(*s.lo_expr);
  if (s.hi_expr) c->hi_expr = clone_expr(*s.hi_expr);
  for (const auto & st : s.body) c->body.push_back(clone_stmt(*st));
  c->lo_val = s.lo_val;
  c->hi_val = s.hi_val;
  c->loop_id = s.loop_id;
  return c;
}

Model clone_model(const Model & m)
{
  Model c;
  c.name = m.name;
  c.inputs = m.inputs;
  c.outputs = m.outputs;
  c.state = m.state;
  c.constants = m.constants;
  if (m.invariant) c.invariant = clone_expr(*m.invariant);
  for (const auto & st : m.body) c.body.push_back(clone_stmt(*st));
  return c;
}

bool expr_equal(const Expr & a, const Expr & b)
{
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::BoolLit:
      return a.bval == b.bval;
    case Expr::Kind::IntLit:
      return a.ival == b.ival;
    case Expr::Kind::Var:
      return a.name == b.name;
    case Expr::Kind::Elem:
      return a.name == b.name && expr_equal(*a.a, *b.a);
    case Expr::Kind::Unary:
      return a.un == b.un && expr_equal(*a.a, *b.a);
    case Expr::Kind::Binary:
      return a.bin == b.bin && expr_equal(*a.a, *b.a) && expr_equal(*a.b, *b.b);
  }
  return false;
}

namespace
{

bool stmts_equal(const StmtList & a, const StmtList & b)
{
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!stmt_equal(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool stmt_equal(const Stmt & a, const Stmt & b)
{
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Assign:
      if (a.target != b.target) return false;
      if (static_cast<bool>(a.index) != static_cast<bool>(b.index)) return false;
      if (a.index && !expr_equal(*a.index, *b.index)) return false;
      return expr_equal(*a.value, *b.value);
    case Stmt::Kind::If: {
      if (a.arms.size() != b.arms.size()) return false;
      for (size_t i = 0; i < a.arms.size(); ++i) {
        if (!expr_equal(*a.arms[i].cond, *b.arms[i].cond)) return false;
        if (!stmts_equal(a.arms[i].body, b.arms[i].body)) return false;
      }
      return stmts_equal(a.else_body, b.else_body);
    }
    case Stmt::Kind::For:
      return a.loop_var == b.loop_var && expr_equal(*a.lo_expr, *b.lo_expr) &&
             expr_equal(*a.hi_expr, *b.hi_expr) && stmts_equal(a.body, b.body);
  }
  return false;
}

bool model_equal(const Model & a, const Model & b)
{
  if (a.name != b.name) return false;
  auto decls_equal = [](const std::vector<VarDecl> & x, const std::vector<VarDecl> & y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
      if (x[i].name != y[i].name || !(x[i].type == y[i].type) || x[i].init != y[i].init) {
        return false;
      }
    }
    return true;
  };
  if (!decls_equal(a.inputs, b.inputs) || !decls_equal(a.outputs, b.outputs) ||
      !decls_equal(a.state, b.state)) {
    return false;
  }
  if (a.constants.size() != b.constants.size()) return false;
  for (size_t i = 0; i < a.constants.size(); ++i) {
    if (a.constants[i].name != b.constants[i].name || a.constants[i].value != b.constants[i].value) {
      return false;
    }
  }
  if (static_cast<bool>(a.invariant) != static_cast<bool>(b.invariant)) return false;
  if (a.invariant && !expr_equal(*a.invariant, *b.invariant)) return false;
  return stmts_equal(a.body, b.body);
}

}  // namespace duplex

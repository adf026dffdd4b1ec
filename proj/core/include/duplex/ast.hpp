// duplex/ast.hpp - Syntax tree for the restricted cyclic modelling language.
//
// A model declares typed inputs, outputs, persistent state, integer constants,
// an optional invariant over the state, and a single cyclic operation named
// user_logic. Types are BOOL, ranged INT, and fixed-length arrays of either.
// There is no WHILE: the only loop is FOR with constant bounds, so every
// accepted model has a cycle cost that is bounded by construction.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "duplex/diag.hpp"

namespace duplex
{

enum class ScalarKind
{
  Bool,
  Int,
};

struct ScalarType
{
  ScalarKind kind = ScalarKind::Bool;
  int32_t lo = 0;  // INT only
  int32_t hi = 0;

  bool operator==(const ScalarType &) const = default;
};

struct VarType
{
  ScalarType scalar;
  bool is_array = false;
  uint32_t length = 0;  // elements, arrays only; 1..65536

  uint32_t cell_count() const { return is_array ? length : 1; }
  bool operator==(const VarType &) const = default;
};

// Fail-safe default: FALSE for booleans, the range minimum for integers.
inline int64_t scalar_default(const ScalarType & t)
{
  return t.kind == ScalarKind::Bool ? 0 : t.lo;
}

struct VarDecl
{
  std::string name;
  VarType type;
  std::optional<int64_t> init;  // state section only; applies to every element
  SourceSpan span;
};

struct ConstDecl
{
  std::string name;
  int64_t value = 0;
  SourceSpan span;
};

enum class BinOp
{
  And,
  Or,
  Xor,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
};

enum class UnOp
{
  Not,
  Neg,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr
{
  enum class Kind
  {
    BoolLit,
    IntLit,
    Var,    // scalar variable, constant (folded by typecheck), or FOR index
    Elem,   // array element: name(index)
    Unary,
    Binary,
  };

  Kind kind = Kind::IntLit;
  SourceSpan span;

  bool bval = false;     // BoolLit
  int64_t ival = 0;      // IntLit
  std::string name;      // Var / Elem
  UnOp un = UnOp::Not;   // Unary
  BinOp bin = BinOp::And;  // Binary
  ExprPtr a;             // Unary operand, Binary lhs, Elem index
  ExprPtr b;             // Binary rhs

  // Filled by typecheck.
  ScalarKind type = ScalarKind::Bool;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using StmtList = std::vector<StmtPtr>;

struct IfArm
{
  ExprPtr cond;
  StmtList body;
};

struct Stmt
{
  enum class Kind
  {
    Assign,
    If,
    For,
  };

  Kind kind = Kind::Assign;
  SourceSpan span;

  // Assign
  std::string target;
  ExprPtr index;  // null for scalar targets
  ExprPtr value;

  // If: arms[0] is the IF, the rest are ELSIFs
  std::vector<IfArm> arms;
  StmtList else_body;

  // For
  std::string loop_var;
  ExprPtr lo_expr;
  ExprPtr hi_expr;
  StmtList body;
  // Filled by typecheck.
  int64_t lo_val = 0;
  int64_t hi_val = 0;
  int loop_id = -1;  // dense id used for scratch-cell allocation
};

struct Model
{
  std::string name;
  std::vector<VarDecl> inputs;
  std::vector<VarDecl> outputs;
  std::vector<VarDecl> state;
  std::vector<ConstDecl> constants;
  ExprPtr invariant;  // optional
  StmtList body;      // the user_logic operation
};

ExprPtr clone_expr(const Expr & e);
StmtPtr clone_stmt(const Stmt & s);
Model clone_model(const Model & m);

bool expr_equal(const Expr & a, const Expr & b);
bool stmt_equal(const Stmt & a, const Stmt & b);
bool model_equal(const Model & a, const Model & b);

ExprPtr make_bool_lit(bool v, SourceSpan span = {});
ExprPtr make_int_lit(int64_t v, SourceSpan span = {});
ExprPtr make_var(std::string name, SourceSpan span = {});
ExprPtr make_elem(std::string name, ExprPtr index, SourceSpan span = {});
ExprPtr make_unary(UnOp op, ExprPtr a, SourceSpan span = {});
ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan span = {});

}  // namespace duplex

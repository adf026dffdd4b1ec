// duplex/printer.cpp
#include "duplex/printer.hpp"

namespace duplex
{

namespace
{

// Binding strength, loosest first. Mirrors the parser's precedence ladder.
int bin_level(BinOp op)
{
  switch (op) {
    case BinOp::Or:
    case BinOp::Xor:
      return 0;
    case BinOp::And:
      return 1;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
      return 3;
    case BinOp::Add:
    case BinOp::Sub:
      return 4;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod:
      return 5;
  }
  return 6;
}

const char * bin_name(BinOp op)
{
  switch (op) {
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
    case BinOp::Xor: return "XOR";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "/=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "MOD";
  }
  return "?";
}

void print_expr_prec(const Expr & e, int parent_level, std::string & out)
{
  switch (e.kind) {
    case Expr::Kind::BoolLit:
      out += e.bval ? "TRUE" : "FALSE";
      return;
    case Expr::Kind::IntLit:
      out += std::to_string(e.ival);
      return;
    case Expr::Kind::Var:
      out += e.name;
      return;
    case Expr::Kind::Elem:
      out += e.name;
      out += '(';
      print_expr_prec(*e.a, 0, out);
      out += ')';
      return;
    case Expr::Kind::Unary: {
      // NOT binds at level 2, unary minus at 6.
      int level = e.un == UnOp::Not ? 2 : 6;
      bool parens = level < parent_level;
      if (parens) out += '(';
      out += e.un == UnOp::Not ? "NOT " : "-";
      print_expr_prec(*e.a, level + 1, out);
      if (parens) out += ')';
      return;
    }
    case Expr::Kind::Binary: {
      int level = bin_level(e.bin);
      bool parens = level < parent_level;
      if (parens) out += '(';
      // Comparisons do not chain; parenthesize a comparison under a comparison.
      int lhs_level = level == 3 ? level + 1 : level;
      print_expr_prec(*e.a, lhs_level, out);
      out += ' ';
      out += bin_name(e.bin);
      out += ' ';
      // Left-associative: the right child needs one level more.
      print_expr_prec(*e.b, level + 1, out);
      if (parens) out += ')';
      return;
    }
  }
}

void print_type(const VarType & t, std::string & out)
{
  if (t.is_array) {
    out += "ARRAY " + std::to_string(t.length) + " OF ";
  }
  if (t.scalar.kind == ScalarKind::Bool) {
    out += "BOOL";
  } else {
    out += "INT(" + std::to_string(t.scalar.lo) + ".." + std::to_string(t.scalar.hi) + ")";
  }
}

void print_decl(const VarDecl & d, bool with_init, std::string & out)
{
  out += "  " + d.name + " : ";
  print_type(d.type, out);
  if (with_init && d.init) {
    out += " := ";
    if (d.type.scalar.kind == ScalarKind::Bool) {
      out += *d.init ? "TRUE" : "FALSE";
    } else {
      out += std::to_string(*d.init);
    }
  }
  out += ";\n";
}

void print_stmts(const StmtList & body, int indent, std::string & out);

void print_stmt(const Stmt & s, int indent, std::string & out)
{
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Assign:
      out += pad + s.target;
      if (s.index) {
        out += '(';
        print_expr_prec(*s.index, 0, out);
        out += ')';
      }
      out += " := ";
      print_expr_prec(*s.value, 0, out);
      break;
    case Stmt::Kind::If: {
      bool first = true;
      for (const auto & arm : s.arms) {
        out += first ? pad + "IF " : pad + "ELSIF ";
        first = false;
        print_expr_prec(*arm.cond, 0, out);
        out += " THEN\n";
        print_stmts(arm.body, indent + 1, out);
      }
      if (!s.else_body.empty()) {
        out += pad + "ELSE\n";
        print_stmts(s.else_body, indent + 1, out);
      }
      out += pad + "END";
      break;
    }
    case Stmt::Kind::For:
      out += pad + "FOR " + s.loop_var + " FROM ";
      print_expr_prec(*s.lo_expr, 0, out);
      out += " TO ";
      print_expr_prec(*s.hi_expr, 0, out);
      out += " DO\n";
      print_stmts(s.body, indent + 1, out);
      out += pad + "END";
      break;
  }
}

void print_stmts(const StmtList & body, int indent, std::string & out)
{
  for (size_t i = 0; i < body.size(); ++i) {
    print_stmt(*body[i], indent, out);
    if (i + 1 < body.size()) out += ';';
    out += '\n';
  }
}

}  // namespace

std::string print_expr(const Expr & e)
{
  std::string out;
  print_expr_prec(e, 0, out);
  return out;
}

std::string print_model(const Model & m)
{
  std::string out = "MACHINE " + m.name + "\n";
  if (!m.inputs.empty()) {
    out += "INPUTS\n";
    for (const auto & d : m.inputs) print_decl(d, false, out);
  }
  if (!m.outputs.empty()) {
    out += "OUTPUTS\n";
    for (const auto & d : m.outputs) print_decl(d, false, out);
  }
  if (!m.state.empty()) {
    out += "STATE\n";
    for (const auto & d : m.state) print_decl(d, true, out);
  }
  if (!m.constants.empty()) {
    out += "CONSTANTS\n";
    for (const auto & c : m.constants) {
      out += "  " + c.name + " = " + std::to_string(c.value) + ";\n";
    }
  }
  if (m.invariant) {
    out += "INVARIANT\n  ";
    print_expr_prec(*m.invariant, 0, out);
    out += '\n';
  }
  out += "OPERATION user_logic\nBEGIN\n";
  print_stmts(m.body, 1, out);
  out += "END\n";
  return out;
}

}  // namespace duplex

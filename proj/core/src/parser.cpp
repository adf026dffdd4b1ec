// duplex/parser.cpp
#include "duplex/parser.hpp"

#include <cctype>
#include <map>
#include <unordered_set>

namespace duplex
{

namespace
{

enum class Tok
{
  End,
  Ident,
  Int,
  // keywords
  Machine,
  Inputs,
  Outputs,
  State,
  Constants,
  Invariant,
  Operation,
  Begin,
  EndKw,
  If,
  Then,
  Elsif,
  Else,
  For,
  From,
  To,
  Do,
  Bool,
  IntKw,
  Array,
  Of,
  True,
  False,
  Not,
  And,
  Or,
  Xor,
  Mod,
  // punctuation
  Assign,     // :=
  Colon,      // :
  Semi,       // ;
  Comma,      // ,
  LParen,
  RParen,
  DotDot,     // ..
  Eq,         // =
  Ne,         // /=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Error,
};

struct Token
{
  Tok kind = Tok::End;
  std::string text;
  uint64_t ival = 0;
  SourceSpan span;
};

const std::map<std::string, Tok, std::less<>> kKeywords = {
  {"MACHINE", Tok::Machine},   {"INPUTS", Tok::Inputs},       {"OUTPUTS", Tok::Outputs},
  {"STATE", Tok::State},       {"CONSTANTS", Tok::Constants}, {"INVARIANT", Tok::Invariant},
  {"OPERATION", Tok::Operation}, {"BEGIN", Tok::Begin},       {"END", Tok::EndKw},
  {"IF", Tok::If},             {"THEN", Tok::Then},           {"ELSIF", Tok::Elsif},
  {"ELSE", Tok::Else},         {"FOR", Tok::For},             {"FROM", Tok::From},
  {"TO", Tok::To},             {"DO", Tok::Do},               {"BOOL", Tok::Bool},
  {"INT", Tok::IntKw},         {"ARRAY", Tok::Array},         {"OF", Tok::Of},
  {"TRUE", Tok::True},         {"FALSE", Tok::False},         {"NOT", Tok::Not},
  {"AND", Tok::And},           {"OR", Tok::Or},               {"XOR", Tok::Xor},
  {"MOD", Tok::Mod},
};

class Lexer
{
public:
  explicit Lexer(const std::string & src) : src_(src) {}

  Token next()
  {
    skip_ws();
    Token t;
    t.span = {line_, col_};
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.text = src_.substr(start, pos_ - start);
      auto it = kKeywords.find(t.text);
      t.kind = it != kKeywords.end() ? it->second : Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t v = 0;
      bool overflow = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        v = v * 10 + static_cast<uint64_t>(src_[pos_] - '0');
        if (v > (1ull << 40)) overflow = true;  // clamp; typecheck enforces 32-bit
        advance();
      }
      t.kind = Tok::Int;
      t.ival = overflow ? (1ull << 40) : v;
      return t;
    }
    advance();
    switch (c) {
      case ':':
        if (peek() == '=') {
          advance();
          t.kind = Tok::Assign;
        } else {
          t.kind = Tok::Colon;
        }
        return t;
      case ';': t.kind = Tok::Semi; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '.':
        if (peek() == '.') {
          advance();
          t.kind = Tok::DotDot;
          return t;
        }
        break;
      case '=': t.kind = Tok::Eq; return t;
      case '/':
        if (peek() == '=') {
          advance();
          t.kind = Tok::Ne;
        } else {
          t.kind = Tok::Slash;
        }
        return t;
      case '<':
        if (peek() == '=') {
          advance();
          t.kind = Tok::Le;
        } else {
          t.kind = Tok::Lt;
        }
        return t;
      case '>':
        if (peek() == '=') {
          advance();
          t.kind = Tok::Ge;
        } else {
          t.kind = Tok::Gt;
        }
        return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
    }
    t.kind = Tok::Error;
    t.text = std::string(1, c);
    return t;
  }

private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void advance()
  {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws()
  {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string & src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr int kMaxExprDepth = 200;
constexpr int kMaxStmtDepth = 100;

class Parser
{
public:
  explicit Parser(const std::string & src) : lex_(src) { bump(); }

  ParseResult run()
  {
    ParseResult res;
    Model m = parse_machine();
    res.diagnostics = std::move(diags_);
    if (res.diagnostics.empty()) {
      res.model = std::move(m);
    }
    return res;
  }

private:
  void bump()
  {
    cur_ = lex_.next();
    if (cur_.kind == Tok::Error) {
      error(cur_.span, "syntax", "unexpected character '" + cur_.text + "'");
      // consume error tokens so parsing remains total
      while (cur_.kind == Tok::Error) cur_ = lex_.next();
    }
  }

  bool at(Tok k) const { return cur_.kind == k; }

  bool accept(Tok k)
  {
    if (at(k)) {
      bump();
      return true;
    }
    return false;
  }

  bool expect(Tok k, const char * what)
  {
    if (accept(k)) return true;
    error(cur_.span, "syntax", std::string("expected ") + what);
    return false;
  }

  void error(SourceSpan span, const char * code, std::string msg)
  {
    if (diags_.size() < 64) {
      diags_.push_back(error_at(span, code, std::move(msg)));
    }
  }

  static bool is_section_start(Tok k)
  {
    switch (k) {
      case Tok::Inputs:
      case Tok::Outputs:
      case Tok::State:
      case Tok::Constants:
      case Tok::Invariant:
      case Tok::Operation:
      case Tok::End:
        return true;
      default:
        return false;
    }
  }

  void skip_to_section()
  {
    while (!is_section_start(cur_.kind)) bump();
  }

  Model parse_machine()
  {
    Model m;
    expect(Tok::Machine, "MACHINE");
    if (at(Tok::Ident)) {
      m.name = cur_.text;
      bump();
    } else {
      error(cur_.span, "syntax", "expected machine name");
      skip_to_section();
    }
    std::unordered_set<int> seen;
    bool has_operation = false;
    while (!at(Tok::End)) {
      SourceSpan span = cur_.span;
      Tok section = cur_.kind;
      if (!is_section_start(section)) {
        error(span, "unknown-section", "expected a section keyword");
        skip_to_section();
        continue;
      }
      if (!seen.insert(static_cast<int>(section)).second) {
        error(span, "duplicate-section", "section appears more than once");
      }
      switch (section) {
        case Tok::Inputs:
          bump();
          m.inputs = parse_decls(false);
          break;
        case Tok::Outputs:
          bump();
          m.outputs = parse_decls(false);
          break;
        case Tok::State:
          bump();
          m.state = parse_decls(true);
          break;
        case Tok::Constants:
          bump();
          m.constants = parse_constants();
          break;
        case Tok::Invariant:
          bump();
          m.invariant = parse_expr(0);
          break;
        case Tok::Operation: {
          bump();
          has_operation = true;
          if (at(Tok::Ident)) {
            if (cur_.text != "user_logic") {
              error(cur_.span, "operation-name", "operation must be named user_logic");
            }
            bump();
          } else {
            error(cur_.span, "syntax", "expected operation name");
          }
          expect(Tok::Begin, "BEGIN");
          m.body = parse_stmts(0);
          expect(Tok::EndKw, "END");
          break;
        }
        default:
          bump();
          break;
      }
    }
    if (!has_operation) {
      error(cur_.span, "missing-operation", "model must define the user_logic operation");
    }
    return m;
  }

  std::vector<VarDecl> parse_decls(bool allow_init)
  {
    std::vector<VarDecl> decls;
    while (at(Tok::Ident)) {
      VarDecl d;
      d.span = cur_.span;
      d.name = cur_.text;
      bump();
      expect(Tok::Colon, "':' after variable name");
      d.type = parse_type();
      if (allow_init && accept(Tok::Assign)) {
        d.init = parse_init_literal();
      }
      decls.push_back(std::move(d));
      if (!accept(Tok::Semi)) break;
    }
    return decls;
  }

  int64_t parse_init_literal()
  {
    bool neg = accept(Tok::Minus);
    if (at(Tok::Int)) {
      int64_t v = static_cast<int64_t>(cur_.ival);
      bump();
      return neg ? -v : v;
    }
    if (at(Tok::True)) {
      bump();
      return 1;
    }
    if (at(Tok::False)) {
      bump();
      return 0;
    }
    error(cur_.span, "syntax", "expected literal initializer");
    return 0;
  }

  VarType parse_type()
  {
    VarType t;
    if (accept(Tok::Array)) {
      t.is_array = true;
      if (at(Tok::Int)) {
        uint64_t n = cur_.ival;
        if (n < 1 || n > 65536) {
          error(cur_.span, "array-length", "array length must be in 1..65536");
          n = 1;
        }
        t.length = static_cast<uint32_t>(n);
        bump();
      } else {
        error(cur_.span, "syntax", "expected array length");
        t.length = 1;
      }
      expect(Tok::Of, "OF");
      t.scalar = parse_scalar_type();
      return t;
    }
    t.scalar = parse_scalar_type();
    return t;
  }

  ScalarType parse_scalar_type()
  {
    ScalarType s;
    if (accept(Tok::Bool)) {
      s.kind = ScalarKind::Bool;
      return s;
    }
    if (accept(Tok::IntKw)) {
      s.kind = ScalarKind::Int;
      expect(Tok::LParen, "'(' after INT");
      int64_t lo = parse_signed_int();
      expect(Tok::DotDot, "'..'");
      int64_t hi = parse_signed_int();
      expect(Tok::RParen, "')'");
      if (lo > hi) {
        error(cur_.span, "range", "integer range must have lo <= hi");
        hi = lo;
      }
      constexpr int64_t kMin = INT32_MIN;
      constexpr int64_t kMax = INT32_MAX;
      if (lo < kMin || lo > kMax || hi < kMin || hi > kMax) {
        error(cur_.span, "range", "integer range bounds must fit in signed 32 bits");
        lo = 0;
        hi = 0;
      }
      s.lo = static_cast<int32_t>(lo);
      s.hi = static_cast<int32_t>(hi);
      return s;
    }
    error(cur_.span, "syntax", "expected BOOL, INT(lo..hi), or ARRAY n OF ...");
    return s;
  }

  int64_t parse_signed_int()
  {
    bool neg = accept(Tok::Minus);
    if (!at(Tok::Int)) {
      error(cur_.span, "syntax", "expected integer");
      return 0;
    }
    int64_t v = static_cast<int64_t>(cur_.ival);
    bump();
    return neg ? -v : v;
  }

  std::vector<ConstDecl> parse_constants()
  {
    std::vector<ConstDecl> cs;
    while (at(Tok::Ident)) {
      ConstDecl c;
      c.span = cur_.span;
      c.name = cur_.text;
      bump();
      expect(Tok::Eq, "'='");
      c.value = parse_signed_int();
      cs.push_back(std::move(c));
      if (!accept(Tok::Semi)) break;
    }
    return cs;
  }

  StmtList parse_stmts(int depth)
  {
    StmtList out;
    while (true) {
      if (at(Tok::EndKw) || at(Tok::Elsif) || at(Tok::Else) || at(Tok::End)) break;
      StmtPtr s = parse_stmt(depth);
      if (!s) {
        // recover: skip one token and try again unless at a terminator
        if (at(Tok::EndKw) || at(Tok::Elsif) || at(Tok::Else) || at(Tok::End)) break;
        bump();
        continue;
      }
      out.push_back(std::move(s));
      if (!accept(Tok::Semi)) break;
    }
    return out;
  }

  StmtPtr parse_stmt(int depth)
  {
    if (depth > kMaxStmtDepth) {
      error(cur_.span, "nesting", "statements nested too deeply");
      return nullptr;
    }
    SourceSpan span = cur_.span;
    if (accept(Tok::If)) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::If;
      s->span = span;
      IfArm first;
      first.cond = parse_expr(0);
      expect(Tok::Then, "THEN");
      first.body = parse_stmts(depth + 1);
      s->arms.push_back(std::move(first));
      while (accept(Tok::Elsif)) {
        IfArm arm;
        arm.cond = parse_expr(0);
        expect(Tok::Then, "THEN");
        arm.body = parse_stmts(depth + 1);
        s->arms.push_back(std::move(arm));
      }
      if (accept(Tok::Else)) {
        s->else_body = parse_stmts(depth + 1);
      }
      expect(Tok::EndKw, "END to close IF");
      return s;
    }
    if (accept(Tok::For)) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::For;
      s->span = span;
      if (at(Tok::Ident)) {
        s->loop_var = cur_.text;
        bump();
      } else {
        error(cur_.span, "syntax", "expected loop variable");
      }
      expect(Tok::From, "FROM");
      s->lo_expr = parse_expr(0);
      expect(Tok::To, "TO");
      s->hi_expr = parse_expr(0);
      expect(Tok::Do, "DO");
      s->body = parse_stmts(depth + 1);
      expect(Tok::EndKw, "END to close FOR");
      return s;
    }
    if (at(Tok::Ident)) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Assign;
      s->span = span;
      s->target = cur_.text;
      bump();
      if (accept(Tok::LParen)) {
        s->index = parse_expr(0);
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Assign, "':='");
      s->value = parse_expr(0);
      if (!s->value) return nullptr;
      return s;
    }
    error(span, "syntax", "expected a statement");
    return nullptr;
  }

  // Precedence climbing. Levels, loosest first:
  //   0: OR XOR   1: AND   2: NOT (prefix)   3: = /= < <= > >=
  //   4: + -      5: * / MOD                 6: unary minus, primary
  ExprPtr parse_expr(int depth) { return parse_or(depth); }

  ExprPtr parse_or(int depth)
  {
    if (depth > kMaxExprDepth) {
      error(cur_.span, "nesting", "expression nested too deeply");
      return make_bool_lit(false, cur_.span);
    }
    ExprPtr lhs = parse_and(depth + 1);
    while (at(Tok::Or) || at(Tok::Xor)) {
      BinOp op = at(Tok::Or) ? BinOp::Or : BinOp::Xor;
      SourceSpan span = cur_.span;
      bump();
      ExprPtr rhs = parse_and(depth + 1);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr parse_and(int depth)
  {
    ExprPtr lhs = parse_not(depth + 1);
    while (at(Tok::And)) {
      SourceSpan span = cur_.span;
      bump();
      ExprPtr rhs = parse_not(depth + 1);
      lhs = make_binary(BinOp::And, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr parse_not(int depth)
  {
    if (at(Tok::Not)) {
      SourceSpan span = cur_.span;
      bump();
      return make_unary(UnOp::Not, parse_not(depth + 1), span);
    }
    return parse_cmp(depth + 1);
  }

  ExprPtr parse_cmp(int depth)
  {
    ExprPtr lhs = parse_add(depth + 1);
    BinOp op;
    switch (cur_.kind) {
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default:
        return lhs;
    }
    SourceSpan span = cur_.span;
    bump();
    ExprPtr rhs = parse_add(depth + 1);
    return make_binary(op, std::move(lhs), std::move(rhs), span);
  }

  ExprPtr parse_add(int depth)
  {
    ExprPtr lhs = parse_mul(depth + 1);
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      SourceSpan span = cur_.span;
      bump();
      ExprPtr rhs = parse_mul(depth + 1);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr parse_mul(int depth)
  {
    ExprPtr lhs = parse_unary(depth + 1);
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Mod)) {
      BinOp op = at(Tok::Star) ? BinOp::Mul : at(Tok::Slash) ? BinOp::Div : BinOp::Mod;
      SourceSpan span = cur_.span;
      bump();
      ExprPtr rhs = parse_unary(depth + 1);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr parse_unary(int depth)
  {
    if (depth > kMaxExprDepth) {
      error(cur_.span, "nesting", "expression nested too deeply");
      return make_int_lit(0, cur_.span);
    }
    if (at(Tok::Minus)) {
      SourceSpan span = cur_.span;
      bump();
      ExprPtr operand = parse_unary(depth + 1);
      // Fold -literal so INT32_MIN is expressible.
      if (operand->kind == Expr::Kind::IntLit) {
        operand->ival = -operand->ival;
        operand->span = span;
        return operand;
      }
      return make_unary(UnOp::Neg, std::move(operand), span);
    }
    return parse_primary(depth + 1);
  }

  ExprPtr parse_primary(int depth)
  {
    SourceSpan span = cur_.span;
    if (at(Tok::Int)) {
      int64_t v = static_cast<int64_t>(cur_.ival);
      bump();
      return make_int_lit(v, span);
    }
    if (accept(Tok::True)) return make_bool_lit(true, span);
    if (accept(Tok::False)) return make_bool_lit(false, span);
    if (accept(Tok::LParen)) {
      ExprPtr e = parse_expr(depth + 1);
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident)) {
      std::string name = cur_.text;
      bump();
      if (accept(Tok::LParen)) {
        ExprPtr idx = parse_expr(depth + 1);
        expect(Tok::RParen, "')'");
        return make_elem(std::move(name), std::move(idx), span);
      }
      return make_var(std::move(name), span);
    }
    error(span, "syntax", "expected an expression");
    bump();
    return make_int_lit(0, span);
  }

  Lexer lex_;
  Token cur_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse_model(const std::string & source)
{
  Parser p(source);
  return p.run();
}

}  // namespace duplex

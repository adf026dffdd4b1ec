// duplex/relay.cpp
#include "duplex/relay.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace duplex
{

namespace
{

class NetlistParser
{
public:
  explicit NetlistParser(const std::string & src) : src_(src) {}

  SchematicResult run()
  {
    SchematicResult res;
    while (!at_end()) {
      skip_ws();
      if (at_end()) break;
      std::string kw = read_ident();
      if (kw == "INPUT") {
        parse_inputs();
      } else if (kw == "COIL") {
        parse_rung(true);
      } else if (kw == "OUTPUT") {
        parse_rung(false);
      } else {
        error(kw.empty() ? "expected INPUT, COIL, or OUTPUT"
                         : "unknown statement '" + kw + "'");
        sync_to_semi();
      }
    }
    validate();
    res.diagnostics = std::move(diags_);
    if (res.diagnostics.empty()) {
      res.schematic = std::move(sch_);
    }
    return res;
  }

private:
  bool at_end()
  {
    skip_ws();
    return pos_ >= src_.size();
  }

  void skip_ws()
  {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance()
  {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  char peek()
  {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool accept(char c)
  {
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  std::string read_ident()
  {
    skip_ws();
    std::string out;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      out += src_[pos_];
      advance();
    }
    return out;
  }

  void error(std::string msg)
  {
    if (diags_.size() < 64) {
      diags_.push_back(error_at({line_, col_}, "netlist", std::move(msg)));
    }
  }

  void sync_to_semi()
  {
    while (pos_ < src_.size() && src_[pos_] != ';') advance();
    if (pos_ < src_.size()) advance();
  }

  void parse_inputs()
  {
    do {
      std::string name = read_ident();
      if (name.empty()) {
        error("expected input name");
        sync_to_semi();
        return;
      }
      sch_.inputs.push_back(name);
    } while (accept(','));
    if (!accept(';')) error("expected ';'");
  }

  void parse_rung(bool coil)
  {
    Rung r;
    r.span = {line_, col_};
    r.target = read_ident();
    if (r.target.empty()) {
      error("expected rung target name");
      sync_to_semi();
      return;
    }
    if (!accept('=')) {
      error("expected '='");
      sync_to_semi();
      return;
    }
    r.network = parse_parallel(0);
    if (!accept(';')) error("expected ';'");
    (coil ? sch_.coils : sch_.outputs).push_back(std::move(r));
  }

  ContactPtr parse_parallel(int depth)
  {
    ContactPtr lhs = parse_series(depth);
    while (accept('|')) {
      auto n = std::make_unique<ContactExpr>();
      n->kind = ContactExpr::Kind::Parallel;
      n->span = {line_, col_};
      n->a = std::move(lhs);
      n->b = parse_series(depth);
      lhs = std::move(n);
    }
    return lhs;
  }

  ContactPtr parse_series(int depth)
  {
    ContactPtr lhs = parse_contact(depth);
    while (accept('&')) {
      auto n = std::make_unique<ContactExpr>();
      n->kind = ContactExpr::Kind::Series;
      n->span = {line_, col_};
      n->a = std::move(lhs);
      n->b = parse_contact(depth);
      lhs = std::move(n);
    }
    return lhs;
  }

  ContactPtr parse_contact(int depth)
  {
    auto n = std::make_unique<ContactExpr>();
    n->span = {line_, col_};
    if (depth > 64) {
      error("contact network nested too deeply");
      n->kind = ContactExpr::Kind::Open;
      return n;
    }
    if (accept('!')) {
      char c = peek();
      if (c == '(') {
        // !(...) distributes over a subnetwork; model it as a closed contact
        // of a synthetic reference is not possible, so reject.
        error("'!' applies to a single contact, not a subnetwork");
        accept('(');
        auto inner = parse_parallel(depth + 1);
        accept(')');
        return inner;
      }
      n->kind = ContactExpr::Kind::Closed;
      n->ref = read_ident();
      if (n->ref.empty()) error("expected contact name after '!'");
      return n;
    }
    if (accept('(')) {
      auto inner = parse_parallel(depth + 1);
      if (!accept(')')) error("expected ')'");
      return inner;
    }
    n->kind = ContactExpr::Kind::Open;
    n->ref = read_ident();
    if (n->ref.empty()) {
      error("expected a contact");
      advance_one();
    }
    return n;
  }

  void advance_one()
  {
    if (pos_ < src_.size()) advance();
  }

  void check_refs(const ContactExpr & e, const std::unordered_set<std::string> & known)
  {
    switch (e.kind) {
      case ContactExpr::Kind::Open:
      case ContactExpr::Kind::Closed:
        if (!known.count(e.ref)) {
          diags_.push_back(error_at(e.span, "unknown-reference",
                                    "contact '" + e.ref + "' is not an input or coil"));
        }
        break;
      case ContactExpr::Kind::Series:
      case ContactExpr::Kind::Parallel:
        check_refs(*e.a, known);
        check_refs(*e.b, known);
        break;
    }
  }

  void validate()
  {
    std::unordered_set<std::string> declared;
    for (const auto & i : sch_.inputs) {
      if (!declared.insert(i).second) {
        diags_.push_back(error_at({0, 0}, "duplicate-target", "duplicate input '" + i + "'"));
      }
    }
    std::unordered_set<std::string> targets;
    auto check_target = [&](const Rung & r) {
      if (declared.count(r.target) || !targets.insert(r.target).second) {
        diags_.push_back(
          error_at(r.span, "duplicate-target", "duplicate rung target '" + r.target + "'"));
      }
    };
    for (const auto & r : sch_.coils) check_target(r);
    for (const auto & r : sch_.outputs) check_target(r);

    std::unordered_set<std::string> known = declared;
    for (const auto & r : sch_.coils) known.insert(r.target);
    for (const auto & r : sch_.coils) check_refs(*r.network, known);
    for (const auto & r : sch_.outputs) check_refs(*r.network, known);
  }

  const std::string & src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Schematic sch_;
  std::vector<Diagnostic> diags_;
};

// Builds a boolean expression over the model, mapping coil references through
// `coil_name` (shadow variables for coil rungs, live values for outputs).
ExprPtr contact_to_expr(const ContactExpr & e,
                        const std::unordered_map<std::string, std::string> & rename)
{
  switch (e.kind) {
    case ContactExpr::Kind::Open:
    case ContactExpr::Kind::Closed: {
      auto it = rename.find(e.ref);
      ExprPtr v = make_var(it != rename.end() ? it->second : e.ref);
      return e.kind == ContactExpr::Kind::Closed ? make_unary(UnOp::Not, std::move(v)) : std::move(v);
    }
    case ContactExpr::Kind::Series:
      return make_binary(BinOp::And, contact_to_expr(*e.a, rename), contact_to_expr(*e.b, rename));
    case ContactExpr::Kind::Parallel:
      return make_binary(BinOp::Or, contact_to_expr(*e.a, rename), contact_to_expr(*e.b, rename));
  }
  return make_bool_lit(false);
}

}  // namespace

SchematicResult parse_schematic(const std::string & source)
{
  NetlistParser p(source);
  return p.run();
}

Model translate_schematic(const Schematic & s)
{
  Model m;
  m.name = "relay_logic";
  std::unordered_set<std::string> used;
  for (const auto & i : s.inputs) used.insert(i);
  for (const auto & r : s.coils) used.insert(r.target);
  for (const auto & r : s.outputs) used.insert(r.target);

  auto fresh = [&](const std::string & base) {
    std::string name = base;
    while (used.count(name)) name += "_";
    used.insert(name);
    return name;
  };

  for (const auto & i : s.inputs) {
    VarDecl d;
    d.name = i;
    d.type.scalar.kind = ScalarKind::Bool;
    m.inputs.push_back(std::move(d));
  }
  for (const auto & r : s.outputs) {
    VarDecl d;
    d.name = r.target;
    d.type.scalar.kind = ScalarKind::Bool;
    m.outputs.push_back(std::move(d));
  }
  // Coils are de-energized at power-up. Each coil gets a shadow holding the
  // previous scan's value so rung order cannot matter.
  std::unordered_map<std::string, std::string> shadow;
  for (const auto & r : s.coils) {
    VarDecl d;
    d.name = r.target;
    d.type.scalar.kind = ScalarKind::Bool;
    d.init = 0;
    m.state.push_back(d);
    std::string sh = fresh("prev_" + r.target);
    shadow[r.target] = sh;
    d.name = sh;
    m.state.push_back(std::move(d));
  }

  for (const auto & r : s.coils) {
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::Assign;
    st->target = shadow[r.target];
    st->value = make_var(r.target);
    m.body.push_back(std::move(st));
  }
  for (const auto & r : s.coils) {
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::Assign;
    st->target = r.target;
    st->value = contact_to_expr(*r.network, shadow);
    m.body.push_back(std::move(st));
  }
  static const std::unordered_map<std::string, std::string> kNoRename;
  for (const auto & r : s.outputs) {
    auto st = std::make_unique<Stmt>();
    st->kind = Stmt::Kind::Assign;
    st->target = r.target;
    st->value = contact_to_expr(*r.network, kNoRename);
    m.body.push_back(std::move(st));
  }
  return m;
}

}  // namespace duplex

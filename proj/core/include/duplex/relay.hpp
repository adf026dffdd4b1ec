// duplex/relay.hpp - Relay-schematic netlist frontend.
//
// Netlist format, one statement per ';', '#' comments:
//   INPUT a, b;
//   COIL name = expr;
//   OUTPUT name = expr;
// where expr combines contacts with '&' (series), '|' (parallel), '!'
// (normally-closed contact), parentheses, and bare identifiers
// (normally-open contacts referring to an input or a coil).
//
// Translation gives synchronous (previous-cycle) semantics for coil
// feedback: every coil rung reads the coil values of the previous scan via
// shadow state variables, so rung order never changes observable behavior.
// Output rungs read the freshly updated coil values of the current scan.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "duplex/ast.hpp"
#include "duplex/diag.hpp"

namespace duplex
{

struct ContactExpr;
using ContactPtr = std::unique_ptr<ContactExpr>;

struct ContactExpr
{
  enum class Kind
  {
    Series,    // AND
    Parallel,  // OR
    Open,      // normally-open contact (reference)
    Closed,    // normally-closed contact (negated reference)
  };
  Kind kind = Kind::Open;
  std::string ref;  // Open/Closed
  ContactPtr a, b;  // Series/Parallel
  SourceSpan span;
};

struct Rung
{
  std::string target;
  ContactPtr network;
  SourceSpan span;
};

struct Schematic
{
  std::vector<std::string> inputs;
  std::vector<Rung> coils;
  std::vector<Rung> outputs;
};

struct SchematicResult
{
  std::optional<Schematic> schematic;
  std::vector<Diagnostic> diagnostics;
  explicit operator bool() const { return schematic.has_value() && diagnostics.empty(); }
};

SchematicResult parse_schematic(const std::string & source);

// Always produces a model that passes typecheck: one BOOL input per contact,
// one BOOL state variable per coil (plus one shadow per coil), one BOOL
// output per output rung.
Model translate_schematic(const Schematic & s);

}  // namespace duplex

// duplex/diag.hpp - Source diagnostics shared by the language frontends.
#pragma once

#include <string>
#include <vector>

namespace duplex
{

struct SourceSpan
{
  int line = 0;  // 1-based; 0 means "no location"
  int column = 0;
};

enum class Severity
{
  Error,
  Warning,
};

struct Diagnostic
{
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
  std::string code;  // stable machine-readable id, e.g. "syntax", "type-mismatch"
};

inline Diagnostic error_at(SourceSpan span, std::string code, std::string message)
{
  return Diagnostic{Severity::Error, span, std::move(message), std::move(code)};
}

std::string format_diagnostic(const Diagnostic & d);
std::string format_diagnostics(const std::vector<Diagnostic> & ds);

}  // namespace duplex

// duplex/parser.hpp - Text -> Model. Total: never throws on malformed input,
// reports diagnostics with line/column spans instead.
#pragma once

#include <string>
#include <vector>

#include "duplex/ast.hpp"
#include "duplex/diag.hpp"

namespace duplex
{

struct ParseResult
{
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;
  explicit operator bool() const { return model.has_value() && diagnostics.empty(); }
};

ParseResult parse_model(const std::string & source);

}  // namespace duplex

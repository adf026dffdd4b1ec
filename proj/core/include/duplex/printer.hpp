// duplex/printer.hpp - Canonical text form of a Model. Reparsing the output
// of print_model yields a structurally equal Model.
#pragma once

#include <string>

#include "duplex/ast.hpp"

namespace duplex
{

std::string print_model(const Model & m);
std::string print_expr(const Expr & e);

}  // namespace duplex

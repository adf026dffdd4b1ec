// duplex/typecheck.hpp - Name resolution, type annotation, constant folding.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "duplex/ast.hpp"
#include "duplex/diag.hpp"

namespace duplex
{

enum class VarSection
{
  Input,
  Output,
  State,
};

struct VarInfo
{
  std::string name;
  VarSection section = VarSection::Input;
  int section_index = 0;  // position within its section
  VarType type;
  int64_t init = 0;        // resolved initial value (state; default otherwise)
  uint32_t cell_offset = 0;  // region-relative 32-bit cell index
};

// A Model that passed typecheck. Expressions carry scalar types, constants are
// folded to literals, FOR bounds are folded to lo_val/hi_val, each FOR carries
// a dense loop_id, and every variable has a fixed cell in the data layout
// (inputs, outputs, state, in declaration order, then one scratch cell per FOR).
struct TypedModel
{
  Model model;
  std::vector<VarInfo> vars;  // inputs, then outputs, then state
  std::unordered_map<std::string, int> var_index;
  int n_inputs = 0;
  int n_outputs = 0;
  int n_state = 0;
  int n_loops = 0;
  uint32_t var_cells = 0;    // cells occupied by declared variables
  uint32_t loop_cells_base = 0;  // == var_cells; loop i uses cell loop_cells_base + i

  const VarInfo & var(int idx) const { return vars[static_cast<size_t>(idx)]; }
  int lookup(const std::string & name) const
  {
    auto it = var_index.find(name);
    return it == var_index.end() ? -1 : it->second;
  }
  uint32_t total_cells() const { return var_cells + static_cast<uint32_t>(n_loops); }
};

struct TypecheckResult
{
  std::optional<TypedModel> typed;
  std::vector<Diagnostic> diagnostics;
  explicit operator bool() const { return typed.has_value() && diagnostics.empty(); }
};

TypecheckResult typecheck(const Model & m);

// Canonical serialization order for digests and state transfer: outputs in
// declaration order, then state in declaration order (inputs are excluded:
// both controllers receive them from the same source).
std::vector<int> output_var_ids(const TypedModel & tm);
std::vector<int> state_var_ids(const TypedModel & tm);

}  // namespace duplex

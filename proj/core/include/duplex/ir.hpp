// duplex/ir.hpp - Linear IR the first code generation chain lowers to before
// stack bytecode emission. Temporaries are single-use and defined in
// evaluation order, which lets the bytecode emitter map them directly onto
// operand-stack positions.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "duplex/ast.hpp"
#include "duplex/interp.hpp"

namespace duplex
{

enum class IrOp
{
  ConstI,       // dst <- imm
  LoadVar,      // dst <- cell[cell]
  LoadElem,     // dst <- cell[cell + t(a)]     (index already IdxChk'd)
  StoreVar,     // cell[cell] <- t(a)
  StoreElem,    // cell[cell + t(a)] <- t(b)    (a index, b value)
  Bin,          // dst <- t(a) bin t(b)
  Un,           // dst <- un t(a)
  RangeChk,     // trap unless imm <= t(a) <= imm2; value passes through
  IdxChk,       // trap unless 0 <= t(a) < imm; value passes through
  Label,        // label id
  Jump,         // goto label
  JumpIfFalse,  // if t(a) == 0 goto label
  LoopInit,     // cell[cell] <- imm
  LoopBack,     // cell[cell] += 1; if cell[cell] <= imm goto label
  ReadInput,    // dst <- inputs[io_index]
  WriteOutput,  // latch[io_index] <- t(a)
  Halt,
};

struct IrInst
{
  IrOp op = IrOp::Halt;
  int dst = -1;
  int a = -1;
  int b = -1;
  int64_t imm = 0;
  int64_t imm2 = 0;
  uint32_t cell = 0;  // region-relative 32-bit cell index
  int label = -1;
  BinOp bin = BinOp::Add;
  UnOp un = UnOp::Not;
  int io_index = -1;
};

struct IrSymbol
{
  std::string name;
  uint32_t cell = 0;
  uint32_t cells = 1;
};

struct IrProgram
{
  std::vector<IrInst> code;
  int n_temps = 0;
  int n_labels = 0;
  uint32_t data_cells = 0;  // declared variables plus loop scratch
  std::vector<IrSymbol> symbols;
};

// Lowers a typechecked model to IR. FOR loops with at most 8 iterations are
// unrolled; longer loops become counted back-edges.
IrProgram lower(const TypedModel & tm);

// Big-step IR evaluation used by tests to pin IR semantics against the
// reference interpreter independently of the bytecode path.
struct IrEvalResult
{
  std::optional<TrapKind> trap;
  uint64_t steps = 0;
};
IrEvalResult ir_eval(const IrProgram & ir, std::span<int64_t> cells,
                     std::span<const int64_t> inputs, std::span<int64_t> out_latch,
                     uint64_t max_steps);

}  // namespace duplex

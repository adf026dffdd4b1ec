// duplex/codegen_b.hpp - Instance two chain: typed model -> textual register
// assembly -> fixed-width big-endian words. Every instruction line assembles
// to exactly one 32-bit word, so a four-byte-per-record image file carries
// one instruction per line.
//
// Word layout (big-endian): byte 0 opcode, byte 1 high nibble register A /
// low nibble register B, bytes 2..3 16-bit immediate. Data is addressed in
// 32-bit big-endian cells relative to the DATA_B region base. Registers r0,
// r1, r2 are emitter scratch; r3..r15 hold the expression evaluation stack,
// deeper slots spill to a scratch area after the declared cells.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duplex/memmap.hpp"
#include "duplex/typecheck.hpp"
#include "duplex/util.hpp"

namespace duplex
{

enum class OpB : uint8_t
{
  Ldi = 0x83,    // rA <- sign-extended imm16
  Lui = 0x84,    // rA <- i32(imm16 << 16)
  Ori = 0x85,    // rA <- i32(low32(rA) | imm16)
  Lw = 0x86,     // rA <- cell[imm16]
  Sw = 0x87,     // cell[imm16] <- rA
  Lx = 0x88,     // rA <- cell[imm16 + rB]
  Sx = 0x89,     // cell[imm16 + rB] <- rA
  Add = 0x8A,    // rA <- rA + rB
  Sub = 0x8B,
  Mul = 0x8C,
  Div = 0x8D,    // traps on zero rB
  Mod = 0x8E,
  Neg = 0x8F,    // rA <- -rA
  Notl = 0x90,   // rA <- !rA
  Andl = 0x91,
  Orl = 0x92,
  Xorl = 0x93,
  Ceq = 0x94,    // rA <- rA == rB
  Cne = 0x95,
  Clt = 0x96,
  Cle = 0x97,
  Cgt = 0x98,
  Cge = 0x99,
  J = 0x9A,      // pc-relative signed word offset from the next instruction
  Bz = 0x9B,     // branch when rA == 0
  Bnz = 0x9C,    // branch when rA != 0
  Tlt = 0x9D,    // trap (range) when rA < rB
  Tgt = 0x9E,    // trap (range) when rA > rB
  Trapz = 0x9F,  // trap (div-by-zero) when rA == 0
  Tidx = 0xA0,   // trap (index) unless 0 <= rA < n; imm16 0 means 65536
  Addi = 0xA1,   // rA <- rA + sign-extended imm16
  In = 0xA2,     // rA <- input line imm16
  Out = 0xA3,    // output line imm16 <- rA
  Halt = 0xA4,
};

const char * vm_b_mnemonic(uint8_t opcode);
bool vm_b_valid_opcode(uint8_t opcode);
std::span<const uint8_t> vm_b_opcodes();

struct AsmListing
{
  // Each line is either "Ln:" or one instruction (possibly with a ; comment).
  std::vector<std::string> lines;

  size_t instruction_count() const;
  std::string text() const;
};

struct ImageB
{
  std::vector<uint8_t> code;  // big-endian words, loaded at map.code_b.base
  uint32_t entry = 0;
  uint32_t data_cells = 0;     // cells used in DATA_B, spill scratch included
  uint32_t max_eval_regs = 0;  // register-file high water of the emitter
};

// Deterministic assembly emission for the cycle program.
Result<AsmListing> emit_asm(const TypedModel & tm, const MemoryMap & map);

// Errors: unknown mnemonic, bad operand, label redefinition, undefined label,
// branch out of range.
Result<ImageB> assemble(const std::string & asm_text);

// Canonical disassembly; assemble(disassemble(img).text()) is byte-identical.
Result<AsmListing> disassemble(const ImageB & image);

}  // namespace duplex

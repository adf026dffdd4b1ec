// duplex/assemble.cpp - Two-pass assembler and canonical disassembler for the
// register machine. One instruction line == one 32-bit word.
#include <cctype>
#include <map>
#include <unordered_map>

#include "duplex/codegen_b.hpp"

namespace duplex
{

namespace
{

enum class OperandShape
{
  None,        // HALT
  R,           // NEG r1 / NOTL / TRAPZ
  RR,          // ADD r1, r2 / TLT ...
  RImmS,       // LDI r1, -5 / ADDI
  RImmU,       // LUI r1, 65535 / ORI
  RCell,       // LW r1, [17] / SW
  RRCell,      // LX r1, r2, [17] / SX
  Label,       // J L3
  RLabel,      // BZ r1, L3
  RIo,         // IN r1, 0 / OUT
  RLen,        // TIDX r1, 65536
};

struct OpInfo
{
  OpB op;
  OperandShape shape;
};

const std::map<std::string, OpInfo, std::less<>> & mnemonic_table()
{
  static const std::map<std::string, OpInfo, std::less<>> t = {
    {"LDI", {OpB::Ldi, OperandShape::RImmS}},   {"LUI", {OpB::Lui, OperandShape::RImmU}},
    {"ORI", {OpB::Ori, OperandShape::RImmU}},   {"LW", {OpB::Lw, OperandShape::RCell}},
    {"SW", {OpB::Sw, OperandShape::RCell}},     {"LX", {OpB::Lx, OperandShape::RRCell}},
    {"SX", {OpB::Sx, OperandShape::RRCell}},    {"ADD", {OpB::Add, OperandShape::RR}},
    {"SUB", {OpB::Sub, OperandShape::RR}},      {"MUL", {OpB::Mul, OperandShape::RR}},
    {"DIV", {OpB::Div, OperandShape::RR}},      {"MOD", {OpB::Mod, OperandShape::RR}},
    {"NEG", {OpB::Neg, OperandShape::R}},       {"NOTL", {OpB::Notl, OperandShape::R}},
    {"ANDL", {OpB::Andl, OperandShape::RR}},    {"ORL", {OpB::Orl, OperandShape::RR}},
    {"XORL", {OpB::Xorl, OperandShape::RR}},    {"CEQ", {OpB::Ceq, OperandShape::RR}},
    {"CNE", {OpB::Cne, OperandShape::RR}},      {"CLT", {OpB::Clt, OperandShape::RR}},
    {"CLE", {OpB::Cle, OperandShape::RR}},      {"CGT", {OpB::Cgt, OperandShape::RR}},
    {"CGE", {OpB::Cge, OperandShape::RR}},      {"J", {OpB::J, OperandShape::Label}},
    {"BZ", {OpB::Bz, OperandShape::RLabel}},    {"BNZ", {OpB::Bnz, OperandShape::RLabel}},
    {"TLT", {OpB::Tlt, OperandShape::RR}},      {"TGT", {OpB::Tgt, OperandShape::RR}},
    {"TRAPZ", {OpB::Trapz, OperandShape::R}},   {"TIDX", {OpB::Tidx, OperandShape::RLen}},
    {"ADDI", {OpB::Addi, OperandShape::RImmS}}, {"IN", {OpB::In, OperandShape::RIo}},
    {"OUT", {OpB::Out, OperandShape::RIo}},     {"HALT", {OpB::Halt, OperandShape::None}},
  };
  return t;
}

struct PendingInst
{
  OpB op = OpB::Halt;
  int ra = 0;
  int rb = 0;
  uint16_t imm = 0;
  std::string label;  // branch target, empty otherwise
  size_t line_no = 0;
};

std::string trim(std::string_view s)
{
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_operands(const std::string & s)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string last = trim(cur);
  if (!last.empty()) out.push_back(last);
  return out;
}

bool parse_reg(const std::string & s, int & r)
{
  if (s.size() < 2 || (s[0] != 'r' && s[0] != 'R')) return false;
  int v = 0;
  for (size_t i = 1; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
    if (v > 15) return false;
  }
  r = v;
  return true;
}

bool parse_int(const std::string & s, int64_t & v)
{
  if (s.empty()) return false;
  size_t i = 0;
  bool neg = false;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return false;
  }
  int64_t acc = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    acc = acc * 10 + (s[i] - '0');
    if (acc > 1ll << 32) return false;
  }
  v = neg ? -acc : acc;
  return true;
}

bool parse_cell(const std::string & s, uint16_t & cell)
{
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return false;
  int64_t v;
  if (!parse_int(s.substr(1, s.size() - 2), v)) return false;
  if (v < 0 || v > 65535) return false;
  cell = static_cast<uint16_t>(v);
  return true;
}

}  // namespace

Result<ImageB> assemble(const std::string & asm_text)
{
  std::vector<PendingInst> insts;
  std::unordered_map<std::string, size_t> labels;

  auto fail_at = [](size_t line_no, const std::string & msg) {
    return Result<ImageB>::fail("line " + std::to_string(line_no) + ": " + msg);
  };

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= asm_text.size()) {
    size_t eol = asm_text.find('\n', pos);
    if (eol == std::string::npos) eol = asm_text.size();
    std::string raw = asm_text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    size_t semi = raw.find(';');
    if (semi != std::string::npos) raw.resize(semi);
    std::string linetext = trim(raw);
    if (linetext.empty()) continue;

    if (linetext.back() == ':') {
      std::string name = trim(std::string_view(linetext).substr(0, linetext.size() - 1));
      if (name.empty()) return fail_at(line_no, "empty label");
      if (!labels.emplace(name, insts.size()).second) {
        return fail_at(line_no, "label '" + name + "' redefined");
      }
      continue;
    }

    size_t sp = linetext.find_first_of(" \t");
    std::string mnemonic = sp == std::string::npos ? linetext : linetext.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(std::string_view(linetext).substr(sp));
    auto it = mnemonic_table().find(mnemonic);
    if (it == mnemonic_table().end()) {
      return fail_at(line_no, "unknown mnemonic '" + mnemonic + "'");
    }
    auto ops = split_operands(rest);
    PendingInst pi;
    pi.op = it->second.op;
    pi.line_no = line_no;
    auto bad = [&]() { return fail_at(line_no, "bad operands for " + mnemonic); };
    int64_t v = 0;
    switch (it->second.shape) {
      case OperandShape::None:
        if (!ops.empty()) return bad();
        break;
      case OperandShape::R:
        if (ops.size() != 1 || !parse_reg(ops[0], pi.ra)) return bad();
        break;
      case OperandShape::RR:
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || !parse_reg(ops[1], pi.rb)) return bad();
        break;
      case OperandShape::RImmS:
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || !parse_int(ops[1], v)) return bad();
        if (v < -32768 || v > 32767) return fail_at(line_no, "immediate out of range");
        pi.imm = static_cast<uint16_t>(static_cast<int16_t>(v));
        break;
      case OperandShape::RImmU:
      case OperandShape::RIo:
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || !parse_int(ops[1], v)) return bad();
        if (v < 0 || v > 65535) return fail_at(line_no, "immediate out of range");
        pi.imm = static_cast<uint16_t>(v);
        break;
      case OperandShape::RLen:
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || !parse_int(ops[1], v)) return bad();
        if (v < 1 || v > 65536) return fail_at(line_no, "length out of range");
        pi.imm = v == 65536 ? 0 : static_cast<uint16_t>(v);
        break;
      case OperandShape::RCell: {
        uint16_t cell;
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || !parse_cell(ops[1], cell)) return bad();
        pi.imm = cell;
        break;
      }
      case OperandShape::RRCell: {
        uint16_t cell;
        if (ops.size() != 3 || !parse_reg(ops[0], pi.ra) || !parse_reg(ops[1], pi.rb) ||
            !parse_cell(ops[2], cell)) {
          return bad();
        }
        pi.imm = cell;
        break;
      }
      case OperandShape::Label:
        if (ops.size() != 1 || ops[0].empty()) return bad();
        pi.label = ops[0];
        break;
      case OperandShape::RLabel:
        if (ops.size() != 2 || !parse_reg(ops[0], pi.ra) || ops[1].empty()) return bad();
        pi.label = ops[1];
        break;
    }
    insts.push_back(std::move(pi));
  }

  ImageB img;
  img.code.reserve(insts.size() * 4);
  for (size_t i = 0; i < insts.size(); ++i) {
    PendingInst & pi = insts[i];
    if (!pi.label.empty()) {
      auto lit = labels.find(pi.label);
      if (lit == labels.end()) {
        return fail_at(pi.line_no, "undefined label '" + pi.label + "'");
      }
      int64_t off = static_cast<int64_t>(lit->second) - static_cast<int64_t>(i) - 1;
      if (off < -32768 || off > 32767) {
        return fail_at(pi.line_no, "branch out of range");
      }
      pi.imm = static_cast<uint16_t>(static_cast<int16_t>(off));
    }
    img.code.push_back(static_cast<uint8_t>(pi.op));
    img.code.push_back(static_cast<uint8_t>(pi.ra << 4 | pi.rb));
    img.code.push_back(static_cast<uint8_t>(pi.imm >> 8));
    img.code.push_back(static_cast<uint8_t>(pi.imm & 0xFF));
  }
  return Result<ImageB>::ok(std::move(img));
}

Result<AsmListing> disassemble(const ImageB & image)
{
  if (image.code.size() % 4 != 0) {
    return Result<AsmListing>::fail("code size is not a whole number of words");
  }
  size_t n = image.code.size() / 4;
  auto word = [&](size_t i) {
    const uint8_t * p = image.code.data() + 4 * i;
    return std::tuple<uint8_t, int, int, uint16_t>(
      p[0], p[1] >> 4, p[1] & 0xF, static_cast<uint16_t>(static_cast<uint16_t>(p[2]) << 8 | p[3]));
  };

  // Collect branch targets, label them in address order.
  std::map<size_t, int> target_labels;
  for (size_t i = 0; i < n; ++i) {
    auto [op, ra, rb, imm] = word(i);
    if (op == static_cast<uint8_t>(OpB::J) || op == static_cast<uint8_t>(OpB::Bz) ||
        op == static_cast<uint8_t>(OpB::Bnz)) {
      int64_t target = static_cast<int64_t>(i) + 1 + static_cast<int16_t>(imm);
      if (target < 0 || target > static_cast<int64_t>(n)) {
        return Result<AsmListing>::fail("branch target outside image");
      }
      target_labels.emplace(static_cast<size_t>(target), 0);
    }
  }
  int next_label = 0;
  for (auto & [addr, id] : target_labels) id = next_label++;

  AsmListing out;
  for (size_t i = 0; i < n; ++i) {
    auto lt = target_labels.find(i);
    if (lt != target_labels.end()) {
      out.lines.push_back("L" + std::to_string(lt->second) + ":");
    }
    auto [op, ra, rb, imm] = word(i);
    const char * mn = vm_b_mnemonic(op);
    if (!mn) {
      return Result<AsmListing>::fail("invalid opcode byte at word " + std::to_string(i));
    }
    std::string lineout = "  ";
    lineout += mn;
    std::string rA = "r" + std::to_string(ra);
    std::string rB = "r" + std::to_string(rb);
    switch (static_cast<OpB>(op)) {
      case OpB::Halt:
        break;
      case OpB::Neg:
      case OpB::Notl:
      case OpB::Trapz:
        lineout += " " + rA;
        break;
      case OpB::Add:
      case OpB::Sub:
      case OpB::Mul:
      case OpB::Div:
      case OpB::Mod:
      case OpB::Andl:
      case OpB::Orl:
      case OpB::Xorl:
      case OpB::Ceq:
      case OpB::Cne:
      case OpB::Clt:
      case OpB::Cle:
      case OpB::Cgt:
      case OpB::Cge:
      case OpB::Tlt:
      case OpB::Tgt:
        lineout += " " + rA + ", " + rB;
        break;
      case OpB::Ldi:
      case OpB::Addi:
        lineout += " " + rA + ", " + std::to_string(static_cast<int16_t>(imm));
        break;
      case OpB::Lui:
      case OpB::Ori:
      case OpB::In:
      case OpB::Out:
        lineout += " " + rA + ", " + std::to_string(imm);
        break;
      case OpB::Tidx:
        lineout += " " + rA + ", " + std::to_string(imm == 0 ? 65536 : imm);
        break;
      case OpB::Lw:
      case OpB::Sw:
        lineout += " " + rA + ", [" + std::to_string(imm) + "]";
        break;
      case OpB::Lx:
      case OpB::Sx:
        lineout += " " + rA + ", " + rB + ", [" + std::to_string(imm) + "]";
        break;
      case OpB::J: {
        size_t target = static_cast<size_t>(static_cast<int64_t>(i) + 1 + static_cast<int16_t>(imm));
        lineout += " L" + std::to_string(target_labels.at(target));
        break;
      }
      case OpB::Bz:
      case OpB::Bnz: {
        size_t target = static_cast<size_t>(static_cast<int64_t>(i) + 1 + static_cast<int16_t>(imm));
        lineout += " " + rA + ", L" + std::to_string(target_labels.at(target));
        break;
      }
    }
    out.lines.push_back(std::move(lineout));
  }
  // A trailing branch target (one past the last word) still needs its label.
  auto lt = target_labels.find(n);
  if (lt != target_labels.end()) {
    out.lines.push_back("L" + std::to_string(lt->second) + ":");
  }
  return Result<AsmListing>::ok(std::move(out));
}

}  // namespace duplex

// duplex/util.cpp
#include "duplex/util.hpp"

#include <array>
#include <cstdio>

#include "duplex/diag.hpp"

namespace duplex
{

namespace
{

std::array<uint32_t, 256> make_crc_table()
{
  std::array<uint32_t, 256> t{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    t[i] = c;
  }
  return t;
}

const std::array<uint32_t, 256> & crc_table()
{
  static const std::array<uint32_t, 256> t = make_crc_table();
  return t;
}

}  // namespace

uint32_t Crc32::table(uint8_t i) { return crc_table()[i]; }

uint32_t crc32(std::span<const uint8_t> bytes)
{
  Crc32 c;
  c.update(bytes);
  return c.value();
}

uint64_t fnv1a64(std::span<const uint8_t> bytes)
{
  uint64_t h = 0xCBF29CE484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t fnv1a64(const std::string & s)
{
  return fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t *>(s.data()), s.size()));
}

std::string fingerprint_hex(const std::string & content)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
  return std::string(buf);
}

std::string format_diagnostic(const Diagnostic & d)
{
  std::string out;
  if (d.span.line > 0) {
    out += std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
  }
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += d.message;
  if (!d.code.empty()) {
    out += " [" + d.code + "]";
  }
  return out;
}

std::string format_diagnostics(const std::vector<Diagnostic> & ds)
{
  std::string out;
  for (const auto & d : ds) {
    out += format_diagnostic(d);
    out += '\n';
  }
  return out;
}

}  // namespace duplex

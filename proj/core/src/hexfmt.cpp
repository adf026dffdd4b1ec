// duplex/hexfmt.cpp
#include "duplex/hexfmt.hpp"

#include <algorithm>

namespace duplex
{

namespace
{

const char * kHexDigits = "0123456789ABCDEF";

void put_byte(std::string & out, uint8_t b, uint8_t & sum)
{
  out += kHexDigits[b >> 4];
  out += kHexDigits[b & 0xF];
  sum = static_cast<uint8_t>(sum + b);
}

int hex_digit(char c)
{
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

size_t hex_data_record_count(size_t n_bytes, unsigned bytes_per_record)
{
  return (n_bytes + bytes_per_record - 1) / bytes_per_record;
}

Result<std::string> hex_encode(std::span<const uint8_t> bytes, uint32_t base,
                               unsigned bytes_per_record)
{
  if (bytes_per_record < 1 || bytes_per_record > 32) {
    return Result<std::string>::fail("bytes_per_record must be in 1..32");
  }
  if (static_cast<uint64_t>(base) + bytes.size() > 65536) {
    return Result<std::string>::fail("address overflow: base + length exceeds 65536");
  }
  std::string out;
  out.reserve((bytes.size() / bytes_per_record + 2) * (13 + 2 * bytes_per_record));
  for (size_t off = 0; off < bytes.size(); off += bytes_per_record) {
    size_t len = std::min<size_t>(bytes_per_record, bytes.size() - off);
    uint32_t addr = base + static_cast<uint32_t>(off);
    uint8_t sum = 0;
    out += ':';
    put_byte(out, static_cast<uint8_t>(len), sum);
    put_byte(out, static_cast<uint8_t>(addr >> 8), sum);
    put_byte(out, static_cast<uint8_t>(addr & 0xFF), sum);
    put_byte(out, 0x00, sum);
    for (size_t i = 0; i < len; ++i) {
      put_byte(out, bytes[off + i], sum);
    }
    uint8_t dummy = 0;
    put_byte(out, static_cast<uint8_t>(-sum), dummy);
    out += '\n';
  }
  out += ":00000001FF\n";
  return Result<std::string>::ok(std::move(out));
}

HexDecodeResult hex_decode(const std::string & text)
{
  HexDecodeResult res;
  struct Chunk
  {
    uint32_t addr;
    std::vector<uint8_t> bytes;
  };
  std::vector<Chunk> chunks;
  bool saw_eof = false;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (saw_eof) {
      res.error = {line_no, "content after eof record"};
      return res;
    }
    if (line[0] != ':') {
      res.error = {line_no, "record must start with ':'"};
      return res;
    }
    if ((line.size() - 1) % 2 != 0 || line.size() < 11) {
      res.error = {line_no, "truncated record"};
      return res;
    }
    std::vector<uint8_t> raw;
    raw.reserve((line.size() - 1) / 2);
    for (size_t i = 1; i + 1 < line.size(); i += 2) {
      int hi = hex_digit(line[i]);
      int lo = hex_digit(line[i + 1]);
      if (hi < 0 || lo < 0) {
        res.error = {line_no, "bad character in record"};
        return res;
      }
      raw.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    uint8_t sum = 0;
    for (uint8_t b : raw) sum = static_cast<uint8_t>(sum + b);
    if (sum != 0) {
      res.error = {line_no, "bad checksum"};
      return res;
    }
    uint8_t len = raw[0];
    if (raw.size() != static_cast<size_t>(len) + 5) {
      res.error = {line_no, "length field does not match record size"};
      return res;
    }
    uint32_t addr = static_cast<uint32_t>(raw[1]) << 8 | raw[2];
    uint8_t type = raw[3];
    if (type == 0x01) {
      if (len != 0 || addr != 0) {
        res.error = {line_no, "malformed eof record"};
        return res;
      }
      saw_eof = true;
      continue;
    }
    if (type != 0x00) {
      res.error = {line_no, "unsupported record type"};
      return res;
    }
    chunks.push_back({addr, std::vector<uint8_t>(raw.begin() + 4, raw.end() - 1)});
    ++res.data_records;
  }
  if (!saw_eof) {
    res.error = {0, "missing eof record"};
    return res;
  }
  std::sort(chunks.begin(), chunks.end(),
            [](const Chunk & a, const Chunk & b) { return a.addr < b.addr; });
  HexImage img;
  if (chunks.empty()) {
    res.image = std::move(img);
    return res;
  }
  img.base = chunks.front().addr;
  uint32_t next = img.base;
  for (const Chunk & c : chunks) {
    if (c.addr < next) {
      res.error = {0, "overlapping data records"};
      return res;
    }
    if (c.addr > next) {
      res.error = {0, "gap between data records"};
      return res;
    }
    img.bytes.insert(img.bytes.end(), c.bytes.begin(), c.bytes.end());
    next = c.addr + static_cast<uint32_t>(c.bytes.size());
  }
  res.image = std::move(img);
  return res;
}

}  // namespace duplex

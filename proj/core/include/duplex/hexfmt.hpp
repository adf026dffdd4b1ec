// duplex/hexfmt.hpp - Text image format used to ship code between the build
// and the controllers. Record types: 00 (data) and 01 (end of file) only,
// 16-bit load addresses, uppercase hex, '\n' line endings.
//
// Record line:  :LLAAAATT<payload>CC
//   LL  payload byte count
//   AAAA  16-bit load offset, big-endian in the text
//   TT  00 data, 01 eof
//   CC  two's complement of the sum of all preceding record bytes, mod 256
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "duplex/util.hpp"

namespace duplex
{

struct HexImage
{
  uint32_t base = 0;  // load address of the first byte; 0 for an empty image
  std::vector<uint8_t> bytes;
};

struct HexError
{
  size_t line = 0;  // 1-based line number, 0 when not line-specific
  std::string message;
};

// Encodes `bytes` starting at `base`. bytes_per_record must be in 1..32 and
// base + bytes.size() must not exceed 65536.
Result<std::string> hex_encode(std::span<const uint8_t> bytes, uint32_t base,
                               unsigned bytes_per_record);

struct HexDecodeResult
{
  std::optional<HexImage> image;
  HexError error;
  size_t data_records = 0;  // number of type-00 records seen
  explicit operator bool() const { return image.has_value(); }
};

// Decodes a full file. Data records may appear in any order but must cover a
// contiguous, non-overlapping range; the file must end with the eof record.
HexDecodeResult hex_decode(const std::string & text);

// Number of type-00 records hex_encode will produce for a payload size.
size_t hex_data_record_count(size_t n_bytes, unsigned bytes_per_record);

}  // namespace duplex

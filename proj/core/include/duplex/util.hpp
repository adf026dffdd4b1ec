// duplex/util.hpp - Small shared helpers: result type, deterministic RNG, hashes.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace duplex
{

// Minimal value-or-error carrier for operations with a single failure string.
template <class T>
struct Result
{
  std::optional<T> value;
  std::string error;

  static Result ok(T v)
  {
    Result r;
    r.value = std::move(v);
    return r;
  }
  static Result fail(std::string msg)
  {
    Result r;
    r.error = std::move(msg);
    return r;
  }
  explicit operator bool() const { return value.has_value(); }
  T & operator*() { return *value; }
  const T & operator*() const { return *value; }
  T * operator->() { return &*value; }
  const T * operator->() const { return &*value; }
};

// splitmix64. Used everywhere randomness must be reproducible byte-for-byte
// across platforms and standard libraries.
class Rng
{
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next()
  {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [lo, hi], inclusive. Requires lo <= hi.
  int64_t range(int64_t lo, int64_t hi)
  {
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    if (span == 0) return static_cast<int64_t>(next());  // full 64-bit range
    return lo + static_cast<int64_t>(next() % span);
  }

  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

private:
  uint64_t state_;
};

// CRC-32, polynomial 0x04C11DB7 reflected (0xEDB88320), init and final xor
// 0xFFFFFFFF. crc32 of "123456789" is 0xCBF43926.
class Crc32
{
public:
  void update(std::span<const uint8_t> bytes)
  {
    for (uint8_t b : bytes) {
      acc_ = (acc_ >> 8) ^ table(static_cast<uint8_t>(acc_ ^ b));
    }
  }
  void update_byte(uint8_t b) { acc_ = (acc_ >> 8) ^ table(static_cast<uint8_t>(acc_ ^ b)); }
  uint32_t value() const { return acc_ ^ 0xFFFFFFFFu; }

private:
  static uint32_t table(uint8_t i);
  uint32_t acc_ = 0xFFFFFFFFu;
};

uint32_t crc32(std::span<const uint8_t> bytes);

// FNV-1a 64-bit, used for content fingerprints of build artifacts.
uint64_t fnv1a64(std::span<const uint8_t> bytes);
uint64_t fnv1a64(const std::string & s);
std::string fingerprint_hex(const std::string & content);

}  // namespace duplex

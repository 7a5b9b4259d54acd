#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace martsia {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline Bytes to_bytes(std::string_view s) { return {s.begin(), s.end()}; }
inline std::string to_string(ByteView b) { return {b.begin(), b.end()}; }

std::string to_hex(ByteView bytes);
/// Throws Error(Malformed) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

std::string base64_encode(ByteView bytes);
/// Throws Error(Malformed) on invalid input.
Bytes base64_decode(std::string_view text);

/// Appends a big-endian u32 length prefix followed by the bytes.
void append_framed(Bytes& out, ByteView field);
void append_u32(Bytes& out, std::uint32_t v);
void append_u64(Bytes& out, std::uint64_t v);

/// Sequential reader over length-framed binary encodings. Every read
/// throws Error(Malformed) on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView take(std::size_t n);
  ByteView framed();
  std::string framed_string();
  /// Every unconsumed byte.
  ByteView rest();
  bool empty() const { return pos_ == data_.size(); }
  /// Throws unless every byte has been consumed.
  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace martsia

#include "martsia/bytes.hpp"

#include <openssl/evp.h>

#include "martsia/error.hpp"

namespace martsia {


std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw Error(ErrorCode::Malformed, "hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::Malformed, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string base64_encode(ByteView bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::Malformed, "base64 length not a multiple of 4");
  Bytes out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::Malformed, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  if (base64_encode(out) != text) throw Error(ErrorCode::Malformed, "non-canonical base64");
  return out;
}

void append_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void append_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void append_framed(Bytes& out, ByteView field) {
  append_u32(out, static_cast<std::uint32_t>(field.size()));
  out.insert(out.end(), field.begin(), field.end());
}

ByteView ByteReader::take(std::size_t n) {
  if (data_.size() - pos_ < n) throw Error(ErrorCode::Malformed, "truncated encoding");
  ByteView v = data_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint32_t ByteReader::u32() {
  const ByteView b = take(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

std::uint64_t ByteReader::u64() {
  const ByteView b = take(8);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

ByteView ByteReader::framed() { return take(u32()); }

ByteView ByteReader::rest() { return take(data_.size() - pos_); }

std::string ByteReader::framed_string() { return to_string(framed()); }

void ByteReader::expect_end() const {
  if (pos_ != data_.size()) throw Error(ErrorCode::Malformed, "trailing bytes after encoding");
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unauthorized: return "unauthorized";
    case ErrorCode::IntegrityFailure: return "integrity-failure";
    case ErrorCode::MajorityMissing: return "majority-missing";
    case ErrorCode::CommitMismatch: return "commit-mismatch";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::Malformed: return "malformed";
    case ErrorCode::MixedGid: return "mixed-gid";
    case ErrorCode::RoleDenied: return "role-denied";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::PhaseError: return "phase-error";
    case ErrorCode::InconsistentAuthorities: return "inconsistent-authorities";
    case ErrorCode::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace martsia

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "martsia/bytes.hpp"
#include "martsia/crypto/rng.hpp"
#include "martsia/crypto/sha256.hpp"
#include "martsia/group/curve.hpp"
#include "martsia/group/field.hpp"
#include "martsia/group/pairing.hpp"

namespace martsia::group {

enum class GroupId : std::uint8_t { G1 = 1, G2 = 2, GT = 3 };

std::string_view group_name(GroupId id);

// Compressed encodings: big-endian x with the top three bits of the first
// byte carrying (compressed, infinity, y-sign). G2 writes x.c1 before x.c0.
// Gt is the twelve Fp coefficients in tower order, uncompressed.
inline constexpr std::size_t kG1Bytes = 48;
inline constexpr std::size_t kG2Bytes = 96;
inline constexpr std::size_t kGtBytes = 576;
inline constexpr std::size_t kScalarBytes = 32;

std::array<std::uint8_t, kG1Bytes> serialize(const G1& p);
std::array<std::uint8_t, kG2Bytes> serialize(const G2& p);
std::array<std::uint8_t, kGtBytes> serialize(const Gt& x);
std::array<std::uint8_t, kScalarBytes> serialize(const Fr& s);

/// Reject anything that is not the canonical encoding of a subgroup element.
std::optional<G1> deserialize_g1(ByteView in);
std::optional<G2> deserialize_g2(ByteView in);
std::optional<Gt> deserialize_gt(ByteView in);
std::optional<Fr> deserialize_scalar(ByteView in);

/// Throwing variants (Error with ErrorCode::Malformed).
G1 decode_g1(ByteView in);
G2 decode_g2(ByteView in);
Gt decode_gt(ByteView in);
Fr decode_scalar(ByteView in);

bool in_prime_subgroup(const G1& p);
bool in_prime_subgroup(const G2& p);
bool in_prime_subgroup(const Gt& x);

/// Try-and-increment onto the curve followed by cofactor clearing. The
/// domain tag separates independent hash functions.
G1 hash_to_g1(ByteView input, std::string_view domain);
G2 hash_to_g2(ByteView input, std::string_view domain);

Fr random_scalar(crypto::Rng& rng);
/// Uniform nonzero scalar.
Fr random_nonzero_scalar(crypto::Rng& rng);
G1 random_g1(crypto::Rng& rng);
Gt random_gt(crypto::Rng& rng);

/// Fixed public group description: generators derived from a seed string.
struct GroupSuite {
  std::string generator_seed;
  G1 g1;
  G2 g2;
  Gt gt;  // e(g1, g2)

  static const GroupSuite& standard();
  static std::string order_hex();
};

/// Public hash functions of the MA-ABE construction.
struct HashFunctions {
  /// Reader identity hash, lands in G2 next to the user-key components.
  static G2 gid(std::string_view gid);
  /// Attribute hash, lands in G2 where the per-row ciphertext term lives.
  static G2 attribute(std::string_view literal);
  static crypto::Digest digest(ByteView data) { return crypto::sha256(data); }
};

}  // namespace martsia::group

#pragma once

#include <array>
#include <memory>

#include "martsia/bytes.hpp"

namespace martsia::crypto {

using Ed25519PublicKey = std::array<std::uint8_t, 32>;
using Ed25519Signature = std::array<std::uint8_t, 64>;

class SigningKey {
 public:
  /// The private key is the 32-byte seed itself.
  explicit SigningKey(const std::array<std::uint8_t, 32>& seed);

  const Ed25519PublicKey& public_key() const { return public_key_; }
  Ed25519Signature sign(ByteView message) const;

 private:
  std::array<std::uint8_t, 32> seed_;
  Ed25519PublicKey public_key_{};
};

bool verify(ByteView public_key, ByteView message, ByteView signature);

}  // namespace martsia::crypto

#pragma once

#include <array>
#include <optional>

#include "martsia/bytes.hpp"

namespace martsia::crypto {

using AeadKey = std::array<std::uint8_t, 32>;
using AeadNonce = std::array<std::uint8_t, 12>;
inline constexpr std::size_t kAeadTagBytes = 16;

/// AES-256-GCM; the output is ciphertext followed by the 16-byte tag.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView associated, ByteView plaintext);
/// nullopt when the tag does not verify.
std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView associated,
                               ByteView sealed);

}  // namespace martsia::crypto

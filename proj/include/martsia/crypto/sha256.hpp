#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "martsia/bytes.hpp"

namespace martsia::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
/// Digest of the concatenation of `parts`.
Digest sha256(std::initializer_list<ByteView> parts);
std::string sha256_hex(ByteView data);

}  // namespace martsia::crypto

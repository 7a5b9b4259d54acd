#include "martsia/crypto/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <stdexcept>

#include "martsia/crypto/sha256.hpp"

namespace martsia::crypto {

struct Rng::State {
  Digest key{};
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx{nullptr, EVP_CIPHER_CTX_free};
};

namespace {

std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> keystream(const Digest& key) {
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                      EVP_CIPHER_CTX_free);
  const std::array<std::uint8_t, 16> iv{};
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20(), nullptr, key.data(), iv.data()) != 1) {
    throw std::runtime_error("chacha20 init failed");
  }
  return ctx;
}

}  // namespace

Rng::Rng(ByteView seed) : state_(std::make_unique<State>()) {
  state_->key = sha256({as_bytes("martsia/rng"), seed});
  state_->ctx = keystream(state_->key);
}

Rng Rng::from_seed(std::uint64_t seed) {
  Bytes b;
  append_u64(b, seed);
  return Rng(b);
}

Rng Rng::from_os_entropy() {
  Bytes seed(32);
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return Rng(seed);
}

Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;
Rng::~Rng() = default;

void Rng::fill(std::span<std::uint8_t> out) {
  static const std::array<std::uint8_t, 256> kZeros{};
  std::size_t done = 0;
  while (done < out.size()) {
    const std::size_t n = std::min(kZeros.size(), out.size() - done);
    int written = 0;
    if (EVP_EncryptUpdate(state_->ctx.get(), out.data() + done, &written, kZeros.data(),
                          static_cast<int>(n)) != 1) {
      throw std::runtime_error("chacha20 keystream failed");
    }
    done += n;
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  // rejection sampling removes modulo bias
  const std::uint64_t limit = max() - (max() % bound);
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork(std::string_view label) const {
  const Digest child = sha256({state_->key, as_bytes(label)});
  return Rng(child);
}

}  // namespace martsia::crypto

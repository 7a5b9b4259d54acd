#include "martsia/crypto/ed25519.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace martsia::crypto {
namespace {

using PKey = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

PKey private_key(const std::array<std::uint8_t, 32>& seed) {
  PKey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()),
           EVP_PKEY_free);
  if (!key) throw std::runtime_error("ed25519 key import failed");
  return key;
}

}  // namespace

SigningKey::SigningKey(const std::array<std::uint8_t, 32>& seed) : seed_(seed) {
  const PKey key = private_key(seed_);
  std::size_t len = public_key_.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), public_key_.data(), &len) != 1 ||
      len != public_key_.size()) {
    throw std::runtime_error("ed25519 public key export failed");
  }
}

Ed25519Signature SigningKey::sign(ByteView message) const {
  const PKey key = private_key(seed_);
  MdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  Ed25519Signature sig{};
  std::size_t len = sig.size();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
      len != sig.size()) {
    throw std::runtime_error("ed25519 signing failed");
  }
  return sig;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != 32 || signature.size() != 64) return false;
  PKey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                       public_key.size()),
           EVP_PKEY_free);
  if (!key) return false;
  MdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  return ctx && EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) == 1 &&
         EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

}  // namespace martsia::crypto

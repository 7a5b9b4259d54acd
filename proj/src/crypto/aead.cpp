#include "martsia/crypto/aead.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace martsia::crypto {
namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx init(const AeadKey& key, const AeadNonce& nonce, bool encrypt) {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_CipherInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr,
                                encrypt ? 1 : 0) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()),
                          nullptr) != 1 ||
      EVP_CipherInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data(), -1) != 1) {
    throw std::runtime_error("aes-256-gcm init failed");
  }
  return ctx;
}

void feed_associated(EVP_CIPHER_CTX* ctx, ByteView associated) {
  int len = 0;
  if (!associated.empty() &&
      EVP_CipherUpdate(ctx, nullptr, &len, associated.data(), static_cast<int>(associated.size())) != 1) {
    throw std::runtime_error("aes-256-gcm associated data failed");
  }
}

}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView associated, ByteView plaintext) {
  CipherCtx ctx = init(key, nonce, true);
  feed_associated(ctx.get(), associated);
  Bytes out(plaintext.size() + kAeadTagBytes);
  int len = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                       static_cast<int>(plaintext.size())) != 1) {
    throw std::runtime_error("aes-256-gcm encrypt failed");
  }
  int tail = 0;
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + len, &tail) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kAeadTagBytes),
                          out.data() + plaintext.size()) != 1) {
    throw std::runtime_error("aes-256-gcm finalize failed");
  }
  return out;
}

std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView associated,
                               ByteView sealed) {
  if (sealed.size() < kAeadTagBytes) return std::nullopt;
  const std::size_t n = sealed.size() - kAeadTagBytes;
  CipherCtx ctx = init(key, nonce, false);
  feed_associated(ctx.get(), associated);
  Bytes out(n);
  int len = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(n)) != 1) {
    return std::nullopt;
  }
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(n), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()),
                          tag.data()) != 1) {
    return std::nullopt;
  }
  int tail = 0;
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + len, &tail) != 1) return std::nullopt;
  return out;
}

}  // namespace martsia::crypto

#pragma once

#include <memory>

#include "martsia/bytes.hpp"
#include "martsia/crypto/rng.hpp"

typedef struct evp_pkey_st EVP_PKEY;

namespace martsia::crypto {

class RsaPublicKey {
 public:
  /// SubjectPublicKeyInfo DER; throws Error(Malformed).
  static RsaPublicKey from_der(ByteView der);
  Bytes to_der() const;
  std::size_t modulus_bytes() const;

  /// RSAES-OAEP with SHA-256 and MGF1-SHA-256; the seed comes from `rng`.
  Bytes oaep_encrypt(ByteView message, Rng& rng) const;
  bool pss_verify(ByteView message, ByteView signature) const;

  EVP_PKEY* handle() const { return key_.get(); }

 private:
  friend class RsaKeyPair;
  explicit RsaPublicKey(std::shared_ptr<EVP_PKEY> key) : key_(std::move(key)) {}
  std::shared_ptr<EVP_PKEY> key_;
};

class RsaKeyPair {
 public:
  /// Primes are drawn from `rng`, so a seeded stream gives a reproducible key.
  static RsaKeyPair generate(Rng& rng, unsigned bits = 2048);

  const RsaPublicKey& public_key() const { return public_; }
  /// Throws Error(IntegrityFailure) on a bad padding check.
  Bytes oaep_decrypt(ByteView ciphertext) const;
  /// RSASSA-PSS with SHA-256 and a 32-byte salt.
  Bytes pss_sign(ByteView message) const;

  EVP_PKEY* handle() const { return key_.get(); }

 private:
  explicit RsaKeyPair(std::shared_ptr<EVP_PKEY> key) : key_(key), public_(key) {}
  std::shared_ptr<EVP_PKEY> key_;
  RsaPublicKey public_;
};

/// RSA-OAEP wraps a fresh AES-256 key; AES-GCM carries the payload.
Bytes hybrid_encrypt(const RsaPublicKey& recipient, ByteView plaintext, Rng& rng);
/// Throws Error(IntegrityFailure) when unwrapping or authentication fails.
Bytes hybrid_decrypt(const RsaKeyPair& recipient, ByteView ciphertext);

}  // namespace martsia::crypto

#include <openssl/evp.h>
#include <openssl/rsa.h>

#include "doctest.h"
#include "martsia/crypto/rsa.hpp"
#include "martsia/error.hpp"

using namespace martsia;
using namespace martsia::crypto;

namespace {

const RsaKeyPair& shared_key() {
  static const RsaKeyPair key = [] {
    Rng rng = Rng::from_seed(42);
    return RsaKeyPair::generate(rng);
  }();
  return key;
}

EVP_PKEY_CTX* oaep_ctx(EVP_PKEY* key, bool encrypt) {
  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(key, nullptr);
  REQUIRE(ctx != nullptr);
  REQUIRE((encrypt ? EVP_PKEY_encrypt_init(ctx) : EVP_PKEY_decrypt_init(ctx)) == 1);
  REQUIRE(EVP_PKEY_CTX_set_rsa_padding(ctx, RSA_PKCS1_OAEP_PADDING) == 1);
  REQUIRE(EVP_PKEY_CTX_set_rsa_oaep_md(ctx, EVP_sha256()) == 1);
  REQUIRE(EVP_PKEY_CTX_set_rsa_mgf1_md(ctx, EVP_sha256()) == 1);
  return ctx;
}

Bytes openssl_oaep(EVP_PKEY* key, ByteView in, bool encrypt) {
  EVP_PKEY_CTX* ctx = oaep_ctx(key, encrypt);
  const auto run = encrypt ? EVP_PKEY_encrypt : EVP_PKEY_decrypt;
  std::size_t len = 0;
  REQUIRE(run(ctx, nullptr, &len, in.data(), in.size()) == 1);
  Bytes out(len);
  const int ok = run(ctx, out.data(), &len, in.data(), in.size());
  EVP_PKEY_CTX_free(ctx);
  REQUIRE(ok == 1);
  out.resize(len);
  return out;
}

}  // namespace

TEST_CASE("rsa keys are 2048-bit and reproducible from a seed") {
  const auto& key = shared_key();
  CHECK(key.public_key().modulus_bytes() == 256);
  Rng rng = Rng::from_seed(42);
  CHECK(RsaKeyPair::generate(rng).public_key().to_der() == key.public_key().to_der());
  Rng other = Rng::from_seed(43);
  CHECK(RsaKeyPair::generate(other).public_key().to_der() != key.public_key().to_der());

  Rng small = Rng::from_seed(1);
  CHECK_THROWS_AS(RsaKeyPair::generate(small, 1024), Error);
}

TEST_CASE("public key DER round-trips and rejects junk") {
  const Bytes der = shared_key().public_key().to_der();
  CHECK(RsaPublicKey::from_der(der).to_der() == der);
  Bytes cut(der.begin(), der.end() - 1);
  CHECK_THROWS_AS(RsaPublicKey::from_der(cut), Error);
  CHECK_THROWS_AS(RsaPublicKey::from_der(to_bytes("not a key")), Error);
}

TEST_CASE("OAEP interoperates with OpenSSL's OAEP-SHA256 in both directions") {
  const auto& key = shared_key();
  Rng rng = Rng::from_seed(7);
  for (std::size_t len : {0u, 1u, 32u, 100u, 190u}) {
    CAPTURE(len);
    const Bytes msg = rng.bytes(len);
    const Bytes ours = key.public_key().oaep_encrypt(msg, rng);
    CHECK(ours.size() == 256);
    CHECK(openssl_oaep(key.handle(), ours, false) == msg);
    const Bytes theirs = openssl_oaep(key.handle(), msg, true);
    CHECK(key.oaep_decrypt(theirs) == msg);
  }
  CHECK_THROWS_AS(key.public_key().oaep_encrypt(Bytes(191), rng), Error);
}

TEST_CASE("OAEP rejects modified ciphertexts") {
  const auto& key = shared_key();
  Rng rng = Rng::from_seed(8);
  const Bytes ct = key.public_key().oaep_encrypt(to_bytes("session key"), rng);
  for (std::size_t i : {0u, 17u, 128u, 255u}) {
    Bytes bad = ct;
    bad[i] ^= 0x01;
    try {
      key.oaep_decrypt(bad);
      FAIL("modified ciphertext decrypted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IntegrityFailure);
    }
  }
  CHECK_THROWS_AS(key.oaep_decrypt(Bytes(255)), Error);
}

TEST_CASE("PSS signatures verify only for the signing key and message") {
  const auto& key = shared_key();
  Rng rng = Rng::from_seed(9);
  const auto other = RsaKeyPair::generate(rng);
  const Bytes msg = to_bytes("challenge");
  const Bytes sig = key.pss_sign(msg);
  CHECK(key.public_key().pss_verify(msg, sig));
  CHECK_FALSE(other.public_key().pss_verify(msg, sig));
  CHECK_FALSE(key.public_key().pss_verify(to_bytes("challengf"), sig));
  Bytes bad = sig;
  bad[10] ^= 0x80;
  CHECK_FALSE(key.public_key().pss_verify(msg, bad));
}

TEST_CASE("hybrid payloads open for the recipient only") {
  const auto& key = shared_key();
  Rng rng = Rng::from_seed(10);
  const auto other = RsaKeyPair::generate(rng);
  const Bytes payload = rng.bytes(3000);
  const Bytes ct = hybrid_encrypt(key.public_key(), payload, rng);
  CHECK(hybrid_decrypt(key, ct) == payload);

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([&] { hybrid_decrypt(other, ct); }) == ErrorCode::IntegrityFailure);
  for (std::size_t i = 0; i < ct.size(); i += 97) {
    Bytes bad = ct;
    bad[i] ^= 0x04;
    CAPTURE(i);
    CHECK(code_of([&] { hybrid_decrypt(key, bad); }) == ErrorCode::IntegrityFailure);
  }
  CHECK(code_of([&] { hybrid_decrypt(key, Bytes(ct.begin(), ct.begin() + 100)); }) ==
        ErrorCode::IntegrityFailure);
}

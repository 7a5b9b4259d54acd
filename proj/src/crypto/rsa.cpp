#include "martsia/crypto/rsa.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <algorithm>
#include <stdexcept>

#include "martsia/crypto/aead.hpp"
#include "martsia/crypto/sha256.hpp"
#include "martsia/error.hpp"

namespace martsia::crypto {
namespace {

using Bn = std::unique_ptr<BIGNUM, decltype(&BN_clear_free)>;
using BnCtx = std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)>;
using PKeyCtx = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

constexpr std::size_t kHashBytes = 32;

Bn bn() {
  Bn b(BN_new(), BN_clear_free);
  if (!b) throw std::runtime_error("BN_new failed");
  return b;
}

std::shared_ptr<EVP_PKEY> share(EVP_PKEY* key) {
  if (key == nullptr) throw std::runtime_error("rsa key construction failed");
  return {key, EVP_PKEY_free};
}

Bn random_prime(Rng& rng, unsigned bits, const BIGNUM* e, BN_CTX* ctx) {
  Bn p = bn();
  Bn p1 = bn();
  Bn g = bn();
  for (;;) {
    Bytes buf = rng.bytes(bits / 8);
    buf[0] |= 0xc0;  // top two bits keep n at full length
    buf.back() |= 1;
    BN_bin2bn(buf.data(), static_cast<int>(buf.size()), p.get());
    for (int step = 0; step < 4096; ++step) {
      if (BN_check_prime(p.get(), ctx, nullptr) == 1) {
        BN_sub(p1.get(), p.get(), BN_value_one());
        BN_gcd(g.get(), p1.get(), e, ctx);
        if (BN_is_one(g.get())) return p;
      }
      BN_add_word(p.get(), 2);
    }
  }
}

Bytes mgf1(ByteView seed, std::size_t len) {
  Bytes out;
  for (std::uint32_t counter = 0; out.size() < len; ++counter) {
    Bytes c;
    append_u32(c, counter);
    const Digest d = sha256({seed, c});
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(len);
  return out;
}

Bytes raw_rsa(EVP_PKEY* key, ByteView in, bool encrypt) {
  PKeyCtx ctx(EVP_PKEY_CTX_new(key, nullptr), EVP_PKEY_CTX_free);
  if (!ctx || (encrypt ? EVP_PKEY_encrypt_init(ctx.get()) : EVP_PKEY_decrypt_init(ctx.get())) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_NO_PADDING) != 1) {
    throw std::runtime_error("raw rsa init failed");
  }
  std::size_t len = 0;
  const auto run = encrypt ? EVP_PKEY_encrypt : EVP_PKEY_decrypt;
  if (run(ctx.get(), nullptr, &len, in.data(), in.size()) != 1) {
    throw Error(ErrorCode::IntegrityFailure, "rsa operation rejected its input");
  }
  Bytes out(len);
  if (run(ctx.get(), out.data(), &len, in.data(), in.size()) != 1) {
    throw Error(ErrorCode::IntegrityFailure, "rsa operation rejected its input");
  }
  out.resize(len);
  return out;
}

const Digest& empty_label_hash() {
  static const Digest h = sha256(ByteView{});
  return h;
}

}  // namespace

RsaPublicKey RsaPublicKey::from_der(ByteView der) {
  const unsigned char* p = der.data();
  EVP_PKEY* key = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  if (key == nullptr || p != der.data() + der.size() || EVP_PKEY_get_base_id(key) != EVP_PKEY_RSA) {
    EVP_PKEY_free(key);
    throw Error(ErrorCode::Malformed, "not an RSA public key");
  }
  RsaPublicKey out(share(key));
  if (out.modulus_bytes() < 256) throw Error(ErrorCode::Malformed, "RSA modulus below 2048 bits");
  return out;
}

Bytes RsaPublicKey::to_der() const {
  unsigned char* buf = nullptr;
  const int len = i2d_PUBKEY(key_.get(), &buf);
  if (len <= 0) throw std::runtime_error("rsa public key export failed");
  Bytes out(buf, buf + len);
  OPENSSL_free(buf);
  return out;
}

std::size_t RsaPublicKey::modulus_bytes() const {
  return static_cast<std::size_t>(EVP_PKEY_get_size(key_.get()));
}

Bytes RsaPublicKey::oaep_encrypt(ByteView message, Rng& rng) const {
  const std::size_t k = modulus_bytes();
  if (message.size() + 2 * kHashBytes + 2 > k) {
    throw Error(ErrorCode::InvalidArgument, "message too long for RSA-OAEP");
  }
  // DB = lHash || PS || 0x01 || M
  Bytes db(empty_label_hash().begin(), empty_label_hash().end());
  db.resize(k - kHashBytes - 1 - message.size() - 1, 0);
  db.push_back(0x01);
  db.insert(db.end(), message.begin(), message.end());
  const Bytes seed = rng.bytes(kHashBytes);
  const Bytes db_mask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];
  Bytes masked_seed = seed;
  const Bytes seed_mask = mgf1(db, kHashBytes);
  for (std::size_t i = 0; i < kHashBytes; ++i) masked_seed[i] ^= seed_mask[i];

  Bytes em{0x00};
  em.insert(em.end(), masked_seed.begin(), masked_seed.end());
  em.insert(em.end(), db.begin(), db.end());
  return raw_rsa(key_.get(), em, true);
}

bool RsaPublicKey::pss_verify(ByteView message, ByteView signature) const {
  MdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_PKEY_CTX* pctx = nullptr;
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, static_cast<int>(kHashBytes)) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

RsaKeyPair RsaKeyPair::generate(Rng& rng, unsigned bits) {
  if (bits < 2048 || bits % 16 != 0) throw Error(ErrorCode::InvalidArgument, "RSA keys need >= 2048 bits");
  BnCtx ctx(BN_CTX_new(), BN_CTX_free);
  Bn e = bn();
  BN_set_word(e.get(), 65537);
  Bn p = random_prime(rng, bits / 2, e.get(), ctx.get());
  Bn q = random_prime(rng, bits / 2, e.get(), ctx.get());
  while (BN_cmp(p.get(), q.get()) == 0) q = random_prime(rng, bits / 2, e.get(), ctx.get());
  if (BN_cmp(p.get(), q.get()) < 0) std::swap(p, q);

  Bn n = bn(), d = bn(), dp = bn(), dq = bn(), qinv = bn(), p1 = bn(), q1 = bn(), phi = bn();
  BN_mul(n.get(), p.get(), q.get(), ctx.get());
  BN_sub(p1.get(), p.get(), BN_value_one());
  BN_sub(q1.get(), q.get(), BN_value_one());
  BN_mul(phi.get(), p1.get(), q1.get(), ctx.get());
  if (BN_mod_inverse(d.get(), e.get(), phi.get(), ctx.get()) == nullptr ||
      BN_mod(dp.get(), d.get(), p1.get(), ctx.get()) != 1 ||
      BN_mod(dq.get(), d.get(), q1.get(), ctx.get()) != 1 ||
      BN_mod_inverse(qinv.get(), q.get(), p.get(), ctx.get()) == nullptr) {
    throw std::runtime_error("rsa key derivation failed");
  }

  std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(),
                                                                      OSSL_PARAM_BLD_free);
  if (!bld || OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_N, n.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_E, e.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_D, d.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_FACTOR1, p.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_FACTOR2, q.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_EXPONENT1, dp.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_EXPONENT2, dq.get()) != 1 ||
      OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_COEFFICIENT1, qinv.get()) != 1) {
    throw std::runtime_error("rsa parameter build failed");
  }
  std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()),
                                                                 OSSL_PARAM_free);
  PKeyCtx kctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr), EVP_PKEY_CTX_free);
  EVP_PKEY* key = nullptr;
  if (!params || !kctx || EVP_PKEY_fromdata_init(kctx.get()) != 1 ||
      EVP_PKEY_fromdata(kctx.get(), &key, EVP_PKEY_KEYPAIR, params.get()) != 1) {
    throw std::runtime_error("rsa key import failed");
  }
  return RsaKeyPair(share(key));
}

Bytes RsaKeyPair::oaep_decrypt(ByteView ciphertext) const {
  const std::size_t k = public_.modulus_bytes();
  if (ciphertext.size() != k) throw Error(ErrorCode::IntegrityFailure, "RSA-OAEP ciphertext length");
  Bytes em = raw_rsa(key_.get(), ciphertext, false);
  if (em.size() < k) em.insert(em.begin(), k - em.size(), 0);

  Bytes seed(em.begin() + 1, em.begin() + 1 + kHashBytes);
  Bytes db(em.begin() + 1 + kHashBytes, em.end());
  const Bytes seed_mask = mgf1(db, kHashBytes);
  for (std::size_t i = 0; i < kHashBytes; ++i) seed[i] ^= seed_mask[i];
  const Bytes db_mask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];

  bool ok = em[0] == 0 && std::equal(empty_label_hash().begin(), empty_label_hash().end(), db.begin());
  std::size_t i = kHashBytes;
  while (i < db.size() && db[i] == 0) ++i;
  ok = ok && i < db.size() && db[i] == 0x01;
  if (!ok) throw Error(ErrorCode::IntegrityFailure, "RSA-OAEP padding check failed");
  return Bytes(db.begin() + static_cast<std::ptrdiff_t>(i + 1), db.end());
}

Bytes RsaKeyPair::pss_sign(ByteView message) const {
  MdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_PKEY_CTX* pctx = nullptr;
  std::size_t len = 0;
  if (!ctx || EVP_DigestSignInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, static_cast<int>(kHashBytes)) != 1 ||
      EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size()) != 1) {
    throw std::runtime_error("rsa-pss init failed");
  }
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1) {
    throw std::runtime_error("rsa-pss signing failed");
  }
  sig.resize(len);
  return sig;
}

Bytes hybrid_encrypt(const RsaPublicKey& recipient, ByteView plaintext, Rng& rng) {
  AeadKey key{};
  AeadNonce nonce{};
  rng.fill(key);
  rng.fill(nonce);
  Bytes out;
  append_framed(out, recipient.oaep_encrypt(key, rng));
  out.insert(out.end(), nonce.begin(), nonce.end());
  const Bytes body = aead_seal(key, nonce, as_bytes("martsia/hybrid/1"), plaintext);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes hybrid_decrypt(const RsaKeyPair& recipient, ByteView ciphertext) {
  try {
    ByteReader r(ciphertext);
    const Bytes key_bytes = recipient.oaep_decrypt(r.framed());
    if (key_bytes.size() != 32) throw Error(ErrorCode::IntegrityFailure, "wrapped key length");
    AeadKey key{};
    std::copy(key_bytes.begin(), key_bytes.end(), key.begin());
    AeadNonce nonce{};
    const ByteView n = r.take(nonce.size());
    std::copy(n.begin(), n.end(), nonce.begin());
    const ByteView body = r.rest();
    auto plain = aead_open(key, nonce, as_bytes("martsia/hybrid/1"), body);
    if (!plain) throw Error(ErrorCode::IntegrityFailure, "hybrid payload failed authentication");
    return std::move(*plain);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IntegrityFailure) throw;
    throw Error(ErrorCode::IntegrityFailure, std::string("hybrid payload unreadable: ") + e.what());
  }
}

}  // namespace martsia::crypto

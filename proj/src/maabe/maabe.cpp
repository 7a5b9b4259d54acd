#include "martsia/maabe/maabe.hpp"

#include <algorithm>
#include <array>

namespace martsia::maabe {

using group::Fr;
using group::G1;
using group::G2;
using group::Gt;

namespace {

using Tag = std::array<std::uint8_t, 4>;
constexpr Tag kParamsTag = {'M', 'P', 'P', 1};
constexpr Tag kPublicTag = {'M', 'P', 'K', 1};
constexpr Tag kSecretTag = {'M', 'S', 'K', 1};
constexpr Tag kShareTag = {'M', 'D', 'K', 1};
constexpr Tag kCiphertextTag = {'M', 'C', 'T', 1};

void put_tag(Bytes& out, const Tag& tag) { out.insert(out.end(), tag.begin(), tag.end()); }

void expect_tag(ByteReader& r, const Tag& tag, std::string_view what) {
  const ByteView got = r.take(tag.size());
  if (!std::equal(got.begin(), got.end(), tag.begin())) {
    throw Error(ErrorCode::Malformed, "not a " + std::string(what) + " encoding (bad version tag)");
  }
}

template <std::size_t N>
void put(Bytes& out, const std::array<std::uint8_t, N>& a) {
  out.insert(out.end(), a.begin(), a.end());
}

void put_string(Bytes& out, std::string_view s) { append_framed(out, as_bytes(s)); }

void put_strings(Bytes& out, const auto& strings) {
  append_u32(out, static_cast<std::uint32_t>(strings.size()));
  for (const auto& s : strings) put_string(out, s);
}

std::vector<std::string> read_strings(ByteReader& r) {
  const std::uint32_t n = r.u32();
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(r.framed_string());
  return out;
}

G1 read_g1(ByteReader& r) { return group::decode_g1(r.take(group::kG1Bytes)); }
G2 read_g2(ByteReader& r) { return group::decode_g2(r.take(group::kG2Bytes)); }
Gt read_gt(ByteReader& r) { return group::decode_gt(r.take(group::kGtBytes)); }
Fr read_fr(ByteReader& r) { return group::decode_scalar(r.take(group::kScalarBytes)); }

void put_structure(Bytes& out, const AccessStructure& s) {
  put_string(out, s.policy_text);
  put_strings(out, s.authorities);
  append_u32(out, static_cast<std::uint32_t>(s.rows()));
  append_u32(out, static_cast<std::uint32_t>(s.width()));
  for (std::size_t i = 0; i < s.rows(); ++i) {
    put_string(out, s.row_labels[i].attribute);
    put_string(out, s.row_labels[i].authority);
    for (const Fr& x : s.matrix[i]) put(out, group::serialize(x));
  }
}

AccessStructure read_structure(ByteReader& r) {
  AccessStructure s;
  s.policy_text = r.framed_string();
  s.authorities = read_strings(r);
  const std::uint32_t rows = r.u32();
  const std::uint32_t width = r.u32();
  if (rows == 0 || width == 0) throw Error(ErrorCode::Malformed, "empty access structure");
  for (std::uint32_t i = 0; i < rows; ++i) {
    AttributeLiteral label;
    label.attribute = r.framed_string();
    label.authority = r.framed_string();
    std::vector<Fr> row;
    for (std::uint32_t j = 0; j < width; ++j) row.push_back(read_fr(r));
    s.row_labels.push_back(std::move(label));
    s.matrix.push_back(std::move(row));
  }
  return s;
}

}  // namespace

bool GlobalParams::has_authority(std::string_view authority) const {
  return std::find(universes.authorities.begin(), universes.authorities.end(), authority) !=
         universes.authorities.end();
}

const std::string& GlobalParams::authority_of(const AttributeLiteral& literal) const {
  if (!has_authority(literal.authority)) {
    throw Error(ErrorCode::InvalidArgument, "unknown authority '" + literal.authority + "'");
  }
  if (!universes.attributes.empty() && !universes.attributes.contains(literal.attribute)) {
    throw Error(ErrorCode::InvalidArgument, "attribute outside the universe: " + literal.attribute);
  }
  return *std::find(universes.authorities.begin(), universes.authorities.end(), literal.authority);
}

Bytes GlobalParams::serialize() const {
  Bytes out;
  put_tag(out, kParamsTag);
  put(out, group::serialize(g1));
  put(out, group::serialize(g2));
  put(out, group::serialize(egg));
  put_strings(out, universes.authorities);
  put_strings(out, universes.attributes);
  put_string(out, universes.gid_format);
  return out;
}

GlobalParams GlobalParams::deserialize(ByteView in) {
  ByteReader r(in);
  expect_tag(r, kParamsTag, "global parameters");
  GlobalParams pp;
  pp.g1 = read_g1(r);
  pp.g2 = read_g2(r);
  pp.egg = read_gt(r);
  pp.universes.authorities = read_strings(r);
  for (auto& a : read_strings(r)) pp.universes.attributes.insert(std::move(a));
  pp.universes.gid_format = r.framed_string();
  r.expect_end();
  if (pp.g1.is_identity() || !(group::pair(pp.g1, pp.g2) == pp.egg)) {
    throw Error(ErrorCode::Malformed, "inconsistent global parameters");
  }
  return pp;
}

GlobalParams global_setup(const G1& seed_element, Universes universes) {
  if (seed_element.is_identity()) {
    throw Error(ErrorCode::InvalidArgument, "identity element cannot seed the global parameters");
  }
  if (universes.authorities.empty()) {
    throw Error(ErrorCode::InvalidArgument, "authority universe is empty");
  }
  GlobalParams pp;
  pp.g1 = seed_element;
  pp.g2 = group::hash_to_g2(group::serialize(seed_element), "martsia/setup/g2");
  pp.egg = group::pair(pp.g1, pp.g2);
  pp.universes = std::move(universes);
  return pp;
}

Bytes AuthorityPublicKey::serialize() const {
  Bytes out;
  put_tag(out, kPublicTag);
  put_string(out, authority);
  put(out, group::serialize(egg_alpha));
  put(out, group::serialize(g1_y));
  return out;
}

AuthorityPublicKey AuthorityPublicKey::deserialize(ByteView in) {
  ByteReader r(in);
  expect_tag(r, kPublicTag, "authority public key");
  AuthorityPublicKey pk;
  pk.authority = r.framed_string();
  pk.egg_alpha = read_gt(r);
  pk.g1_y = read_g1(r);
  r.expect_end();
  return pk;
}

Bytes AuthoritySecretKey::serialize() const {
  Bytes out;
  put_tag(out, kSecretTag);
  put_string(out, authority);
  put(out, group::serialize(alpha));
  put(out, group::serialize(y));
  return out;
}

AuthoritySecretKey AuthoritySecretKey::deserialize(ByteView in) {
  ByteReader r(in);
  expect_tag(r, kSecretTag, "authority secret key");
  AuthoritySecretKey sk;
  sk.authority = r.framed_string();
  sk.alpha = read_fr(r);
  sk.y = read_fr(r);
  r.expect_end();
  return sk;
}

bool AuthorityKeyPair::consistent(const GlobalParams& pp) const {
  return public_key.authority == secret_key.authority &&
         public_key.egg_alpha == pp.egg.pow(secret_key.alpha) &&
         public_key.g1_y == pp.g1.mul(secret_key.y);
}

AuthorityKeyPair auth_setup(const GlobalParams& pp, const std::string& authority, crypto::Rng& rng) {
  if (!pp.has_authority(authority)) {
    throw Error(ErrorCode::InvalidArgument, "unknown authority '" + authority + "'");
  }
  AuthorityKeyPair kp;
  kp.secret_key = {authority, group::random_nonzero_scalar(rng), group::random_nonzero_scalar(rng)};
  kp.public_key = {authority, pp.egg.pow(kp.secret_key.alpha), pp.g1.mul(kp.secret_key.y)};
  return kp;
}

Bytes DecryptionKeyShare::serialize() const {
  Bytes out;
  put_tag(out, kShareTag);
  put_string(out, gid);
  put_string(out, literal.attribute);
  put_string(out, literal.authority);
  put(out, group::serialize(k));
  put(out, group::serialize(kp));
  return out;
}

DecryptionKeyShare DecryptionKeyShare::deserialize(ByteView in) {
  ByteReader r(in);
  expect_tag(r, kShareTag, "decryption key share");
  DecryptionKeyShare s;
  s.gid = r.framed_string();
  s.literal.attribute = r.framed_string();
  s.literal.authority = r.framed_string();
  s.k = read_g2(r);
  s.kp = read_g1(r);
  r.expect_end();
  return s;
}

DecryptionKeyShare keygen(const GlobalParams& pp, const std::string& gid,
                          const AuthoritySecretKey& sk, const AttributeLiteral& literal,
                          crypto::Rng& rng) {
  if (pp.authority_of(literal) != sk.authority) {
    throw Error(ErrorCode::InvalidArgument, "authority '" + sk.authority +
                                                "' does not govern " + literal.to_string());
  }
  if (gid.empty()) throw Error(ErrorCode::InvalidArgument, "empty gid");
  const Fr t = group::random_nonzero_scalar(rng);
  DecryptionKeyShare share;
  share.gid = gid;
  share.literal = literal;
  share.k = pp.g2.mul(sk.alpha) + group::HashFunctions::gid(gid).mul(sk.y) +
            group::HashFunctions::attribute(literal.to_string()).mul(t);
  share.kp = pp.g1.mul(t);
  return share;
}

Bytes AbeCiphertext::serialize() const {
  Bytes out;
  put_tag(out, kCiphertextTag);
  put_structure(out, structure);
  put(out, group::serialize(c0));
  for (const auto& row : rows) {
    put(out, group::serialize(row.c1));
    put(out, group::serialize(row.c2));
    put(out, group::serialize(row.c3));
    put(out, group::serialize(row.c4));
  }
  return out;
}

AbeCiphertext AbeCiphertext::deserialize(ByteView in) {
  ByteReader r(in);
  expect_tag(r, kCiphertextTag, "ciphertext");
  AbeCiphertext ct;
  ct.structure = read_structure(r);
  ct.c0 = read_gt(r);
  for (std::size_t i = 0; i < ct.structure.rows(); ++i) {
    CiphertextRow row;
    row.c1 = read_gt(r);
    row.c2 = read_g1(r);
    row.c3 = read_g1(r);
    row.c4 = read_g2(r);
    ct.rows.push_back(row);
  }
  r.expect_end();
  return ct;
}

AbeCiphertext encrypt(const GlobalParams& pp, const Gt& message, const AccessStructure& structure,
                      const std::map<std::string, AuthorityPublicKey>& authority_keys,
                      crypto::Rng& rng) {
  if (structure.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty access structure");
  std::vector<const AuthorityPublicKey*> row_keys;
  for (const auto& label : structure.row_labels) {
    const std::string& authority = pp.authority_of(label);
    const auto it = authority_keys.find(authority);
    if (it == authority_keys.end()) throw MissingAuthorityKey(authority);
    row_keys.push_back(&it->second);
  }

  const std::size_t width = structure.width();
  std::vector<Fr> v(width), w(width);
  for (std::size_t j = 0; j < width; ++j) {
    v[j] = group::random_scalar(rng);
    w[j] = j == 0 ? Fr::zero() : group::random_scalar(rng);
  }
  AbeCiphertext ct;
  ct.structure = structure;
  ct.c0 = message * pp.egg.pow(v[0]);
  for (std::size_t x = 0; x < structure.rows(); ++x) {
    Fr lambda = Fr::zero();
    Fr omega = Fr::zero();
    for (std::size_t j = 0; j < width; ++j) {
      lambda += structure.matrix[x][j] * v[j];
      omega += structure.matrix[x][j] * w[j];
    }
    const Fr t = group::random_nonzero_scalar(rng);
    const AuthorityPublicKey& pk = *row_keys[x];
    CiphertextRow row;
    row.c1 = pp.egg.pow(lambda) * pk.egg_alpha.pow(t);
    row.c2 = -pp.g1.mul(t);
    row.c3 = pk.g1_y.mul(t) + pp.g1.mul(omega);
    row.c4 = group::HashFunctions::attribute(structure.row_labels[x].to_string()).mul(t);
    ct.rows.push_back(row);
  }
  return ct;
}

Gt decrypt(const GlobalParams& pp, const AbeCiphertext& ct,
           const std::vector<DecryptionKeyShare>& shares) {
  (void)pp;
  if (shares.empty()) throw Error(ErrorCode::Unauthorized, "no key shares supplied");
  const std::string& gid = shares.front().gid;
  for (const auto& s : shares) {
    if (s.gid != gid) {
      throw Error(ErrorCode::MixedGid, "key shares belong to different gids");
    }
  }
  if (ct.rows.size() != ct.structure.rows()) {
    throw Error(ErrorCode::Malformed, "ciphertext row count does not match its access structure");
  }

  std::map<AttributeLiteral, const DecryptionKeyShare*> by_literal;
  for (const auto& s : shares) by_literal.emplace(s.literal, &s);
  std::vector<std::size_t> owned;
  for (std::size_t i = 0; i < ct.structure.rows(); ++i) {
    if (by_literal.contains(ct.structure.row_labels[i])) owned.push_back(i);
  }
  const auto coeffs = lsss_reconstruct(ct.structure, owned);
  if (!coeffs) throw Error(ErrorCode::Unauthorized, "key shares do not satisfy the policy");

  // prod_x (C1x e(C2x, Kx) e(C3x, H(gid)) e(KPx, C4x))^cx = egg^s
  Gt blind;
  G1 h_arg;
  std::vector<std::pair<G1, G2>> terms;
  for (const auto& [x, c] : *coeffs) {
    const CiphertextRow& row = ct.rows[x];
    const DecryptionKeyShare& share = *by_literal.at(ct.structure.row_labels[x]);
    blind *= c == Fr::one() ? row.c1 : row.c1.pow(c);
    terms.emplace_back(row.c2.mul(c), share.k);
    terms.emplace_back(share.kp.mul(c), row.c4);
    h_arg += row.c3.mul(c);
  }
  terms.emplace_back(h_arg, group::HashFunctions::gid(gid));
  blind *= group::multi_pair(terms);
  return ct.c0 / blind;
}

std::string armor(std::string_view label, ByteView binary) {
  return std::string(label) + ":" + to_hex(binary);
}

Bytes dearmor(std::string_view label, std::string_view text) {
  if (text.size() <= label.size() || text.substr(0, label.size()) != label ||
      text[label.size()] != ':') {
    throw Error(ErrorCode::Malformed, "expected armoured " + std::string(label));
  }
  return from_hex(text.substr(label.size() + 1));
}

}  // namespace martsia::maabe

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "martsia/bytes.hpp"
#include "martsia/crypto/rng.hpp"
#include "martsia/crypto/sha256.hpp"
#include "martsia/error.hpp"
#include "martsia/group/group.hpp"
#include "martsia/maabe/lsss.hpp"
#include "martsia/policy/policy.hpp"

namespace martsia::maabe {

using policy::AccessStructure;
using policy::AttributeLiteral;

struct Universes {
  /// Ordered; the order fixes how `Attr@n+` expands.
  std::vector<std::string> authorities;
  /// Empty means any attribute name is admissible.
  std::set<std::string> attributes;
  std::string gid_format = "account-address";
};

struct GlobalParams {
  group::G1 g1;
  group::G2 g2;
  group::Gt egg;  // e(g1, g2)
  Universes universes;

  bool has_authority(std::string_view authority) const;
  /// The authority that governs `literal`; throws InvalidArgument when the
  /// literal falls outside the universes.
  const std::string& authority_of(const AttributeLiteral& literal) const;

  Bytes serialize() const;
  static GlobalParams deserialize(ByteView in);
  crypto::Digest digest() const { return crypto::sha256(serialize()); }
};

/// The shared generator is the seed element itself; the G2 generator is
/// hashed from it so every party derives the same pair.
GlobalParams global_setup(const group::G1& seed_element, Universes universes);

struct AuthorityPublicKey {
  std::string authority;
  group::Gt egg_alpha;
  group::G1 g1_y;

  Bytes serialize() const;
  static AuthorityPublicKey deserialize(ByteView in);
  friend bool operator==(const AuthorityPublicKey&, const AuthorityPublicKey&) = default;
};

struct AuthoritySecretKey {
  std::string authority;
  group::Fr alpha;
  group::Fr y;

  Bytes serialize() const;
  static AuthoritySecretKey deserialize(ByteView in);
};

struct AuthorityKeyPair {
  AuthorityPublicKey public_key;
  AuthoritySecretKey secret_key;

  /// Recomputes the public half from the secret half.
  bool consistent(const GlobalParams& pp) const;
};

AuthorityKeyPair auth_setup(const GlobalParams& pp, const std::string& authority, crypto::Rng& rng);

struct DecryptionKeyShare {
  std::string gid;
  AttributeLiteral literal;
  group::G2 k;   // g2^alpha * H(gid)^y * F(literal)^t
  group::G1 kp;  // g1^t

  Bytes serialize() const;
  static DecryptionKeyShare deserialize(ByteView in);
  friend bool operator==(const DecryptionKeyShare&, const DecryptionKeyShare&) = default;
};

DecryptionKeyShare keygen(const GlobalParams& pp, const std::string& gid,
                          const AuthoritySecretKey& sk, const AttributeLiteral& literal,
                          crypto::Rng& rng);

struct CiphertextRow {
  group::Gt c1;  // egg^lambda * egg_alpha^t
  group::G1 c2;  // g1^-t
  group::G1 c3;  // g1_y^t * g1^w
  group::G2 c4;  // F(literal)^t
  friend bool operator==(const CiphertextRow&, const CiphertextRow&) = default;
};

struct AbeCiphertext {
  AccessStructure structure;
  group::Gt c0;  // m * egg^s
  std::vector<CiphertextRow> rows;

  Bytes serialize() const;
  static AbeCiphertext deserialize(ByteView in);
};

/// Raised by encrypt when a row's authority has no supplied key.
class MissingAuthorityKey : public Error {
 public:
  explicit MissingAuthorityKey(std::string authority)
      : Error(ErrorCode::NotFound, "no public key for authority '" + authority + "'"),
        authority_(std::move(authority)) {}
  const std::string& authority() const noexcept { return authority_; }

 private:
  std::string authority_;
};

AbeCiphertext encrypt(const GlobalParams& pp, const group::Gt& message,
                      const AccessStructure& structure,
                      const std::map<std::string, AuthorityPublicKey>& authority_keys,
                      crypto::Rng& rng);

/// Throws Error(MixedGid) when the shares name more than one gid and
/// Error(Unauthorized) when their literals do not span the policy.
group::Gt decrypt(const GlobalParams& pp, const AbeCiphertext& ct,
                  const std::vector<DecryptionKeyShare>& shares);

/// Hex armour for CLI output: "<label>:" followed by lowercase hex.
std::string armor(std::string_view label, ByteView binary);
Bytes dearmor(std::string_view label, std::string_view text);

}  // namespace martsia::maabe

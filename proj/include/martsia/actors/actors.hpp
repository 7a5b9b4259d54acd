#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "martsia/crypto/ed25519.hpp"
#include "martsia/crypto/rng.hpp"
#include "martsia/crypto/rsa.hpp"
#include "martsia/datastore/store.hpp"
#include "martsia/envelope/envelope.hpp"
#include "martsia/ledger/ledger.hpp"
#include "martsia/maabe/maabe.hpp"

namespace martsia::actors {

using ledger::Address;
using ledger::Json;
using maabe::DecryptionKeyShare;

/// Shared infrastructure every actor talks to. `clock` is the logical time
/// used for challenge expiry.
struct Environment {
  ledger::Ledger& ledger;
  datastore::ContentStore& store;
  std::uint64_t clock = 0;
};

/// Signing keys, optional RSA key pair and private randomness, all derived
/// from one root stream and a label. The ledger address is the GID.
/// `keys()` is the fixed derivation stream for long-term secrets; `rng()` is
/// consumed by runtime draws and can be re-keyed per session.
class ActorIdentity {
 public:
  ActorIdentity(std::string label, const crypto::Rng& root, bool with_rsa);

  const std::string& label() const { return label_; }
  const Address& address() const { return address_; }
  const std::string& gid() const { return address_; }
  const crypto::SigningKey& signing_key() const { return signing_; }
  bool has_rsa() const { return rsa_.has_value(); }
  /// Throws Error(PhaseError) for identities created without one.
  const crypto::RsaKeyPair& rsa() const;
  const crypto::Rng& keys() const { return keys_; }
  crypto::Rng& rng() { return rng_; }
  void reseed_runtime(std::string_view label) { rng_ = keys_.fork("runtime/" + std::string(label)); }

  ledger::Receipt submit(Environment& env, std::string_view contract, std::string_view method,
                         Json args, const std::vector<const ActorIdentity*>& cosigners = {}) const;
  /// As submit, throwing Error(receipt.code) on rejection.
  void submit_or_throw(Environment& env, std::string_view contract, std::string_view method,
                       Json args, const std::vector<const ActorIdentity*>& cosigners = {}) const;

 private:
  std::string label_;
  crypto::Rng keys_;
  crypto::Rng rng_;
  crypto::SigningKey signing_;
  Address address_;
  std::optional<crypto::RsaKeyPair> rsa_;
};

struct RoleAssignment {
  const ActorIdentity* actor = nullptr;
  ledger::Role role{};
  std::string authority_id;  // Authority role only
};

/// Registers every participant, deploys the contracts with `certifiers` and
/// applies `assignments`. Only `signers` (default: all certifiers) sign the
/// governance transactions, so a sub-majority surfaces as MajorityMissing.
void run_system_boot(Environment& env, const std::vector<const ActorIdentity*>& certifiers,
                     const std::vector<RoleAssignment>& assignments,
                     std::optional<std::vector<const ActorIdentity*>> signers = std::nullopt);

/// Posts the actor's RSA public key on the ledger.
void publish_rsa_key(Environment& env, const ActorIdentity& actor);

/// Attribute names certified for `gid` across every attribute file on the
/// ledger. Unknown GIDs yield an empty set.
std::set<std::string> certified_attributes(const Environment& env, const std::string& gid);

/// Stores the attribute file and records its RLOC, signed by `signers`.
ledger::Rloc certify_attributes(Environment& env, const std::vector<const ActorIdentity*>& signers,
                                const std::map<Address, std::set<std::string>>& assignments);

struct Challenge {
  std::array<std::uint8_t, 32> nonce{};
  std::string issued_to;
  std::string authority_id;
  std::uint64_t expiry = 0;
};

/// Bytes the reader signs to answer `challenge`.
Bytes challenge_message(const Challenge& challenge);

inline constexpr std::uint64_t kChallengeLifetime = 8;

struct AuthorityFaults {
  bool dishonest_opening = false;
  bool withhold_shares = false;
  bool divergent_metadata = false;
};

class AuthorityNode {
 public:
  AuthorityNode(ActorIdentity& identity, std::string authority_id);

  const std::string& authority_id() const { return authority_id_; }
  ActorIdentity& identity() { return identity_; }
  const ActorIdentity& identity() const { return identity_; }
  AuthorityFaults& faults() { return faults_; }

  // Initialisation steps in protocol order.
  ledger::Rloc store_metadata(Environment& env, const maabe::Universes& universes);
  ledger::Receipt commit(Environment& env);
  ledger::Receipt open(Environment& env);
  /// Verifies every posted opening, combines them and runs global setup and
  /// key generation. Throws InitAborted naming the first culprit.
  const maabe::GlobalParams& derive_params(const Environment& env, const maabe::Universes& universes);
  void publish(Environment& env, const ledger::Rloc& metadata_rloc);
  /// Rebuilds pp and the key pair of an already published authority from
  /// the store and this node's deterministic key stream.
  void restore(const Environment& env);

  bool initialized() const { return keys_.has_value(); }
  const maabe::GlobalParams& params() const;
  const maabe::AuthorityPublicKey& public_key() const;

  // Scheme I: challenge-response over an in-process authenticated channel.
  Challenge issue_challenge(Environment& env, const std::string& gid);
  /// Consumes the challenge whatever the outcome. Throws Error(Unauthorized)
  /// for unknown, expired or misaddressed challenges, bad signatures and
  /// readers with no certified attributes.
  std::vector<DecryptionKeyShare> answer_challenge(Environment& env, const std::string& gid,
                                                   ByteView nonce, ByteView signature);

  // Scheme II: ledger-mediated requests.
  /// Answers every open request addressed to this authority; returns how
  /// many deliveries were posted.
  std::size_t serve_onchain_requests(Environment& env);

  /// One share per certified attribute of `gid`, each governed by this node.
  std::vector<DecryptionKeyShare> issue_shares(const Environment& env, const std::string& gid);

 private:
  group::G1 local_element() const;

  ActorIdentity& identity_;
  std::string authority_id_;
  AuthorityFaults faults_;
  std::optional<maabe::GlobalParams> pp_;
  std::optional<maabe::AuthorityKeyPair> keys_;
  std::map<std::string, Challenge> pending_;  // hex nonce -> challenge
};

/// Coin-toss abort; code() is CommitMismatch.
class InitAborted : public Error {
 public:
  InitAborted(Address culprit, const std::string& authority_id)
      : Error(ErrorCode::CommitMismatch,
              "authority init aborted: " + authority_id + " (" + culprit + ") opened a value that does not match its commitment"),
        culprit_(std::move(culprit)) {}
  const Address& culprit() const noexcept { return culprit_; }

 private:
  Address culprit_;
};

struct InitResult {
  maabe::GlobalParams pp;
  std::map<std::string, crypto::Digest> digests;  // authority id -> pp digest
};

/// Store metadata, commit, open, derive, publish for every node. The
/// universes' authority list is replaced by the ledger's registration order.
InitResult run_authority_init(Environment& env, const std::vector<AuthorityNode*>& nodes,
                              maabe::Universes universes = {});

/// Parameters and authority public keys as seen by an owner or reader.
struct PublicSetup {
  maabe::GlobalParams pp;
  std::map<std::string, maabe::AuthorityPublicKey> authority_keys;
};

/// Loads what the authorities published after checking that their metadata
/// and parameter RLOCs agree. Throws Error(PhaseError) before init completes
/// and Error(InconsistentAuthorities) on disagreement.
PublicSetup load_public_setup(const Environment& env);

enum class Scheme { Channel, Onchain };
std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

std::vector<DecryptionKeyShare> request_key_channel(Environment& env, const ActorIdentity& reader,
                                                    AuthorityNode& authority);

/// Posts the request, lets `authority` serve it, then decrypts the delivery.
std::vector<DecryptionKeyShare> request_key_onchain(Environment& env, const ActorIdentity& reader,
                                                    AuthorityNode& authority);

/// Decrypts every delivery from `authority_id` addressed to `reader`.
/// Throws Error(IntegrityFailure) when a payload does not decrypt.
std::vector<DecryptionKeyShare> collect_onchain_shares(const Environment& env,
                                                       const ActorIdentity& reader,
                                                       const std::string& authority_id);

struct KeyBundle {
  std::string gid;  // empty for an empty bundle
  std::vector<DecryptionKeyShare> shares;
};

/// Merges shares, dropping repeated literals. Throws Error(MixedGid).
KeyBundle assemble_fdk(const std::vector<DecryptionKeyShare>& shares);

/// Seals `plans` into one envelope, stores it and records it on the Message
/// Contract. Returns the message id.
std::string owner_publish(Environment& env, ActorIdentity& owner, const std::string& case_id,
                          const std::vector<envelope::SlicePlan>& plans);

struct SliceOutcome {
  std::string slice_id;
  std::string policy;
  std::optional<envelope::FieldMap> fields;
  std::optional<ErrorCode> error;
  std::string detail;
};

struct FetchResult {
  envelope::MessageMetadata metadata;
  std::vector<SliceOutcome> slices;
};

/// Throws Error(NotFound) for unknown ids and Error(IntegrityFailure) when
/// the stored envelope does not match its RLOC.
FetchResult reader_fetch(const Environment& env, const KeyBundle& bundle, const std::string& message_id);

}  // namespace martsia::actors

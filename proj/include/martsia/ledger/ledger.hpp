#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "martsia/crypto/ed25519.hpp"
#include "martsia/crypto/sha256.hpp"
#include "martsia/error.hpp"
#include "martsia/policy/policy.hpp"

namespace martsia::ledger {

using Json = nlohmann::json;
/// 40 lowercase hex characters: the first 20 bytes of SHA-256(public key).
using Address = std::string;
using Rloc = std::string;

Address address_of(ByteView signing_public_key);
bool is_address(std::string_view text);

enum class Role { Authority, DataOwner, Reader, AttributeCertifier };
std::string_view role_name(Role role);
/// Throws InvalidArgument for unknown names.
Role parse_role(std::string_view name);

/// ⌊n/2⌋ + 1.
inline std::size_t majority(std::size_t n) { return n / 2 + 1; }

struct Signature {
  crypto::Ed25519PublicKey public_key{};
  crypto::Ed25519Signature signature{};
  Address signer() const { return address_of(public_key); }
};

namespace contract {
inline constexpr std::string_view kSystem = "system";
inline constexpr std::string_view kAuthority = "authority";
inline constexpr std::string_view kCertifier = "attribute_certifier";
inline constexpr std::string_view kMessage = "message";
inline constexpr std::string_view kRsaKey = "rsa_public_key";
}  // namespace contract

struct Transaction {
  Address sender;
  std::string contract;
  std::string method;
  Json args = Json::object();
  std::uint64_t nonce = 0;
  std::vector<Signature> signatures;

  /// Bytes every signature covers.
  Bytes signing_payload() const;
  void sign_with(const crypto::SigningKey& key);

  Json to_json() const;
  static Transaction from_json(const Json& j);
};

/// Builds a transaction from `sender` signed by `sender` and every cosigner.
Transaction make_transaction(const crypto::SigningKey& sender, std::uint64_t nonce,
                             std::string_view contract, std::string_view method, Json args,
                             const std::vector<const crypto::SigningKey*>& cosigners = {});

enum class Phase { Boot, Init, Certify, KeyRequests, Publish };
inline constexpr Phase kPhases[] = {Phase::Boot, Phase::Init, Phase::Certify, Phase::KeyRequests,
                                    Phase::Publish};
std::string_view phase_name(Phase phase);
/// Phase a contract method belongs to for reporting.
Phase phase_of(std::string_view contract, std::string_view method);

struct Receipt {
  std::size_t index = 0;
  bool accepted = false;
  ErrorCode code{};
  std::string message;
  std::string contract, method;
  Address sender;
};

struct Account {
  Address address;
  crypto::Ed25519PublicKey public_key{};
  std::set<Role> roles;
};

struct AuthorityRecord {
  std::string authority_id;
  Address address;
  std::string commitment;  // hex digest
  std::string opening;     // hex element bytes
  std::string metadata_rloc, params_rloc, pubkey_rloc;
};

struct KeyRequestEntry {
  std::size_t id = 0;
  Address reader;
  std::string authority_id;
  bool answered = false;
};

struct KeyDelivery {
  std::size_t request_id = 0;
  Address reader;
  std::string authority_id;
  std::string payload;  // base64
};

/// Attribute universe and the reader/attribute relation, set once.
struct AttributeSetup {
  std::set<std::string> universe;
  std::map<Address, std::set<std::string>> assignments;
};

struct MessageRecord {
  Address owner;
  Rloc rloc;
  std::vector<std::string> policies;
};

struct LedgerState {
  bool deployed = false;
  std::vector<Address> certifiers;
  std::map<Address, Account> accounts;
  std::map<Address, std::uint64_t> nonces;
  std::vector<AuthorityRecord> authorities;  // registration order
  std::vector<Rloc> attr_rlocs;
  std::optional<AttributeSetup> attribute_setup;
  std::map<std::string, MessageRecord> messages;
  std::map<std::string, std::vector<Rloc>> dictionary;  // policy -> RLOCs
  std::map<Address, std::string> rsa_keys;               // base64 DER
  std::vector<KeyRequestEntry> key_requests;
  std::vector<KeyDelivery> key_deliveries;

  Json to_json() const;
};

struct CtxMatch {
  std::string policy;
  Rloc rloc;
  friend auto operator<=>(const CtxMatch&, const CtxMatch&) = default;
};

/// Single-writer in-process ledger with instant finality. Every submitted
/// transaction is logged with a receipt; rejected ones leave the state
/// untouched and do not consume the sender's nonce.
class Ledger {
 public:
  Receipt submit(const Transaction& tx);
  /// submit, then throw Error(receipt.code) when rejected.
  void submit_or_throw(const Transaction& tx);

  const LedgerState& state() const { return state_; }
  crypto::Digest state_hash() const;
  std::uint64_t next_nonce(const Address& address) const;

  const std::vector<Transaction>& log() const { return log_; }
  const std::vector<Receipt>& receipts() const { return receipts_; }

  std::string export_ndjson() const;
  /// Fresh ledger fed every logged transaction in order.
  static Ledger replay(std::string_view ndjson);

  /// Accepted transactions per phase.
  std::map<Phase, std::size_t> phase_counts() const;

  // Public reads.
  bool has_role(const Address& address, Role role) const;
  std::vector<std::string> authority_ids() const;
  const AuthorityRecord* authority_record(std::string_view authority_id) const;
  const AuthorityRecord* authority_by_address(const Address& address) const;
  std::optional<std::string> rsa_key(const Address& address) const;
  const std::vector<Rloc>& attr_rlocs() const { return state_.attr_rlocs; }
  std::optional<Rloc> message_rloc(std::string_view message_id) const;
  /// Authorities whose opening failed to match their commitment.
  std::set<Address> flagged_authorities() const;
  /// Dictionary entries whose policy `owned` satisfies.
  std::vector<CtxMatch> retrieve_ctx(const policy::LiteralSet& owned) const;
  std::vector<KeyDelivery> deliveries_for(const Address& reader) const;

 private:
  void apply(const Transaction& tx, LedgerState& next) const;

  LedgerState state_;
  std::vector<Transaction> log_;
  std::vector<Receipt> receipts_;
};

}  // namespace martsia::ledger

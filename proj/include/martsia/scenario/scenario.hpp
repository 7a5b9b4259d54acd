#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "martsia/actors/actors.hpp"

namespace martsia::scenario {

using ledger::Json;

struct ActorDecl {
  std::string label;
  std::vector<ledger::Role> roles;
  std::set<std::string> attributes;
};

struct AuthorityDecl {
  std::string label;
  std::string id;
};

struct SliceDecl {
  std::string name;
  std::string policy;
  envelope::FieldMap fields;
};

struct MessageDecl {
  std::string name;
  std::string sender;
  std::string case_id;
  std::vector<SliceDecl> slices;
};

struct Step {
  std::string op;
  Json args = Json::object();
  std::optional<ErrorCode> expect;
};

/// A declared roster plus an ordered script. Validation rejects steps that
/// reference undeclared actors, authorities or messages.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<std::string> certifiers;
  std::vector<AuthorityDecl> authorities;
  std::vector<ActorDecl> actors;
  std::vector<MessageDecl> messages;
  std::vector<Step> steps;

  /// Throws Error(Malformed) for schema violations and
  /// Error(InvalidArgument) for dangling references.
  static Scenario from_json(const Json& doc);
  static Scenario load(const std::filesystem::path& file);

  const ActorDecl* find_actor(std::string_view label) const;
  const MessageDecl* find_message(std::string_view name) const;
};

ErrorCode parse_error_code(std::string_view name);

/// Slice name -> labels of readers that opened it, keyed "message/slice".
using AccessMatrix = std::map<std::string, std::set<std::string>>;

/// Live actors for a scenario roster over a given ledger and store. Both the
/// runner and the stateful CLI commands drive the protocol through this.
class World {
 public:
  World(Scenario scenario, ledger::Ledger& ledger, datastore::ContentStore& store,
        std::optional<std::uint64_t> seed_override = std::nullopt);

  const Scenario& scenario() const { return scenario_; }
  std::uint64_t seed() const { return seed_; }
  actors::Environment& env() { return env_; }
  actors::ActorIdentity& actor(std::string_view label);
  actors::AuthorityNode& authority(std::string_view id);
  /// Actors holding the Reader role, in declaration order.
  std::vector<std::string> readers() const;

  void boot(const std::vector<std::string>& signers = {});
  actors::InitResult init();
  /// Publishes the RSA key of each listed actor (default: every reader and
  /// data owner) that has none on the ledger yet.
  void store_rsa_keys(const std::vector<std::string>& labels = {});
  ledger::Rloc certify(const std::vector<std::string>& signers = {});
  /// Requests shares from `authorities` (default: all) and adds them to the
  /// reader's wallet.
  std::vector<actors::DecryptionKeyShare> request_key(const std::string& reader, actors::Scheme scheme,
                                                      const std::vector<std::string>& authorities = {});
  std::string publish(const std::string& message);
  /// `message` is a declared name or a raw message id.
  actors::FetchResult fetch(const std::string& reader, const std::string& message);
  /// With a scheme, every reader first obtains a fresh bundle over it;
  /// without, current wallets are used.
  AccessMatrix access_matrix(std::optional<actors::Scheme> scheme = std::nullopt);

  /// A bundle obtained from every authority over `scheme`, bypassing the
  /// wallet. Readers without certified attributes get an empty bundle.
  actors::KeyBundle bundle_over(const std::string& reader, actors::Scheme scheme);
  const std::vector<actors::DecryptionKeyShare>& wallet(const std::string& reader);
  void clear_wallets() { wallets_.clear(); }
  std::string message_id(const std::string& message) const;
  std::string slice_name(const std::string& message, std::size_t index) const;
  const std::map<std::string, std::string>& message_ids() const { return message_ids_; }

  /// Wallets, message ids, clock and seed; what a CLI process must persist.
  Json session() const;
  void load_session(const Json& session);
  /// Restores every authority node that has already published.
  void restore_authorities();

 private:

  Scenario scenario_;
  std::uint64_t seed_;
  crypto::Rng root_;
  actors::Environment env_;
  std::vector<std::unique_ptr<actors::ActorIdentity>> identities_;
  std::map<std::string, actors::ActorIdentity*, std::less<>> by_label_;
  std::vector<std::unique_ptr<actors::AuthorityNode>> nodes_;
  std::map<std::string, std::vector<actors::DecryptionKeyShare>> wallets_;
  std::map<std::string, std::string> message_ids_;
  std::uint64_t epoch_ = 0;
};

struct RunResult {
  Json transcript;
  bool ok = true;
  /// 0, the unexpected error's code, or kExpectationFailed.
  int exit_code = 0;
};

/// Exit status when every step ran but one outcome differed from its expectation.
inline constexpr int kExpectationFailed = 2;

/// Executes the script against a fresh ledger and the given store.
RunResult run(const Scenario& scenario, datastore::ContentStore& store,
              std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace martsia::scenario

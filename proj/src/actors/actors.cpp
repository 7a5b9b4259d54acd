#include "martsia/actors/actors.hpp"

#include <algorithm>

#include "internal.hpp"
#include "martsia/crypto/sha256.hpp"

namespace martsia::actors {

namespace {

constexpr std::string_view kAttributeFileVersion = "martsia/attributes/1";

std::array<std::uint8_t, 32> signing_seed(const crypto::Rng& stream) {
  std::array<std::uint8_t, 32> seed{};
  stream.fork("signing").fill(seed);
  return seed;
}

std::vector<const crypto::SigningKey*> keys_of(const std::vector<const ActorIdentity*>& actors) {
  std::vector<const crypto::SigningKey*> out;
  for (const auto* a : actors) out.push_back(&a->signing_key());
  return out;
}

void throw_if_rejected(const ledger::Receipt& r) {
  if (!r.accepted) throw Error(r.code, r.contract + "." + r.method + ": " + r.message);
}

}  // namespace

ActorIdentity::ActorIdentity(std::string label, const crypto::Rng& root, bool with_rsa)
    : label_(std::move(label)),
      keys_(root.fork("actor/" + label_)),
      rng_(keys_.fork("runtime")),
      signing_(signing_seed(keys_)),
      address_(ledger::address_of(signing_.public_key())) {
  if (with_rsa) {
    crypto::Rng rsa_stream = keys_.fork("rsa");
    rsa_ = crypto::RsaKeyPair::generate(rsa_stream);
  }
}

const crypto::RsaKeyPair& ActorIdentity::rsa() const {
  if (!rsa_) throw Error(ErrorCode::PhaseError, label_ + " has no RSA key pair");
  return *rsa_;
}

ledger::Receipt ActorIdentity::submit(Environment& env, std::string_view contract,
                                      std::string_view method, Json args,
                                      const std::vector<const ActorIdentity*>& cosigners) const {
  return env.ledger.submit(ledger::make_transaction(signing_, env.ledger.next_nonce(address_), contract,
                                                    method, std::move(args), keys_of(cosigners)));
}

void ActorIdentity::submit_or_throw(Environment& env, std::string_view contract, std::string_view method,
                                    Json args, const std::vector<const ActorIdentity*>& cosigners) const {
  throw_if_rejected(submit(env, contract, method, std::move(args), cosigners));
}

void run_system_boot(Environment& env, const std::vector<const ActorIdentity*>& certifiers,
                     const std::vector<RoleAssignment>& assignments,
                     std::optional<std::vector<const ActorIdentity*>> signers) {
  if (certifiers.empty()) throw Error(ErrorCode::InvalidArgument, "boot needs at least one certifier");
  const std::vector<const ActorIdentity*> sign = signers.value_or(certifiers);
  if (sign.empty()) throw Error(ErrorCode::MajorityMissing, "no certifier signs the deployment");

  std::vector<const ActorIdentity*> participants = certifiers;
  for (const auto& a : assignments) participants.push_back(a.actor);
  std::set<Address> seen;
  for (const auto* p : participants) {
    if (!seen.insert(p->address()).second || env.ledger.state().accounts.contains(p->address())) continue;
    p->submit_or_throw(env, ledger::contract::kSystem, "register", Json::object());
  }

  const ActorIdentity& lead = *sign.front();
  const std::vector<const ActorIdentity*> cosigners(sign.begin() + 1, sign.end());
  Json listed = Json::array();
  for (const auto* c : certifiers) listed.push_back(c->address());
  lead.submit_or_throw(env, ledger::contract::kSystem, "deploy", {{"certifiers", listed}}, cosigners);

  for (const auto& a : assignments) {
    Json args = {{"target", a.actor->address()}, {"role", ledger::role_name(a.role)}};
    if (a.role == ledger::Role::Authority) args["authority_id"] = a.authority_id;
    lead.submit_or_throw(env, ledger::contract::kSystem, "assign_role", std::move(args), cosigners);
  }
}

void publish_rsa_key(Environment& env, const ActorIdentity& actor) {
  actor.submit_or_throw(env, ledger::contract::kRsaKey, "store",
                        {{"public_key", base64_encode(actor.rsa().public_key().to_der())}});
}

std::set<std::string> certified_attributes(const Environment& env, const std::string& gid) {
  std::set<std::string> out;
  for (const auto& rloc : env.ledger.attr_rlocs()) {
    const Bytes file = env.store.get(rloc);
    const Json doc = Json::parse(file.begin(), file.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("version", "") != kAttributeFileVersion) {
      throw Error(ErrorCode::Malformed, "attribute file " + rloc + " is not readable");
    }
    const auto it = doc["assignments"].find(gid);
    if (it == doc["assignments"].end()) continue;
    for (const auto& a : *it) out.insert(a.get<std::string>());
  }
  return out;
}

ledger::Rloc certify_attributes(Environment& env, const std::vector<const ActorIdentity*>& signers,
                                const std::map<Address, std::set<std::string>>& assignments) {
  if (signers.empty()) throw Error(ErrorCode::MajorityMissing, "no certifier signs the attribute file");
  Json table = Json::object();
  for (const auto& [gid, attrs] : assignments) {
    for (const auto& a : attrs) {
      if (a.empty() || a.find('@') != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "invalid attribute name '" + a + "'");
      }
    }
    table[gid] = attrs;
  }
  const Json doc = {{"version", kAttributeFileVersion}, {"assignments", table}};
  const ledger::Rloc rloc = env.store.put(as_bytes(doc.dump()));
  const std::vector<const ActorIdentity*> cosigners(signers.begin() + 1, signers.end());
  signers.front()->submit_or_throw(env, ledger::contract::kCertifier, "store_attr_rloc", {{"rloc", rloc}},
                                   cosigners);
  return rloc;
}

PublicSetup load_public_setup(const Environment& env) {
  const auto& records = env.ledger.state().authorities;
  if (records.empty()) throw Error(ErrorCode::PhaseError, "no authorities are registered");
  for (const auto& r : records) {
    if (r.pubkey_rloc.empty()) {
      throw Error(ErrorCode::PhaseError, "authority init incomplete: " + r.authority_id + " has not published");
    }
  }
  for (const auto& r : records) {
    if (r.metadata_rloc != records.front().metadata_rloc || r.params_rloc != records.front().params_rloc) {
      throw Error(ErrorCode::InconsistentAuthorities,
                  "authority set inconsistent: " + r.authority_id + " published different metadata or parameters");
    }
  }

  PublicSetup out{maabe::GlobalParams::deserialize(env.store.get(records.front().params_rloc)), {}};
  const Bytes meta_bytes = env.store.get(records.front().metadata_rloc);
  const Json meta = Json::parse(meta_bytes.begin(), meta_bytes.end(), nullptr, false);
  if (meta.is_discarded() || meta != detail::metadata_document(env.ledger.authority_ids(), out.pp.universes)) {
    throw Error(ErrorCode::InconsistentAuthorities, "authority metadata does not describe the published parameters");
  }
  for (const auto& r : records) {
    auto pk = maabe::AuthorityPublicKey::deserialize(env.store.get(r.pubkey_rloc));
    if (pk.authority != r.authority_id) {
      throw Error(ErrorCode::InconsistentAuthorities, "public key of " + r.authority_id + " names " + pk.authority);
    }
    out.authority_keys.emplace(r.authority_id, std::move(pk));
  }
  return out;
}

std::string_view scheme_name(Scheme scheme) { return scheme == Scheme::Channel ? "channel" : "onchain"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "channel") return Scheme::Channel;
  if (name == "onchain") return Scheme::Onchain;
  throw Error(ErrorCode::InvalidArgument, "unknown key request scheme '" + std::string(name) + "'");
}

KeyBundle assemble_fdk(const std::vector<DecryptionKeyShare>& shares) {
  KeyBundle out;
  std::set<policy::AttributeLiteral> literals;
  for (const auto& s : shares) {
    if (out.shares.empty() && out.gid.empty()) out.gid = s.gid;
    if (s.gid != out.gid) throw Error(ErrorCode::MixedGid, "shares belong to more than one GID");
    if (literals.insert(s.literal).second) out.shares.push_back(s);
  }
  return out;
}

std::string owner_publish(Environment& env, ActorIdentity& owner, const std::string& case_id,
                          const std::vector<envelope::SlicePlan>& plans) {
  if (!env.ledger.has_role(owner.address(), ledger::Role::DataOwner)) {
    throw Error(ErrorCode::RoleDenied, owner.label() + " does not hold the DataOwner role");
  }
  const PublicSetup setup = load_public_setup(env);
  envelope::MessageMetadata metadata{owner.address(), case_id, {}};
  do {
    metadata.message_id = envelope::random_decimal_id(owner.rng());
  } while (env.ledger.message_rloc(metadata.message_id));

  const envelope::MessageEnvelope sealed =
      envelope::seal_message({setup.pp, setup.authority_keys}, metadata, plans, owner.rng());
  const ledger::Rloc rloc = env.store.put(sealed.canonical_bytes());
  Json policies = Json::array();
  for (const auto& p : plans) policies.push_back(p.policy_text);
  owner.submit_or_throw(env, ledger::contract::kMessage, "store",
                        {{"message_id", metadata.message_id}, {"rloc", rloc}, {"policies", policies}});
  return metadata.message_id;
}

FetchResult reader_fetch(const Environment& env, const KeyBundle& bundle, const std::string& message_id) {
  const auto rloc = env.ledger.message_rloc(message_id);
  if (!rloc) throw Error(ErrorCode::NotFound, "no message " + message_id);
  const Bytes stored = env.store.get(*rloc);
  const auto sealed = envelope::MessageEnvelope::from_json(to_string(stored));
  if (sealed.metadata.message_id != message_id) {
    throw Error(ErrorCode::IntegrityFailure, "stored envelope carries a different message id");
  }
  const PublicSetup setup = load_public_setup(env);

  FetchResult out{sealed.metadata, {}};
  for (const auto& slice : sealed.slices) {
    SliceOutcome o{slice.header.slice_id, slice.header.policy_text, std::nullopt, std::nullopt, {}};
    try {
      o.fields = envelope::open_slice(setup.pp, sealed.metadata, slice, bundle.shares);
    } catch (const Error& e) {
      o.error = e.code();
      o.detail = e.what();
    }
    out.slices.push_back(std::move(o));
  }
  return out;
}

Json detail::metadata_document(const std::vector<std::string>& authorities, const maabe::Universes& u) {
  return {{"version", envelope::kFormatVersion},
          {"authorities", authorities},
          {"attributes", u.attributes},
          {"gid_format", u.gid_format}};
}

}  // namespace martsia::actors

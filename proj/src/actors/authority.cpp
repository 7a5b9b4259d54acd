#include <algorithm>

#include "internal.hpp"
#include "martsia/crypto/sha256.hpp"

namespace martsia::actors {

namespace {

constexpr std::string_view kSeedDomain = "martsia/coin-toss/1";

Bytes encode_shares(const std::vector<DecryptionKeyShare>& shares) {
  Bytes out;
  append_u32(out, static_cast<std::uint32_t>(shares.size()));
  for (const auto& s : shares) append_framed(out, s.serialize());
  return out;
}

std::vector<DecryptionKeyShare> decode_shares(ByteView in) {
  ByteReader r(in);
  const std::uint32_t n = r.u32();
  std::vector<DecryptionKeyShare> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(DecryptionKeyShare::deserialize(r.framed()));
  r.expect_end();
  return out;
}

std::vector<DecryptionKeyShare> open_delivery(const ActorIdentity& reader, const std::string& authority_id,
                                              const std::string& payload) {
  std::vector<DecryptionKeyShare> shares;
  try {
    shares = decode_shares(crypto::hybrid_decrypt(reader.rsa(), base64_decode(payload)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IntegrityFailure) throw;
    throw Error(ErrorCode::IntegrityFailure, std::string("key delivery unreadable: ") + e.what());
  }
  for (const auto& s : shares) {
    if (s.gid != reader.gid() || s.literal.authority != authority_id) {
      throw Error(ErrorCode::IntegrityFailure, "delivered share was not issued to this reader by " + authority_id);
    }
  }
  return shares;
}

}  // namespace

Bytes challenge_message(const Challenge& challenge) {
  Bytes out;
  append_framed(out, as_bytes("martsia/challenge/1"));
  append_framed(out, as_bytes(challenge.authority_id));
  append_framed(out, as_bytes(challenge.issued_to));
  append_framed(out, challenge.nonce);
  return out;
}

AuthorityNode::AuthorityNode(ActorIdentity& identity, std::string authority_id)
    : identity_(identity), authority_id_(std::move(authority_id)) {}

group::G1 AuthorityNode::local_element() const {
  crypto::Rng stream = identity_.keys().fork(faults_.dishonest_opening ? "dishonest-opening" : "opening");
  return group::random_g1(stream);
}

ledger::Rloc AuthorityNode::store_metadata(Environment& env, const maabe::Universes& universes) {
  Json doc = detail::metadata_document(universes.authorities, universes);
  if (faults_.divergent_metadata) doc["issuer"] = authority_id_;
  return env.store.put(as_bytes(doc.dump()));
}

ledger::Receipt AuthorityNode::commit(Environment& env) {
  crypto::Rng stream = identity_.keys().fork("opening");
  const auto committed = group::serialize(group::random_g1(stream));
  return identity_.submit(env, ledger::contract::kAuthority, "commit",
                          {{"digest", crypto::sha256_hex(committed)}});
}

ledger::Receipt AuthorityNode::open(Environment& env) {
  return identity_.submit(env, ledger::contract::kAuthority, "open",
                          {{"element", to_hex(group::serialize(local_element()))}});
}

const maabe::GlobalParams& AuthorityNode::derive_params(const Environment& env,
                                                        const maabe::Universes& universes) {
  Bytes combined(group::kG1Bytes, 0);
  for (const auto& r : env.ledger.state().authorities) {
    const Bytes opening = from_hex(r.opening);
    if (r.opening.empty() || crypto::sha256_hex(opening) != r.commitment || opening.size() != combined.size()) {
      throw InitAborted(r.address, r.authority_id);
    }
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i] ^= opening[i];
  }
  maabe::Universes u = universes;
  u.authorities = env.ledger.authority_ids();
  pp_ = maabe::global_setup(group::hash_to_g1(combined, kSeedDomain), std::move(u));
  crypto::Rng key_stream = identity_.keys().fork("authority-keys");
  keys_ = maabe::auth_setup(*pp_, authority_id_, key_stream);
  return *pp_;
}

void AuthorityNode::publish(Environment& env, const ledger::Rloc& metadata_rloc) {
  const ledger::Rloc params_rloc = env.store.put(params().serialize());
  const ledger::Rloc pubkey = env.store.put(public_key().serialize());
  identity_.submit_or_throw(env, ledger::contract::kAuthority, "publish",
                            {{"metadata_rloc", metadata_rloc}, {"params_rloc", params_rloc}, {"pubkey_rloc", pubkey}});
}

void AuthorityNode::restore(const Environment& env) {
  const ledger::AuthorityRecord* record = env.ledger.authority_record(authority_id_);
  if (record == nullptr || record->address != identity_.address()) {
    throw Error(ErrorCode::NotFound, identity_.label() + " is not authority " + authority_id_);
  }
  if (record->pubkey_rloc.empty()) throw Error(ErrorCode::PhaseError, authority_id_ + " has not published");
  pp_ = maabe::GlobalParams::deserialize(env.store.get(record->params_rloc));
  crypto::Rng key_stream = identity_.keys().fork("authority-keys");
  keys_ = maabe::auth_setup(*pp_, authority_id_, key_stream);
  if (!(keys_->public_key == maabe::AuthorityPublicKey::deserialize(env.store.get(record->pubkey_rloc)))) {
    keys_.reset();
    throw Error(ErrorCode::IntegrityFailure, "published key of " + authority_id_ + " does not match this node");
  }
}

const maabe::GlobalParams& AuthorityNode::params() const {
  if (!pp_) throw Error(ErrorCode::PhaseError, authority_id_ + " has not completed init");
  return *pp_;
}

const maabe::AuthorityPublicKey& AuthorityNode::public_key() const {
  if (!keys_) throw Error(ErrorCode::PhaseError, authority_id_ + " has not completed init");
  return keys_->public_key;
}

std::vector<DecryptionKeyShare> AuthorityNode::issue_shares(const Environment& env, const std::string& gid) {
  if (!keys_) throw Error(ErrorCode::PhaseError, authority_id_ + " has not completed init");
  std::vector<DecryptionKeyShare> out;
  for (const auto& attribute : certified_attributes(env, gid)) {
    const policy::AttributeLiteral literal{attribute, authority_id_};
    if (!pp_->universes.attributes.empty() && !pp_->universes.attributes.contains(attribute)) continue;
    out.push_back(maabe::keygen(*pp_, gid, keys_->secret_key, literal, identity_.rng()));
  }
  return out;
}

Challenge AuthorityNode::issue_challenge(Environment& env, const std::string& gid) {
  if (!keys_) throw Error(ErrorCode::PhaseError, authority_id_ + " has not completed init");
  Challenge c;
  identity_.rng().fill(c.nonce);
  c.issued_to = gid;
  c.authority_id = authority_id_;
  c.expiry = env.clock + kChallengeLifetime;
  pending_[to_hex(c.nonce)] = c;
  return c;
}

std::vector<DecryptionKeyShare> AuthorityNode::answer_challenge(Environment& env, const std::string& gid,
                                                                ByteView nonce, ByteView signature) {
  const auto it = pending_.find(to_hex(nonce));
  if (it == pending_.end()) throw Error(ErrorCode::Unauthorized, "unknown or already used challenge");
  const Challenge challenge = it->second;
  pending_.erase(it);
  if (challenge.issued_to != gid) throw Error(ErrorCode::Unauthorized, "challenge was issued to another GID");
  if (env.clock > challenge.expiry) throw Error(ErrorCode::Unauthorized, "challenge expired");
  if (!env.ledger.has_role(gid, ledger::Role::Reader)) {
    throw Error(ErrorCode::RoleDenied, gid + " does not hold the Reader role");
  }
  const auto rsa = env.ledger.rsa_key(gid);
  if (!rsa) throw Error(ErrorCode::Unauthorized, "no RSA key on the ledger for " + gid);
  const auto key = crypto::RsaPublicKey::from_der(base64_decode(*rsa));
  if (!key.pss_verify(challenge_message(challenge), signature)) {
    throw Error(ErrorCode::Unauthorized, "challenge signature does not verify");
  }
  if (faults_.withhold_shares) return {};
  auto shares = issue_shares(env, gid);
  if (shares.empty()) throw Error(ErrorCode::Unauthorized, "no certified attributes for " + gid);
  return shares;
}

std::size_t AuthorityNode::serve_onchain_requests(Environment& env) {
  if (faults_.withhold_shares) return 0;
  std::vector<ledger::KeyRequestEntry> open_requests;
  for (const auto& req : env.ledger.state().key_requests) {
    if (req.authority_id == authority_id_ && !req.answered) open_requests.push_back(req);
  }
  for (const auto& req : open_requests) {
    const auto rsa = env.ledger.rsa_key(req.reader);
    if (!rsa) throw Error(ErrorCode::NotFound, "no RSA key on the ledger for " + req.reader);
    const auto key = crypto::RsaPublicKey::from_der(base64_decode(*rsa));
    const Bytes payload = crypto::hybrid_encrypt(key, encode_shares(issue_shares(env, req.reader)),
                                                 identity_.rng());
    identity_.submit_or_throw(env, ledger::contract::kAuthority, "deliver_key",
                              {{"request_id", static_cast<std::uint64_t>(req.id)},
                               {"payload", base64_encode(payload)}});
  }
  return open_requests.size();
}

InitResult run_authority_init(Environment& env, const std::vector<AuthorityNode*>& nodes,
                              maabe::Universes universes) {
  universes.authorities = env.ledger.authority_ids();
  if (nodes.size() != universes.authorities.size()) {
    throw Error(ErrorCode::InvalidArgument, "every registered authority must take part in init");
  }
  for (const auto* n : nodes) {
    const auto* record = env.ledger.authority_record(n->authority_id());
    if (record == nullptr || record->address != n->identity().address()) {
      throw Error(ErrorCode::NotFound, n->identity().label() + " is not registered as authority " + n->authority_id());
    }
  }

  std::vector<ledger::Rloc> metadata;
  for (auto* n : nodes) metadata.push_back(n->store_metadata(env, universes));
  for (auto* n : nodes) {
    const auto r = n->commit(env);
    if (!r.accepted) throw Error(r.code, r.message);
  }
  const AuthorityNode* culprit = nullptr;
  for (auto* n : nodes) {
    const auto r = n->open(env);
    if (r.accepted) continue;
    if (r.code != ErrorCode::CommitMismatch) throw Error(r.code, r.message);
    if (culprit == nullptr) culprit = n;
  }
  if (culprit != nullptr) throw InitAborted(culprit->identity().address(), culprit->authority_id());

  InitResult out{};
  for (auto* n : nodes) out.digests[n->authority_id()] = n->derive_params(env, universes).digest();
  for (const auto& [id, d] : out.digests) {
    if (d != out.digests.begin()->second) {
      throw Error(ErrorCode::InconsistentAuthorities, "authority " + id + " derived different parameters");
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i]->publish(env, metadata[i]);
  out.pp = nodes.front()->params();
  return out;
}

std::vector<DecryptionKeyShare> request_key_channel(Environment& env, const ActorIdentity& reader,
                                                    AuthorityNode& authority) {
  ++env.clock;
  const Challenge c = authority.issue_challenge(env, reader.gid());
  const Bytes signature = reader.rsa().pss_sign(challenge_message(c));
  return authority.answer_challenge(env, reader.gid(), c.nonce, signature);
}

std::vector<DecryptionKeyShare> request_key_onchain(Environment& env, const ActorIdentity& reader,
                                                    AuthorityNode& authority) {
  const std::size_t request_id = env.ledger.state().key_requests.size();
  reader.submit_or_throw(env, ledger::contract::kAuthority, "request_key",
                         {{"authority_id", authority.authority_id()}});
  authority.serve_onchain_requests(env);
  for (const auto& d : env.ledger.deliveries_for(reader.address())) {
    if (d.request_id == request_id) return open_delivery(reader, authority.authority_id(), d.payload);
  }
  return {};
}

std::vector<DecryptionKeyShare> collect_onchain_shares(const Environment& env, const ActorIdentity& reader,
                                                       const std::string& authority_id) {
  std::vector<DecryptionKeyShare> out;
  for (const auto& d : env.ledger.deliveries_for(reader.address())) {
    if (d.authority_id != authority_id) continue;
    auto shares = open_delivery(reader, authority_id, d.payload);
    out.insert(out.end(), shares.begin(), shares.end());
  }
  return out;
}

}  // namespace martsia::actors

#include "martsia/ledger/ledger.hpp"

#include <algorithm>
#include <sstream>

namespace martsia::ledger {
namespace {

[[noreturn]] void reject(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool is_lower_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

bool is_decimal(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_rloc(std::string_view s) { return s.size() == 64 && is_lower_hex(s); }

std::string arg_string(const Json& args, const char* key) {
  const auto it = args.find(key);
  if (it == args.end() || !it->is_string()) {
    reject(ErrorCode::Malformed, std::string("missing string argument '") + key + "'");
  }
  return it->get<std::string>();
}

std::vector<std::string> arg_strings(const Json& args, const char* key) {
  const auto it = args.find(key);
  if (it == args.end() || !it->is_array()) {
    reject(ErrorCode::Malformed, std::string("missing list argument '") + key + "'");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) reject(ErrorCode::Malformed, std::string("non-string in '") + key + "'");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Rloc arg_rloc(const Json& args, const char* key) {
  std::string r = arg_string(args, key);
  if (!is_rloc(r)) reject(ErrorCode::Malformed, std::string("'") + key + "' is not an RLOC");
  return r;
}

Address arg_address(const Json& args, const char* key) {
  std::string a = arg_string(args, key);
  if (!is_address(a)) reject(ErrorCode::Malformed, std::string("'") + key + "' is not an address");
  return a;
}

std::set<Address> signers_of(const Transaction& tx) {
  std::set<Address> out;
  for (const auto& s : tx.signatures) out.insert(s.signer());
  return out;
}

bool holds(const LedgerState& s, const Address& a, Role r) {
  const auto it = s.accounts.find(a);
  return it != s.accounts.end() && it->second.roles.contains(r);
}

void require_role(const LedgerState& s, const Address& a, Role r) {
  if (!holds(s, a, r)) {
    reject(ErrorCode::RoleDenied, a + " does not hold the " + std::string(role_name(r)) + " role");
  }
}

void require_deployed(const LedgerState& s) {
  if (!s.deployed) reject(ErrorCode::PhaseError, "contracts are not deployed");
}

void require_majority(const LedgerState& s, const Transaction& tx) {
  require_deployed(s);
  if (std::find(s.certifiers.begin(), s.certifiers.end(), tx.sender) == s.certifiers.end()) {
    reject(ErrorCode::RoleDenied, "governance transactions must come from a certifier");
  }
  const auto signers = signers_of(tx);
  const auto count = std::count_if(s.certifiers.begin(), s.certifiers.end(),
                                   [&](const Address& c) { return signers.contains(c); });
  const std::size_t need = majority(s.certifiers.size());
  if (static_cast<std::size_t>(count) < need) {
    reject(ErrorCode::MajorityMissing, std::to_string(count) + " of " +
                                           std::to_string(s.certifiers.size()) +
                                           " certifier signatures, " + std::to_string(need) +
                                           " required");
  }
}

AuthorityRecord& authority_of(LedgerState& s, const Address& a) {
  for (auto& r : s.authorities) {
    if (r.address == a) return r;
  }
  reject(ErrorCode::NotFound, a + " is not a registered authority");
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void apply_system(const Transaction& tx, LedgerState& s) {
  const Json& args = tx.args;
  if (tx.method == "register") {
    if (tx.signatures.size() != 1) reject(ErrorCode::Malformed, "registration is self-signed");
    if (s.accounts.contains(tx.sender)) reject(ErrorCode::Conflict, tx.sender + " already registered");
    s.accounts[tx.sender] = {tx.sender, tx.signatures.front().public_key, {}};
    return;
  }
  if (tx.method == "deploy") {
    if (s.deployed) reject(ErrorCode::Conflict, "contracts already deployed");
    const auto certifiers = arg_strings(args, "certifiers");
    if (certifiers.empty()) reject(ErrorCode::InvalidArgument, "no certifiers listed");
    std::set<Address> distinct;
    for (const auto& c : certifiers) {
      if (!is_address(c) || !distinct.insert(c).second) {
        reject(ErrorCode::InvalidArgument, "certifier list must hold distinct addresses");
      }
      if (!s.accounts.contains(c)) reject(ErrorCode::NotFound, "unknown account " + c);
    }
    s.certifiers = certifiers;
    s.deployed = true;
    require_majority(s, tx);
    for (const auto& c : certifiers) s.accounts[c].roles.insert(Role::AttributeCertifier);
    return;
  }
  if (tx.method == "assign_role" || tx.method == "revoke_role") {
    require_majority(s, tx);
    const Address target = arg_address(args, "target");
    const Role role = parse_role(arg_string(args, "role"));
    auto it = s.accounts.find(target);
    if (it == s.accounts.end()) reject(ErrorCode::NotFound, "unknown account " + target);
    if (role == Role::AttributeCertifier) {
      reject(ErrorCode::InvalidArgument, "the certifier set is fixed at deployment");
    }
    if (tx.method == "revoke_role") {
      if (it->second.roles.erase(role) == 0) {
        reject(ErrorCode::InvalidArgument, target + " does not hold that role");
      }
      return;
    }
    if (it->second.roles.contains(role)) reject(ErrorCode::Conflict, target + " already holds that role");
    if (role == Role::Authority) {
      const std::string id = arg_string(args, "authority_id");
      if (!valid_name(id)) reject(ErrorCode::InvalidArgument, "invalid authority id '" + id + "'");
      bool found = false;
      for (const auto& r : s.authorities) {
        if (r.authority_id == id && r.address != target) {
          reject(ErrorCode::Conflict, "authority id '" + id + "' is taken");
        }
        if (r.address == target) {
          if (r.authority_id != id) reject(ErrorCode::Conflict, target + " is authority " + r.authority_id);
          found = true;
        }
      }
      if (!found) s.authorities.push_back({id, target, {}, {}, {}, {}, {}});
    }
    it->second.roles.insert(role);
    return;
  }
  reject(ErrorCode::InvalidArgument, "unknown method system." + tx.method);
}

void apply_authority(const Transaction& tx, LedgerState& s) {
  require_deployed(s);
  const Json& args = tx.args;
  if (tx.method == "request_key") {
    require_role(s, tx.sender, Role::Reader);
    const std::string id = arg_string(args, "authority_id");
    if (std::none_of(s.authorities.begin(), s.authorities.end(),
                     [&](const AuthorityRecord& r) { return r.authority_id == id; })) {
      reject(ErrorCode::NotFound, "no authority '" + id + "'");
    }
    if (!s.rsa_keys.contains(tx.sender)) {
      reject(ErrorCode::PhaseError, "reader has no RSA public key on the ledger");
    }
    s.key_requests.push_back({s.key_requests.size(), tx.sender, id, false});
    return;
  }

  require_role(s, tx.sender, Role::Authority);
  AuthorityRecord& me = authority_of(s, tx.sender);
  if (tx.method == "commit") {
    const std::string digest = arg_string(args, "digest");
    if (digest.size() != 64 || !is_lower_hex(digest)) reject(ErrorCode::Malformed, "bad digest");
    if (!me.commitment.empty()) reject(ErrorCode::Conflict, "commitment already posted");
    me.commitment = digest;
    return;
  }
  if (tx.method == "open") {
    const std::string element = arg_string(args, "element");
    if (element.empty() || element.size() % 2 != 0 || !is_lower_hex(element)) {
      reject(ErrorCode::Malformed, "opening must be lowercase hex");
    }
    if (me.commitment.empty()) reject(ErrorCode::PhaseError, "no commitment to open");
    if (!me.opening.empty()) reject(ErrorCode::Conflict, "opening already posted");
    for (const auto& r : s.authorities) {
      if (holds(s, r.address, Role::Authority) && r.commitment.empty()) {
        reject(ErrorCode::PhaseError, "commit phase incomplete: " + r.authority_id + " has not committed");
      }
    }
    if (crypto::sha256_hex(from_hex(element)) != me.commitment) {
      reject(ErrorCode::CommitMismatch, "opening of " + me.authority_id + " does not match its commitment");
    }
    me.opening = element;
    return;
  }
  if (tx.method == "publish") {
    if (me.opening.empty()) reject(ErrorCode::PhaseError, "publish requires a verified opening");
    if (!me.pubkey_rloc.empty()) reject(ErrorCode::Conflict, "already published");
    me.metadata_rloc = arg_rloc(args, "metadata_rloc");
    me.params_rloc = arg_rloc(args, "params_rloc");
    me.pubkey_rloc = arg_rloc(args, "pubkey_rloc");
    return;
  }
  if (tx.method == "deliver_key") {
    const auto& idj = args.find("request_id");
    if (idj == args.end() || !idj->is_number_unsigned()) {
      reject(ErrorCode::Malformed, "missing request_id");
    }
    const std::size_t id = idj->get<std::size_t>();
    if (id >= s.key_requests.size()) reject(ErrorCode::NotFound, "no such key request");
    KeyRequestEntry& req = s.key_requests[id];
    if (req.authority_id != me.authority_id) {
      reject(ErrorCode::RoleDenied, "request was addressed to another authority");
    }
    if (req.answered) reject(ErrorCode::Conflict, "request already answered");
    const std::string payload = arg_string(args, "payload");
    if (payload.empty()) reject(ErrorCode::Malformed, "empty payload");
    base64_decode(payload);
    req.answered = true;
    s.key_deliveries.push_back({id, req.reader, me.authority_id, payload});
    return;
  }
  reject(ErrorCode::InvalidArgument, "unknown method authority." + tx.method);
}

void apply_certifier(const Transaction& tx, LedgerState& s) {
  require_majority(s, tx);
  if (tx.method == "store_attr_rloc") {
    s.attr_rlocs.push_back(arg_rloc(tx.args, "rloc"));
    return;
  }
  if (tx.method == "set_attr") {
    if (s.attribute_setup) return;  // set-once: later calls leave U and V as they are
    AttributeSetup setup;
    for (auto& a : arg_strings(tx.args, "universe")) setup.universe.insert(std::move(a));
    const auto it = tx.args.find("assignments");
    if (it == tx.args.end() || !it->is_object()) reject(ErrorCode::Malformed, "missing assignments");
    for (const auto& [addr, attrs] : it->items()) {
      if (!is_address(addr) || !attrs.is_array()) reject(ErrorCode::Malformed, "bad assignment");
      auto& set = setup.assignments[addr];
      for (const auto& a : attrs) {
        if (!a.is_string() || !setup.universe.contains(a.get<std::string>())) {
          reject(ErrorCode::InvalidArgument, "assigned attribute outside the universe");
        }
        set.insert(a.get<std::string>());
      }
    }
    s.attribute_setup = std::move(setup);
    return;
  }
  reject(ErrorCode::InvalidArgument, "unknown method attribute_certifier." + tx.method);
}

void apply_message(const Transaction& tx, LedgerState& s) {
  require_deployed(s);
  if (tx.method != "store") reject(ErrorCode::InvalidArgument, "unknown method message." + tx.method);
  require_role(s, tx.sender, Role::DataOwner);
  const std::string id = arg_string(tx.args, "message_id");
  if (!is_decimal(id)) reject(ErrorCode::Malformed, "message id must be decimal");
  const Rloc rloc = arg_rloc(tx.args, "rloc");
  std::vector<std::string> policies = arg_strings(tx.args, "policies");
  if (policies.empty()) reject(ErrorCode::InvalidArgument, "a message needs at least one policy");
  if (s.messages.contains(id)) reject(ErrorCode::Conflict, "message id " + id + " already stored");
  for (auto& p : policies) {
    policy::parse(p);
    p = policy::normalize(p);
    auto& list = s.dictionary[p];
    if (std::find(list.begin(), list.end(), rloc) == list.end()) list.push_back(rloc);
  }
  s.messages[id] = {tx.sender, rloc, std::move(policies)};
}

void apply_rsa(const Transaction& tx, LedgerState& s) {
  require_deployed(s);
  if (tx.method != "store") reject(ErrorCode::InvalidArgument, "unknown method rsa_public_key." + tx.method);
  if (!holds(s, tx.sender, Role::Reader) && !holds(s, tx.sender, Role::DataOwner)) {
    reject(ErrorCode::RoleDenied, "only readers and data owners store RSA keys");
  }
  const std::string key = arg_string(tx.args, "public_key");
  if (base64_decode(key).empty()) reject(ErrorCode::Malformed, "empty RSA key");
  s.rsa_keys[tx.sender] = key;
}

}  // namespace

Address address_of(ByteView signing_public_key) {
  const crypto::Digest d = crypto::sha256(signing_public_key);
  return to_hex(ByteView(d.data(), 20));
}

bool is_address(std::string_view text) { return text.size() == 40 && is_lower_hex(text); }

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Authority: return "Authority";
    case Role::DataOwner: return "DataOwner";
    case Role::Reader: return "Reader";
    case Role::AttributeCertifier: return "AttributeCertifier";
  }
  return "?";
}

Role parse_role(std::string_view name) {
  for (Role r : {Role::Authority, Role::DataOwner, Role::Reader, Role::AttributeCertifier}) {
    if (role_name(r) == name) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown role '" + std::string(name) + "'");
}

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Boot: return "boot";
    case Phase::Init: return "init";
    case Phase::Certify: return "certify";
    case Phase::KeyRequests: return "key_requests";
    case Phase::Publish: return "publish";
  }
  return "?";
}

Phase phase_of(std::string_view contract_id, std::string_view method) {
  if (contract_id == contract::kSystem) return Phase::Boot;
  if (contract_id == contract::kCertifier) return Phase::Certify;
  if (contract_id == contract::kMessage) return Phase::Publish;
  if (contract_id == contract::kRsaKey) return Phase::KeyRequests;
  if (method == "request_key" || method == "deliver_key") return Phase::KeyRequests;
  return Phase::Init;
}

Bytes Transaction::signing_payload() const {
  Bytes out;
  append_framed(out, as_bytes("martsia/tx/1"));
  append_framed(out, as_bytes(sender));
  append_framed(out, as_bytes(contract));
  append_framed(out, as_bytes(method));
  append_framed(out, as_bytes(args.dump()));
  append_u64(out, nonce);
  return out;
}

void Transaction::sign_with(const crypto::SigningKey& key) {
  signatures.push_back({key.public_key(), key.sign(signing_payload())});
}

Json Transaction::to_json() const {
  Json sigs = Json::array();
  for (const auto& s : signatures) {
    sigs.push_back({{"public_key", to_hex(s.public_key)}, {"signature", to_hex(s.signature)}});
  }
  return {{"sender", sender}, {"contract", contract}, {"method", method},
          {"args", args},     {"nonce", nonce},       {"signatures", sigs}};
}

Transaction Transaction::from_json(const Json& j) {
  try {
    Transaction tx;
    tx.sender = j.at("sender").get<std::string>();
    tx.contract = j.at("contract").get<std::string>();
    tx.method = j.at("method").get<std::string>();
    tx.args = j.at("args");
    tx.nonce = j.at("nonce").get<std::uint64_t>();
    for (const auto& s : j.at("signatures")) {
      Signature sig;
      const Bytes pk = from_hex(s.at("public_key").get<std::string>());
      const Bytes sg = from_hex(s.at("signature").get<std::string>());
      if (pk.size() != sig.public_key.size() || sg.size() != sig.signature.size()) {
        throw Error(ErrorCode::Malformed, "bad signature encoding");
      }
      std::copy(pk.begin(), pk.end(), sig.public_key.begin());
      std::copy(sg.begin(), sg.end(), sig.signature.begin());
      tx.signatures.push_back(sig);
    }
    return tx;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, std::string("malformed transaction: ") + e.what());
  }
}

Transaction make_transaction(const crypto::SigningKey& sender, std::uint64_t nonce,
                             std::string_view contract_id, std::string_view method, Json args,
                             const std::vector<const crypto::SigningKey*>& cosigners) {
  Transaction tx;
  tx.sender = address_of(sender.public_key());
  tx.contract = contract_id;
  tx.method = method;
  tx.args = std::move(args);
  tx.nonce = nonce;
  tx.sign_with(sender);
  for (const auto* c : cosigners) {
    if (address_of(c->public_key()) != tx.sender) tx.sign_with(*c);
  }
  return tx;
}

Json LedgerState::to_json() const {
  Json accounts_j = Json::object();
  for (const auto& [addr, acct] : accounts) {
    Json roles = Json::array();
    for (Role r : acct.roles) roles.push_back(role_name(r));
    accounts_j[addr] = {{"public_key", to_hex(acct.public_key)}, {"roles", roles}};
  }
  Json auths = Json::array();
  for (const auto& r : authorities) {
    auths.push_back({{"authority_id", r.authority_id},
                     {"address", r.address},
                     {"commitment", r.commitment},
                     {"opening", r.opening},
                     {"metadata_rloc", r.metadata_rloc},
                     {"params_rloc", r.params_rloc},
                     {"pubkey_rloc", r.pubkey_rloc}});
  }
  Json setup = nullptr;
  if (attribute_setup) {
    Json assign = Json::object();
    for (const auto& [a, attrs] : attribute_setup->assignments) assign[a] = attrs;
    setup = {{"universe", attribute_setup->universe}, {"assignments", assign}};
  }
  Json msgs = Json::object();
  for (const auto& [id, m] : messages) {
    msgs[id] = {{"owner", m.owner}, {"rloc", m.rloc}, {"policies", m.policies}};
  }
  Json requests = Json::array();
  for (const auto& r : key_requests) {
    requests.push_back({{"id", r.id}, {"reader", r.reader}, {"authority_id", r.authority_id},
                        {"answered", r.answered}});
  }
  Json deliveries = Json::array();
  for (const auto& d : key_deliveries) {
    deliveries.push_back({{"request_id", d.request_id}, {"reader", d.reader},
                          {"authority_id", d.authority_id}, {"payload", d.payload}});
  }
  return {{"deployed", deployed},
          {"certifiers", certifiers},
          {"accounts", accounts_j},
          {"nonces", nonces},
          {"authority_contract", {{"authorities", auths}, {"key_requests", requests},
                                  {"key_deliveries", deliveries}}},
          {"attribute_certifier_contract", {{"attr_rlocs", attr_rlocs}, {"attribute_setup", setup}}},
          {"message_contract", {{"messages", msgs}, {"dictionary", dictionary}}},
          {"rsa_public_key_contract", rsa_keys}};
}

void Ledger::apply(const Transaction& tx, LedgerState& next) const {
  if (tx.signatures.empty()) reject(ErrorCode::Malformed, "unsigned transaction");
  const Bytes payload = tx.signing_payload();
  std::set<Address> seen;
  for (const auto& s : tx.signatures) {
    if (!seen.insert(s.signer()).second) reject(ErrorCode::Malformed, "duplicate signer");
    if (!crypto::verify(s.public_key, payload, s.signature)) {
      reject(ErrorCode::IntegrityFailure, "signature of " + s.signer() + " does not verify");
    }
  }
  if (!seen.contains(tx.sender)) reject(ErrorCode::Malformed, "sender did not sign");
  if (tx.method != "register" && !next.accounts.contains(tx.sender)) {
    reject(ErrorCode::NotFound, "unknown sender " + tx.sender);
  }
  if (tx.nonce != next_nonce(tx.sender)) {
    reject(ErrorCode::Conflict, "nonce " + std::to_string(tx.nonce) + " out of order");
  }
  if (!tx.args.is_object()) reject(ErrorCode::Malformed, "arguments must be an object");

  if (tx.contract == contract::kSystem) {
    apply_system(tx, next);
  } else if (tx.contract == contract::kAuthority) {
    apply_authority(tx, next);
  } else if (tx.contract == contract::kCertifier) {
    apply_certifier(tx, next);
  } else if (tx.contract == contract::kMessage) {
    apply_message(tx, next);
  } else if (tx.contract == contract::kRsaKey) {
    apply_rsa(tx, next);
  } else {
    reject(ErrorCode::InvalidArgument, "unknown contract " + tx.contract);
  }
  next.nonces[tx.sender] = tx.nonce + 1;
}

Receipt Ledger::submit(const Transaction& submitted) {
  // parsed and in-memory JSON differ in integer signedness; apply the parsed form
  Transaction tx = submitted;
  tx.args = Json::parse(submitted.args.dump());
  Receipt r;
  r.index = log_.size();
  r.contract = tx.contract;
  r.method = tx.method;
  r.sender = tx.sender;
  LedgerState next = state_;
  try {
    apply(tx, next);
    state_ = std::move(next);
    r.accepted = true;
  } catch (const Error& e) {
    r.code = e.code();
    r.message = e.what();
  }
  log_.push_back(tx);
  receipts_.push_back(r);
  return r;
}

void Ledger::submit_or_throw(const Transaction& tx) {
  const Receipt r = submit(tx);
  if (!r.accepted) throw Error(r.code, r.message);
}

crypto::Digest Ledger::state_hash() const { return crypto::sha256(as_bytes(state_.to_json().dump())); }

std::uint64_t Ledger::next_nonce(const Address& address) const {
  const auto it = state_.nonces.find(address);
  return it == state_.nonces.end() ? 0 : it->second;
}

std::string Ledger::export_ndjson() const {
  std::string out;
  for (const auto& tx : log_) {
    out += tx.to_json().dump();
    out += '\n';
  }
  return out;
}

Ledger Ledger::replay(std::string_view ndjson) {
  Ledger ledger;
  std::istringstream in{std::string(ndjson)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::Malformed, "transaction log line is not JSON");
    ledger.submit(Transaction::from_json(j));
  }
  return ledger;
}

std::map<Phase, std::size_t> Ledger::phase_counts() const {
  std::map<Phase, std::size_t> out;
  for (Phase p : kPhases) out[p] = 0;
  for (const auto& r : receipts_) {
    if (r.accepted) ++out[phase_of(r.contract, r.method)];
  }
  return out;
}

bool Ledger::has_role(const Address& address, Role role) const { return holds(state_, address, role); }

std::vector<std::string> Ledger::authority_ids() const {
  std::vector<std::string> out;
  for (const auto& r : state_.authorities) out.push_back(r.authority_id);
  return out;
}

const AuthorityRecord* Ledger::authority_record(std::string_view authority_id) const {
  for (const auto& r : state_.authorities) {
    if (r.authority_id == authority_id) return &r;
  }
  return nullptr;
}

const AuthorityRecord* Ledger::authority_by_address(const Address& address) const {
  for (const auto& r : state_.authorities) {
    if (r.address == address) return &r;
  }
  return nullptr;
}

std::optional<std::string> Ledger::rsa_key(const Address& address) const {
  const auto it = state_.rsa_keys.find(address);
  if (it == state_.rsa_keys.end()) return std::nullopt;
  return it->second;
}

std::optional<Rloc> Ledger::message_rloc(std::string_view message_id) const {
  const auto it = state_.messages.find(std::string(message_id));
  if (it == state_.messages.end()) return std::nullopt;
  return it->second.rloc;
}

std::set<Address> Ledger::flagged_authorities() const {
  std::set<Address> out;
  for (const auto& r : receipts_) {
    if (!r.accepted && r.code == ErrorCode::CommitMismatch) out.insert(r.sender);
  }
  return out;
}

std::vector<CtxMatch> Ledger::retrieve_ctx(const policy::LiteralSet& owned) const {
  const auto authorities = authority_ids();
  std::vector<CtxMatch> out;
  for (const auto& [text, rlocs] : state_.dictionary) {
    bool ok = false;
    try {
      ok = policy::evaluate(policy::parse(text), owned, authorities);
    } catch (const Error&) {
      ok = false;  // e.g. a threshold above the current authority count
    }
    if (!ok) continue;
    for (const auto& r : rlocs) out.push_back({text, r});
  }
  return out;
}

std::vector<KeyDelivery> Ledger::deliveries_for(const Address& reader) const {
  std::vector<KeyDelivery> out;
  for (const auto& d : state_.key_deliveries) {
    if (d.reader == reader) out.push_back(d);
  }
  return out;
}

}  // namespace martsia::ledger

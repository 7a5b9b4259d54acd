#include "martsia/scenario/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace martsia::scenario {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::Malformed, "scenario: " + what);
}

[[noreturn]] void dangling(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "scenario: " + what);
}

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) malformed("expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing '") + key + "'");
  return *it;
}

std::string text(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string() || v.get<std::string>().empty()) malformed(std::string("'") + key + "' must be a non-empty string");
  return v.get<std::string>();
}

std::vector<std::string> texts(const Json& v, const char* what) {
  if (!v.is_array()) malformed(std::string("'") + what + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) malformed(std::string("'") + what + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<std::string> optional_texts(const Json& args, const char* key) {
  const auto it = args.find(key);
  return it == args.end() ? std::vector<std::string>{} : texts(*it, key);
}

void check_ops(const Scenario& s) {
  const std::set<std::string> authorities = [&] {
    std::set<std::string> ids;
    for (const auto& a : s.authorities) ids.insert(a.id);
    return ids;
  }();
  auto need_actor = [&](const Json& args, const char* key) {
    const std::string label = text(args, key);
    if (s.find_actor(label) == nullptr) dangling("step references undeclared actor '" + label + "'");
  };
  auto need_message = [&](const Json& args, const char* key) {
    const std::string name = text(args, key);
    if (s.find_message(name) == nullptr) dangling("step references undeclared message '" + name + "'");
    return s.find_message(name);
  };
  auto need_authority = [&](const std::string& id) {
    if (!authorities.contains(id)) dangling("step references undeclared authority '" + id + "'");
  };
  auto need_certifiers = [&](const Json& args) {
    for (const auto& c : optional_texts(args, "signers")) {
      if (std::find(s.certifiers.begin(), s.certifiers.end(), c) == s.certifiers.end()) {
        dangling("'" + c + "' is not a declared certifier");
      }
    }
  };
  auto need_scheme = [&](const Json& args, bool required) {
    if (!required && !args.contains("scheme")) return;
    try {
      actors::parse_scheme(text(args, "scheme"));
    } catch (const Error& e) {
      malformed(e.what());
    }
  };

  for (const auto& step : s.steps) {
    const Json& a = step.args;
    if (step.op == "boot" || step.op == "certify") {
      need_certifiers(a);
    } else if (step.op == "init" || step.op == "clear-wallets") {
    } else if (step.op == "store-rsa-keys") {
      for (const auto& l : optional_texts(a, "actors")) {
        if (s.find_actor(l) == nullptr) dangling("step references undeclared actor '" + l + "'");
      }
    } else if (step.op == "request-key") {
      need_actor(a, "reader");
      need_scheme(a, true);
      for (const auto& id : optional_texts(a, "authorities")) need_authority(id);
    } else if (step.op == "publish") {
      need_message(a, "message");
    } else if (step.op == "fetch") {
      need_actor(a, "reader");
      const MessageDecl* m = need_message(a, "message");
      for (const auto& slice : optional_texts(a, "expect_readable")) {
        if (std::none_of(m->slices.begin(), m->slices.end(), [&](const SliceDecl& d) { return d.name == slice; })) {
          dangling("message '" + m->name + "' has no slice '" + slice + "'");
        }
      }
    } else if (step.op == "access-matrix") {
      need_scheme(a, false);
    } else if (step.op == "toggle") {
      const std::string kind = text(a, "kind");
      if (kind == "dishonest-opening") {
        need_authority(text(a, "authority"));
      } else if (kind == "withhold-share") {
        need_authority(text(a, "authority"));
        need_actor(a, "reader");
        const MessageDecl* m = need_message(a, "message");
        const std::string slice = text(a, "slice");
        if (std::none_of(m->slices.begin(), m->slices.end(), [&](const SliceDecl& d) { return d.name == slice; })) {
          dangling("message '" + m->name + "' has no slice '" + slice + "'");
        }
      } else if (kind == "mixed-gid-collusion") {
        const auto readers = texts(field(a, "readers"), "readers");
        if (readers.size() != 2 || readers[0] == readers[1]) malformed("mixed-gid-collusion needs two distinct readers");
        for (const auto& r : readers) {
          if (s.find_actor(r) == nullptr) dangling("step references undeclared actor '" + r + "'");
        }
        need_message(a, "message");
      } else if (kind == "tamper-envelope") {
        need_message(a, "message");
        if (!field(a, "offset").is_number_unsigned()) malformed("'offset' must be a non-negative integer");
      } else if (kind == "forged-authority") {
        need_actor(a, "actor");
        need_message(a, "message");
      } else {
        malformed("unknown toggle kind '" + kind + "'");
      }
      if (!step.expect) malformed("toggle '" + kind + "' must declare the error it expects");
    } else {
      malformed("unknown step op '" + step.op + "'");
    }
  }
}

}  // namespace

ErrorCode parse_error_code(std::string_view name) {
  for (int c = static_cast<int>(ErrorCode::Unauthorized); c <= static_cast<int>(ErrorCode::InvalidArgument); ++c) {
    if (error_code_name(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  throw Error(ErrorCode::Malformed, "unknown error name '" + std::string(name) + "'");
}

Scenario Scenario::from_json(const Json& doc) {
  Scenario s;
  s.name = text(doc, "name");
  if (!field(doc, "seed").is_number_unsigned()) malformed("'seed' must be a non-negative integer");
  s.seed = doc["seed"].get<std::uint64_t>();
  s.certifiers = texts(field(doc, "certifiers"), "certifiers");
  if (s.certifiers.empty()) malformed("at least one certifier is required");

  std::set<std::string> labels(s.certifiers.begin(), s.certifiers.end());
  if (labels.size() != s.certifiers.size()) malformed("duplicate certifier label");
  auto fresh = [&](const std::string& label) {
    if (!labels.insert(label).second) malformed("duplicate label '" + label + "'");
  };

  for (const auto& a : field(doc, "authorities")) {
    s.authorities.push_back({text(a, "label"), text(a, "id")});
    fresh(s.authorities.back().label);
  }
  if (s.authorities.empty()) malformed("at least one authority is required");
  for (const auto& a : field(doc, "actors")) {
    ActorDecl d{text(a, "label"), {}, {}};
    fresh(d.label);
    for (const auto& r : texts(field(a, "roles"), "roles")) {
      try {
        d.roles.push_back(ledger::parse_role(r));
      } catch (const Error& e) {
        malformed(e.what());
      }
    }
    if (a.contains("attributes")) {
      for (auto& attr : texts(a["attributes"], "attributes")) d.attributes.insert(std::move(attr));
    }
    s.actors.push_back(std::move(d));
  }

  std::set<std::string> message_names;
  if (doc.contains("messages")) {
    for (const auto& m : doc["messages"]) {
      MessageDecl d{text(m, "name"), text(m, "sender"), text(m, "case_id"), {}};
      if (!message_names.insert(d.name).second) malformed("duplicate message '" + d.name + "'");
      const ActorDecl* sender = s.find_actor(d.sender);
      if (sender == nullptr) dangling("message '" + d.name + "' has undeclared sender '" + d.sender + "'");
      std::set<std::string> slice_names;
      for (const auto& sl : field(m, "slices")) {
        SliceDecl sd{text(sl, "name"), text(sl, "policy"), {}};
        if (!slice_names.insert(sd.name).second) malformed("duplicate slice '" + sd.name + "'");
        const Json& fields = field(sl, "fields");
        if (!fields.is_object() || fields.empty()) malformed("slice fields must be a non-empty object");
        for (const auto& [k, v] : fields.items()) {
          if (!v.is_string()) malformed("field values must be strings");
          sd.fields.emplace_back(k, v.get<std::string>());
        }
        d.slices.push_back(std::move(sd));
      }
      if (d.slices.empty()) malformed("message '" + d.name + "' has no slices");
      s.messages.push_back(std::move(d));
    }
  }

  for (const auto& st : field(doc, "steps")) {
    Step step{text(st, "op"), Json::object(), std::nullopt};
    for (const auto& [k, v] : st.items()) {
      if (k == "op") continue;
      if (k == "expect") {
        if (!v.is_string()) malformed("'expect' must be an error name");
        step.expect = parse_error_code(v.get<std::string>());
      } else {
        step.args[k] = v;
      }
    }
    s.steps.push_back(std::move(step));
  }
  check_ops(s);
  return s;
}

Scenario Scenario::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read scenario " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) malformed(file.string() + " is not valid JSON");
  return from_json(doc);
}

const ActorDecl* Scenario::find_actor(std::string_view label) const {
  for (const auto& a : actors) {
    if (a.label == label) return &a;
  }
  return nullptr;
}

const MessageDecl* Scenario::find_message(std::string_view name) const {
  for (const auto& m : messages) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

World::World(Scenario scenario, ledger::Ledger& ledger, datastore::ContentStore& store,
             std::optional<std::uint64_t> seed_override)
    : scenario_(std::move(scenario)),
      seed_(seed_override.value_or(scenario_.seed)),
      root_(crypto::Rng::from_seed(seed_)),
      env_{ledger, store} {
  auto make = [&](const std::string& label, bool rsa) {
    identities_.push_back(std::make_unique<actors::ActorIdentity>(label, root_, rsa));
    by_label_[label] = identities_.back().get();
    return identities_.back().get();
  };
  for (const auto& c : scenario_.certifiers) make(c, false);
  for (const auto& a : scenario_.authorities) {
    nodes_.push_back(std::make_unique<actors::AuthorityNode>(*make(a.label, false), a.id));
  }
  for (const auto& a : scenario_.actors) {
    const bool rsa = std::any_of(a.roles.begin(), a.roles.end(), [](ledger::Role r) {
      return r == ledger::Role::Reader || r == ledger::Role::DataOwner;
    });
    make(a.label, rsa);
  }
}

actors::ActorIdentity& World::actor(std::string_view label) {
  const auto it = by_label_.find(label);
  if (it == by_label_.end()) throw Error(ErrorCode::InvalidArgument, "unknown actor '" + std::string(label) + "'");
  return *it->second;
}

actors::AuthorityNode& World::authority(std::string_view id) {
  for (auto& n : nodes_) {
    if (n->authority_id() == id) return *n;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown authority '" + std::string(id) + "'");
}

std::vector<std::string> World::readers() const {
  std::vector<std::string> out;
  for (const auto& a : scenario_.actors) {
    if (std::find(a.roles.begin(), a.roles.end(), ledger::Role::Reader) != a.roles.end()) out.push_back(a.label);
  }
  return out;
}

void World::boot(const std::vector<std::string>& signers) {
  std::vector<const actors::ActorIdentity*> certifiers;
  for (const auto& c : scenario_.certifiers) certifiers.push_back(&actor(c));
  std::vector<actors::RoleAssignment> assignments;
  for (const auto& a : scenario_.authorities) assignments.push_back({&actor(a.label), ledger::Role::Authority, a.id});
  for (const auto& a : scenario_.actors) {
    for (const auto r : a.roles) assignments.push_back({&actor(a.label), r, {}});
  }
  std::optional<std::vector<const actors::ActorIdentity*>> sign;
  if (!signers.empty()) {
    sign.emplace();
    for (const auto& s : signers) sign->push_back(&actor(s));
  }
  actors::run_system_boot(env_, certifiers, assignments, sign);
}

actors::InitResult World::init() {
  std::vector<actors::AuthorityNode*> nodes;
  for (auto& n : nodes_) nodes.push_back(n.get());
  return actors::run_authority_init(env_, nodes);
}

void World::store_rsa_keys(const std::vector<std::string>& labels) {
  std::vector<std::string> targets = labels;
  if (targets.empty()) {
    for (const auto& a : scenario_.actors) {
      if (actor(a.label).has_rsa()) targets.push_back(a.label);
    }
  }
  for (const auto& l : targets) {
    auto& id = actor(l);
    if (!env_.ledger.rsa_key(id.address())) actors::publish_rsa_key(env_, id);
  }
}

ledger::Rloc World::certify(const std::vector<std::string>& signers) {
  std::vector<const actors::ActorIdentity*> sign;
  for (const auto& s : signers.empty() ? scenario_.certifiers : signers) sign.push_back(&actor(s));
  std::map<ledger::Address, std::set<std::string>> table;
  for (const auto& a : scenario_.actors) {
    if (!a.attributes.empty()) table[actor(a.label).address()] = a.attributes;
  }
  return actors::certify_attributes(env_, sign, table);
}

std::vector<actors::DecryptionKeyShare> World::request_key(const std::string& reader, actors::Scheme scheme,
                                                           const std::vector<std::string>& authorities) {
  auto& id = actor(reader);
  store_rsa_keys({reader});
  std::vector<actors::DecryptionKeyShare> out;
  for (auto& n : nodes_) {
    if (!authorities.empty() &&
        std::find(authorities.begin(), authorities.end(), n->authority_id()) == authorities.end()) {
      continue;
    }
    auto got = scheme == actors::Scheme::Channel ? actors::request_key_channel(env_, id, *n)
                                                 : actors::request_key_onchain(env_, id, *n);
    out.insert(out.end(), got.begin(), got.end());
  }
  auto& w = wallets_[reader];
  w.insert(w.end(), out.begin(), out.end());
  return out;
}

std::string World::publish(const std::string& message) {
  const MessageDecl* m = scenario_.find_message(message);
  if (m == nullptr) throw Error(ErrorCode::InvalidArgument, "unknown message '" + message + "'");
  std::vector<envelope::SlicePlan> plans;
  for (const auto& s : m->slices) plans.push_back({s.policy, s.fields});
  const std::string id = actors::owner_publish(env_, actor(m->sender), m->case_id, plans);
  message_ids_[message] = id;
  return id;
}

std::string World::message_id(const std::string& message) const {
  const auto it = message_ids_.find(message);
  if (it != message_ids_.end()) return it->second;
  if (scenario_.find_message(message) != nullptr) {
    throw Error(ErrorCode::NotFound, "message '" + message + "' has not been published");
  }
  return message;
}

std::string World::slice_name(const std::string& message, std::size_t index) const {
  const MessageDecl* m = scenario_.find_message(message);
  if (m != nullptr && index < m->slices.size()) return m->slices[index].name;
  return std::to_string(index);
}

const std::vector<actors::DecryptionKeyShare>& World::wallet(const std::string& reader) {
  actor(reader);
  return wallets_[reader];
}

actors::FetchResult World::fetch(const std::string& reader, const std::string& message) {
  return actors::reader_fetch(env_, actors::assemble_fdk(wallet(reader)), message_id(message));
}

actors::KeyBundle World::bundle_over(const std::string& reader, actors::Scheme scheme) {
  auto& id = actor(reader);
  store_rsa_keys({reader});
  std::vector<actors::DecryptionKeyShare> shares;
  for (auto& n : nodes_) {
    try {
      auto got = scheme == actors::Scheme::Channel ? actors::request_key_channel(env_, id, *n)
                                                   : actors::request_key_onchain(env_, id, *n);
      shares.insert(shares.end(), got.begin(), got.end());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unauthorized || !actors::certified_attributes(env_, id.gid()).empty()) throw;
    }
  }
  return actors::assemble_fdk(shares);
}

AccessMatrix World::access_matrix(std::optional<actors::Scheme> scheme) {
  AccessMatrix out;
  for (const auto& m : scenario_.messages) {
    if (!message_ids_.contains(m.name)) continue;
    for (const auto& s : m.slices) out[m.name + "/" + s.name];
  }
  for (const auto& r : readers()) {
    const actors::KeyBundle bundle = scheme ? bundle_over(r, *scheme) : actors::assemble_fdk(wallet(r));
    for (const auto& m : scenario_.messages) {
      const auto it = message_ids_.find(m.name);
      if (it == message_ids_.end()) continue;
      const auto got = actors::reader_fetch(env_, bundle, it->second);
      for (std::size_t i = 0; i < got.slices.size(); ++i) {
        if (got.slices[i].fields) out[m.name + "/" + slice_name(m.name, i)].insert(r);
      }
    }
  }
  return out;
}

Json World::session() const {
  Json wallets = Json::object();
  for (const auto& [label, shares] : wallets_) {
    Json list = Json::array();
    for (const auto& s : shares) list.push_back(to_hex(s.serialize()));
    wallets[label] = std::move(list);
  }
  return {{"seed", seed_}, {"clock", env_.clock}, {"wallets", wallets}, {"messages", message_ids_},
          {"epoch", epoch_}};
}

void World::load_session(const Json& session) {
  if (!session.is_object()) throw Error(ErrorCode::Malformed, "session state is not an object");
  if (session.value("seed", seed_) != seed_) {
    throw Error(ErrorCode::InvalidArgument, "session was created with seed " +
                                                std::to_string(session["seed"].get<std::uint64_t>()));
  }
  env_.clock = session.value("clock", std::uint64_t{0});
  epoch_ = session.value("epoch", std::uint64_t{0}) + 1;
  for (auto& id : identities_) id->reseed_runtime("epoch/" + std::to_string(epoch_));
  wallets_.clear();
  if (session.contains("wallets")) {
    for (const auto& [label, list] : session["wallets"].items()) {
      auto& w = wallets_[label];
      for (const auto& hex : list) w.push_back(actors::DecryptionKeyShare::deserialize(from_hex(hex.get<std::string>())));
    }
  }
  message_ids_.clear();
  if (session.contains("messages")) {
    for (const auto& [name, id] : session["messages"].items()) message_ids_[name] = id.get<std::string>();
  }
}

void World::restore_authorities() {
  for (auto& n : nodes_) {
    const auto* rec = env_.ledger.authority_record(n->authority_id());
    if (rec != nullptr && !rec->pubkey_rloc.empty()) n->restore(env_);
  }
}

}  // namespace martsia::scenario

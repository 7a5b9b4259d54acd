#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "martsia/actors/actors.hpp"
#include "martsia/datastore/store.hpp"

namespace martsia::testing {

using actors::ActorIdentity;
using actors::AuthorityNode;
using ledger::Role;

/// Ledger, store, three certifiers, one node per authority and named
/// participants, all derived from one seed.
struct World {
  struct Person {
    std::unique_ptr<ActorIdentity> identity;
    std::set<std::string> attributes;
    std::vector<Role> roles;
  };

  crypto::Rng root;
  ledger::Ledger ledger;
  datastore::MemoryStore store;
  actors::Environment env{ledger, store};
  std::vector<std::unique_ptr<ActorIdentity>> certifier_ids;
  std::vector<std::unique_ptr<ActorIdentity>> authority_ids;
  std::vector<std::unique_ptr<AuthorityNode>> nodes;
  std::map<std::string, Person> people;

  explicit World(std::uint64_t seed, const std::vector<std::string>& authorities = {"A", "B", "C"},
                 std::size_t certifiers = 3)
      : root(crypto::Rng::from_seed(seed)) {
    for (std::size_t i = 0; i < certifiers; ++i) {
      certifier_ids.push_back(std::make_unique<ActorIdentity>("certifier-" + std::to_string(i + 1), root, false));
    }
    for (const auto& id : authorities) {
      authority_ids.push_back(std::make_unique<ActorIdentity>("authority-" + id, root, false));
      nodes.push_back(std::make_unique<AuthorityNode>(*authority_ids.back(), id));
    }
  }

  ActorIdentity& add(const std::string& label, std::set<std::string> attributes,
                     std::vector<Role> roles = {Role::Reader}) {
    auto& p = people[label];
    p.identity = std::make_unique<ActorIdentity>(label, root, true);
    p.attributes = std::move(attributes);
    p.roles = std::move(roles);
    return *p.identity;
  }

  ActorIdentity& operator[](const std::string& label) { return *people.at(label).identity; }

  std::vector<const ActorIdentity*> certifiers() const {
    std::vector<const ActorIdentity*> out;
    for (const auto& c : certifier_ids) out.push_back(c.get());
    return out;
  }

  std::vector<AuthorityNode*> node_ptrs() {
    std::vector<AuthorityNode*> out;
    for (auto& n : nodes) out.push_back(n.get());
    return out;
  }

  AuthorityNode& node(const std::string& id) {
    for (auto& n : nodes) {
      if (n->authority_id() == id) return *n;
    }
    throw std::out_of_range(id);
  }

  std::vector<actors::RoleAssignment> assignments() const {
    std::vector<actors::RoleAssignment> out;
    for (const auto& n : nodes) out.push_back({&n->identity(), Role::Authority, n->authority_id()});
    for (const auto& [label, p] : people) {
      for (Role r : p.roles) out.push_back({p.identity.get(), r, {}});
    }
    return out;
  }

  void boot() { actors::run_system_boot(env, certifiers(), assignments()); }
  actors::InitResult init() { return actors::run_authority_init(env, node_ptrs()); }

  void publish_keys() {
    for (const auto& [label, p] : people) actors::publish_rsa_key(env, *p.identity);
  }

  void certify() {
    std::map<ledger::Address, std::set<std::string>> table;
    for (const auto& [label, p] : people) {
      if (!p.attributes.empty()) table[p.identity->address()] = p.attributes;
    }
    const auto all = certifiers();
    actors::certify_attributes(env, {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(ledger::majority(all.size()))},
                               table);
  }

  void setup() {
    boot();
    init();
    publish_keys();
    certify();
  }

  std::vector<actors::DecryptionKeyShare> shares(const std::string& label, actors::Scheme scheme,
                                                 const std::vector<std::string>& from = {}) {
    std::vector<actors::DecryptionKeyShare> out;
    for (auto& n : nodes) {
      if (!from.empty() && std::find(from.begin(), from.end(), n->authority_id()) == from.end()) continue;
      if (people.at(label).attributes.empty()) continue;
      auto got = scheme == actors::Scheme::Channel ? actors::request_key_channel(env, (*this)[label], *n)
                                                   : actors::request_key_onchain(env, (*this)[label], *n);
      out.insert(out.end(), got.begin(), got.end());
    }
    return out;
  }

  actors::KeyBundle bundle(const std::string& label, actors::Scheme scheme = actors::Scheme::Channel,
                           const std::vector<std::string>& from = {}) {
    return actors::assemble_fdk(shares(label, scheme, from));
  }
};

}  // namespace martsia::testing

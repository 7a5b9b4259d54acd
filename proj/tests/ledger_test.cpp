#include <memory>

#include "doctest.h"
#include "martsia/crypto/sha256.hpp"
#include "martsia/ledger/ledger.hpp"
#include "support/keys.hpp"

using namespace martsia;
using namespace martsia::ledger;
using testing::Party;
using testing::send;

namespace {

std::vector<std::unique_ptr<Party>> parties(std::string_view prefix, std::size_t n) {
  std::vector<std::unique_ptr<Party>> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::make_unique<Party>(std::string(prefix) + std::to_string(i)));
  }
  return out;
}

Json addresses(const std::vector<std::unique_ptr<Party>>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p->address);
  return out;
}

std::vector<const Party*> first(const std::vector<std::unique_ptr<Party>>& ps, std::size_t k) {
  std::vector<const Party*> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ps[i].get());
  return out;
}

struct World {
  Ledger l;
  std::vector<std::unique_ptr<Party>> certifiers = parties("certifier-", 3);
  Party a0{"authority-0"}, a1{"authority-1"}, a2{"authority-2"};
  Party owner{"owner"}, reader{"reader"};

  World() {
    for (const auto& c : certifiers) testing::register_account(l, *c);
    for (const Party* p : {&a0, &a1, &a2, &owner, &reader}) testing::register_account(l, *p);
    REQUIRE(send(l, *certifiers[0], contract::kSystem, "deploy", {{"certifiers", addresses(certifiers)}},
                 first(certifiers, 2))
                .accepted);
    grant(a0, "Authority", "A");
    grant(a1, "Authority", "B");
    grant(a2, "Authority", "C");
    grant(owner, "DataOwner");
    grant(reader, "Reader");
  }

  Receipt grant(const Party& p, std::string role, std::string id = "", std::size_t signers = 2) {
    Json args = {{"target", p.address}, {"role", role}};
    if (!id.empty()) args["authority_id"] = id;
    return send(l, *certifiers[0], contract::kSystem, "assign_role", args, first(certifiers, signers));
  }

  Receipt commit(const Party& p, std::string_view element_hex) {
    return send(l, p, contract::kAuthority, "commit",
                {{"digest", crypto::sha256_hex(from_hex(element_hex))}});
  }
  Receipt open(const Party& p, std::string_view element_hex) {
    return send(l, p, contract::kAuthority, "open", {{"element", element_hex}});
  }
};

const std::string kRloc1(64, 'a');
const std::string kRloc2(64, 'b');

}  // namespace

TEST_CASE("addresses derive from the signing key") {
  const Party p("alice");
  CHECK(is_address(p.address));
  const crypto::Digest d = crypto::sha256(p.key.public_key());
  CHECK(p.address == to_hex(ByteView(d.data(), 20)));
  CHECK(majority(1) == 1);
  CHECK(majority(3) == 2);
  CHECK(majority(4) == 3);
  CHECK(majority(5) == 3);
}

TEST_CASE("governance thresholds are exact") {
  for (std::size_t n : {1u, 3u, 4u, 5u}) {
    for (std::size_t k = 1; k <= n; ++k) {
      Ledger l;
      const auto certs = parties("c" + std::to_string(n) + "-", n);
      for (const auto& c : certs) testing::register_account(l, *c);
      const Party target("target");
      testing::register_account(l, target);
      const bool enough = k >= majority(n);

      const auto before = l.state_hash();
      const Receipt deploy =
          send(l, *certs[0], contract::kSystem, "deploy", {{"certifiers", addresses(certs)}}, first(certs, k));
      CHECK(deploy.accepted == enough);
      if (!enough) {
        CHECK(deploy.code == ErrorCode::MajorityMissing);
        CHECK(l.state_hash() == before);
        REQUIRE(send(l, *certs[0], contract::kSystem, "deploy", {{"certifiers", addresses(certs)}},
                     first(certs, n))
                    .accepted);
      }
      const auto mid = l.state_hash();
      const Receipt grant = send(l, *certs[0], contract::kSystem, "assign_role",
                                 {{"target", target.address}, {"role", "Reader"}}, first(certs, k));
      CHECK(grant.accepted == enough);
      CHECK(l.has_role(target.address, Role::Reader) == enough);
      if (!enough) CHECK(l.state_hash() == mid);
    }
  }
}

TEST_CASE("deployment and role management") {
  World w;
  CHECK(send(w.l, *w.certifiers[0], contract::kSystem, "deploy",
             {{"certifiers", addresses(w.certifiers)}}, first(w.certifiers, 3))
            .code == ErrorCode::Conflict);
  const Party stranger("stranger");
  CHECK(send(w.l, *w.certifiers[0], contract::kSystem, "assign_role",
             {{"target", stranger.address}, {"role", "Reader"}}, first(w.certifiers, 2))
            .code == ErrorCode::NotFound);
  CHECK(w.grant(w.owner, "Reader", "", 1).code == ErrorCode::MajorityMissing);
  CHECK_FALSE(w.l.has_role(w.owner.address, Role::Reader));

  CHECK(send(w.l, w.reader, contract::kRsaKey, "store", {{"public_key", base64_encode(as_bytes("k"))}})
            .accepted);
  CHECK(*w.l.rsa_key(w.reader.address) == base64_encode(as_bytes("k")));
  CHECK(send(w.l, w.a0, contract::kRsaKey, "store", {{"public_key", "aw=="}}).code ==
        ErrorCode::RoleDenied);

  CHECK(send(w.l, *w.certifiers[1], contract::kSystem, "revoke_role",
             {{"target", w.a1.address}, {"role", "Authority"}}, first(w.certifiers, 2))
            .accepted);
  CHECK(w.commit(w.a1, "01").code == ErrorCode::RoleDenied);
  CHECK(w.l.authority_ids() == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("commit then open") {
  World w;
  CHECK(w.commit(w.a0, "aa01").accepted);
  CHECK(w.commit(w.a0, "aa01").code == ErrorCode::Conflict);
  CHECK(w.open(w.a0, "aa01").code == ErrorCode::PhaseError);
  CHECK(w.commit(w.a1, "bb02").accepted);
  CHECK(w.open(w.a1, "bb02").code == ErrorCode::PhaseError);
  CHECK(w.commit(w.a2, "cc03").accepted);

  CHECK(w.open(w.a0, "aa01").accepted);
  const auto before = w.l.state_hash();
  CHECK(w.open(w.a1, "bb99").code == ErrorCode::CommitMismatch);
  CHECK(w.l.state_hash() == before);
  CHECK(w.l.flagged_authorities() == std::set<Address>{w.a1.address});
  CHECK(w.open(w.a2, "cc03").accepted);
  CHECK(w.l.authority_record("A")->opening == "aa01");
  CHECK(w.l.authority_record("B")->opening.empty());

  const Json pub = {{"metadata_rloc", kRloc1}, {"params_rloc", kRloc1}, {"pubkey_rloc", kRloc2}};
  CHECK(send(w.l, w.a0, contract::kAuthority, "publish", pub).accepted);
  CHECK(send(w.l, w.a1, contract::kAuthority, "publish", pub).code == ErrorCode::PhaseError);
  CHECK(send(w.l, w.a0, contract::kAuthority, "publish", pub).code == ErrorCode::Conflict);
}

TEST_CASE("message contract is write-once and feeds the dictionary") {
  World w;
  const Json args = {{"message_id", "22063028"}, {"rloc", kRloc1},
                     {"policies", {"Customs@A or (43175279@2+ and Manufacturer@1+)"}}};
  CHECK(send(w.l, w.owner, contract::kMessage, "store", args).accepted);
  CHECK(*w.l.message_rloc("22063028") == kRloc1);
  CHECK(send(w.l, w.owner, contract::kMessage, "store", args).code == ErrorCode::Conflict);
  CHECK(send(w.l, w.reader, contract::kMessage, "store",
             {{"message_id", "1"}, {"rloc", kRloc2}, {"policies", {"x@A"}}})
            .code == ErrorCode::RoleDenied);
  CHECK(send(w.l, w.owner, contract::kMessage, "store",
             {{"message_id", "2"}, {"rloc", kRloc2}, {"policies", {"x@"}}})
            .code == ErrorCode::Malformed);
  CHECK_FALSE(w.l.message_rloc("99999999").has_value());
}

TEST_CASE("retrieve_ctx matches brute-force filtering") {
  World w;
  const std::vector<std::string> policies = {
      "Customs@A or (43175279@2+ and ((Supplier@1+ and International@1+) or Manufacturer@1+ or "
      "(Carrier@1+ and International@1+)))",
      "Customs@A or (43175279@2+ and (Supplier@1+ and International@1+))",
      "43175279@2+ and ((Supplier@2+ and International@1+) or Manufacturer@1+)",
      "Customs@A or (43175279@2+ and ((Supplier@1+ and International@1+) or Manufacturer@1+))",
      "Customs@A or (43175279@2+ and Manufacturer@1+)",
  };
  REQUIRE(send(w.l, w.owner, contract::kMessage, "store",
               {{"message_id", "10000001"}, {"rloc", kRloc1},
                {"policies", Json(std::vector<std::string>(policies.begin(), policies.end() - 1))}})
              .accepted);
  REQUIRE(send(w.l, w.owner, contract::kMessage, "store",
               {{"message_id", "10000002"}, {"rloc", kRloc2}, {"policies", {policies.back()}}})
              .accepted);

  const auto customs = w.l.retrieve_ctx({{"Customs", "A"}});
  std::set<std::string> matched;
  for (const auto& m : customs) matched.insert(m.policy);
  CHECK(matched == std::set<std::string>{policies[0], policies[1], policies[3], policies[4]});
  CHECK(w.l.retrieve_ctx({}).empty());

  const policy::LiteralSet manufacturer = {{"Manufacturer", "A"}, {"43175279", "A"}, {"43175279", "B"}};
  policy::LiteralSet bigger = manufacturer;
  bigger.insert({"Customs", "A"});
  const auto small = w.l.retrieve_ctx(manufacturer);
  const auto large = w.l.retrieve_ctx(bigger);
  CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));

  for (const auto& owned : {manufacturer, bigger, policy::LiteralSet{{"Customs", "A"}}}) {
    std::vector<CtxMatch> brute;
    for (const auto& [text, rlocs] : w.l.state().dictionary) {
      if (policy::evaluate(policy::parse(text), owned, {"A", "B", "C"})) {
        for (const auto& r : rlocs) brute.push_back({text, r});
      }
    }
    CHECK(w.l.retrieve_ctx(owned) == brute);
  }
}

TEST_CASE("attribute setup is set once") {
  World w;
  const Json first_args = {{"universe", {"Manufacturer", "Customs"}},
                            {"assignments", {{w.reader.address, {"Customs"}}}}};
  CHECK(send(w.l, *w.certifiers[0], contract::kCertifier, "set_attr", first_args,
             first(w.certifiers, 2))
            .accepted);
  const auto hash = w.l.state_hash();
  CHECK(send(w.l, *w.certifiers[0], contract::kCertifier, "set_attr",
             {{"universe", {"Other"}}, {"assignments", Json::object()}}, first(w.certifiers, 2))
            .accepted);
  REQUIRE(w.l.state().attribute_setup.has_value());
  CHECK(w.l.state().attribute_setup->universe == std::set<std::string>{"Customs", "Manufacturer"});
  // only the governance nonce moved
  CHECK_FALSE(w.l.state_hash() == hash);
  Json s = w.l.state().to_json();
  CHECK(s["attribute_certifier_contract"]["attribute_setup"]["universe"] == Json({"Customs", "Manufacturer"}));

  CHECK(send(w.l, *w.certifiers[0], contract::kCertifier, "store_attr_rloc", {{"rloc", kRloc1}},
             first(w.certifiers, 2))
            .accepted);
  CHECK(send(w.l, *w.certifiers[1], contract::kCertifier, "store_attr_rloc", {{"rloc", kRloc2}},
             first(w.certifiers, 3))
            .accepted);
  CHECK(w.l.attr_rlocs() == std::vector<Rloc>{kRloc1, kRloc2});
  CHECK(send(w.l, w.reader, contract::kCertifier, "store_attr_rloc", {{"rloc", kRloc1}}).code ==
        ErrorCode::RoleDenied);
}

TEST_CASE("signatures and nonces") {
  World w;
  Transaction tx = make_transaction(w.owner.key, w.l.next_nonce(w.owner.address), contract::kMessage,
                                    "store",
                                    {{"message_id", "3"}, {"rloc", kRloc1}, {"policies", {"x@A"}}});
  Transaction forged = tx;
  forged.args["rloc"] = kRloc2;
  CHECK(w.l.submit(forged).code == ErrorCode::IntegrityFailure);
  CHECK(w.l.submit(tx).accepted);
  CHECK(w.l.submit(tx).code == ErrorCode::Conflict);

  Transaction impostor;
  impostor.sender = w.owner.address;
  impostor.contract = contract::kMessage;
  impostor.method = "store";
  impostor.nonce = w.l.next_nonce(w.owner.address);
  impostor.sign_with(w.reader.key);
  CHECK(w.l.submit(impostor).code == ErrorCode::Malformed);
}

TEST_CASE("replay reproduces state and receipts") {
  World w;
  w.commit(w.a0, "aa");
  w.commit(w.a1, "bb");
  w.open(w.a0, "aa");
  w.commit(w.a2, "cc");
  w.open(w.a1, "b0");
  send(w.l, w.reader, contract::kRsaKey, "store", {{"public_key", "aw=="}});
  send(w.l, w.reader, contract::kAuthority, "request_key", {{"authority_id", "B"}});
  send(w.l, w.a1, contract::kAuthority, "deliver_key", {{"request_id", 0}, {"payload", "aw=="}});
  send(w.l, w.a2, contract::kAuthority, "deliver_key", {{"request_id", 0}, {"payload", "aw=="}});

  const std::string log = w.l.export_ndjson();
  const Ledger again = Ledger::replay(log);
  CHECK(again.state_hash() == w.l.state_hash());
  CHECK(again.state().to_json().dump() == w.l.state().to_json().dump());
  CHECK(again.export_ndjson() == log);
  REQUIRE(again.receipts().size() == w.l.receipts().size());
  for (std::size_t i = 0; i < again.receipts().size(); ++i) {
    CHECK(again.receipts()[i].accepted == w.l.receipts()[i].accepted);
    CHECK(again.receipts()[i].code == w.l.receipts()[i].code);
  }
  CHECK(again.flagged_authorities() == std::set<Address>{w.a1.address});
  CHECK(w.l.deliveries_for(w.reader.address).size() == 1);

  const auto counts = w.l.phase_counts();
  CHECK(counts.at(Phase::Boot) == 8 + 1 + 5);
  CHECK(counts.at(Phase::Init) == 3);
  CHECK(counts.at(Phase::KeyRequests) == 3);
  CHECK(counts.at(Phase::Publish) == 0);
  CHECK(Ledger{}.phase_counts().at(Phase::Boot) == 0);
}

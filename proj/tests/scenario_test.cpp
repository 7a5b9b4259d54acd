#include <fstream>
#include <sstream>

#include "doctest.h"
#include "martsia/scenario/scenario.hpp"
#include "support/running_example.hpp"

using namespace martsia;
using namespace martsia::scenario;

namespace {

const std::filesystem::path kRoot = MARTSIA_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json running_example_doc() { return Json::parse(slurp(kRoot / "scenarios/running_example.json")); }

Json roster_only() {
  Json doc = running_example_doc();
  doc["steps"] = Json::array();
  return doc;
}

Json with_steps(Json steps) {
  Json doc = roster_only();
  doc["steps"] = std::move(steps);
  return doc;
}

RunResult run_doc(const Json& doc) {
  datastore::MemoryStore store;
  return run(Scenario::from_json(doc), store);
}

const Json& step(const RunResult& r, std::size_t i) { return r.transcript["steps"][i]; }

const Json kSetup = Json::parse(R"([
  {"op": "boot", "signers": ["certifier-1", "certifier-2"]},
  {"op": "init"},
  {"op": "store-rsa-keys"},
  {"op": "certify"}
])");

Json setup_plus(std::initializer_list<Json> more) {
  Json steps = kSetup;
  for (const auto& s : more) steps.push_back(s);
  return steps;
}

}  // namespace

TEST_CASE("scenario validation rejects dangling references and bad schema") {
  auto code_of = [](const Json& doc) {
    try {
      Scenario::from_json(doc);
    } catch (const Error& e) {
      return std::optional<ErrorCode>(e.code());
    }
    return std::optional<ErrorCode>{};
  };
  CHECK_FALSE(code_of(running_example_doc()).has_value());
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "fetch", "reader": "ghost", "message": "purchase-order"}])"))) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "publish", "message": "nothing"}])"))) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "request-key", "reader": "manufacturer",
                                             "scheme": "channel", "authorities": ["Z"]}])"))) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "boot", "signers": ["manufacturer"]}])"))) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "warp"}])"))) == ErrorCode::Malformed);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "request-key", "reader": "manufacturer", "scheme": "pigeon"}])"))) ==
        ErrorCode::Malformed);
  // toggles must say which failure they expect
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "toggle", "kind": "dishonest-opening", "authority": "A"}])"))) ==
        ErrorCode::Malformed);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "toggle", "kind": "mixed-gid-collusion",
                                             "readers": ["manufacturer", "manufacturer"],
                                             "message": "purchase-order", "expect": "mixed-gid"}])"))) ==
        ErrorCode::Malformed);
  CHECK(code_of(with_steps(Json::parse(R"([{"op": "init", "expect": "sadness"}])"))) == ErrorCode::Malformed);

  Json dup = roster_only();
  dup["actors"].push_back(dup["actors"][0]);
  CHECK(code_of(dup) == ErrorCode::Malformed);
  Json role = roster_only();
  role["actors"][0]["roles"] = {"Emperor"};
  CHECK(code_of(role) == ErrorCode::Malformed);
  Json sender = roster_only();
  sender["messages"][0]["sender"] = "ghost";
  CHECK(code_of(sender) == ErrorCode::InvalidArgument);
}

TEST_CASE("running example transcript matches the golden file and is byte-stable") {
  const Scenario sc = Scenario::load(kRoot / "scenarios/running_example.json");
  datastore::MemoryStore s1, s2;
  const RunResult a = run(sc, s1);
  const RunResult b = run(sc, s2);
  REQUIRE(a.ok);
  CHECK(a.exit_code == 0);
  const std::string text = a.transcript.dump(2) + "\n";
  CHECK(text == b.transcript.dump(2) + "\n");
  CHECK(text == slurp(kRoot / "tests/golden/running_example.transcript.json"));

  const auto expected = testing::running_example::expected_access();
  int matrices = 0;
  for (const auto& st : a.transcript["steps"]) {
    if (st["op"] != "access-matrix") continue;
    ++matrices;
    AccessMatrix m;
    for (const auto& [cell, readers] : st["result"]["cells"].items()) {
      for (const auto& r : readers) m[cell].insert(r.get<std::string>());
    }
    CHECK(m == expected);
  }
  CHECK(matrices == 2);

  // a different seed changes addresses and ids but not the matrix
  datastore::MemoryStore s3;
  const RunResult c = run(sc, s3, 7);
  CHECK(c.ok);
  CHECK(c.transcript["state_hash"] != a.transcript["state_hash"]);
}

TEST_CASE("every adversarial toggle produces its expected failure") {
  const RunResult r = run_doc(Json::parse(slurp(kRoot / "scenarios/adversarial.json")));
  CHECK(r.ok);
  std::set<std::string> kinds;
  for (const auto& st : r.transcript["steps"]) {
    CHECK(st["ok"].get<bool>());
    if (st["op"] == "toggle") {
      kinds.insert(st["kind"].get<std::string>());
      CHECK(st["observed"] != "ok");
    }
  }
  CHECK(kinds == std::set<std::string>{"withhold-share", "mixed-gid-collusion", "forged-authority",
                                       "tamper-envelope"});

  const RunResult d = run_doc(Json::parse(slurp(kRoot / "scenarios/dishonest_opening.json")));
  CHECK(d.ok);
  const Json& t = d.transcript["steps"][1];
  CHECK(t["observed"] == "commit-mismatch");
  CHECK(t["result"]["culprit"] == d.transcript["actors"]["authority-b"]);
}

TEST_CASE("a toggle whose failure does not occur is reported, never passed") {
  // withholding one share cannot break a 2+ threshold, so this toggle sees success
  const RunResult r = run_doc(with_steps(setup_plus(
      {{{"op", "publish"}, {"message", "purchase-order"}},
       {{"op", "toggle"}, {"kind", "withhold-share"}, {"authority", "C"}, {"reader", "manufacturer"},
        {"message", "purchase-order"}, {"slice", "order"}, {"expect", "unauthorized"}}})));
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == kExpectationFailed);
  CHECK(step(r, 5)["observed"] == "ok");
  CHECK_FALSE(step(r, 5)["ok"].get<bool>());
}

TEST_CASE("unexpected errors stop the run with their code") {
  const RunResult r = run_doc(with_steps(Json::parse(R"([
    {"op": "boot"}, {"op": "publish", "message": "purchase-order"}, {"op": "init"}])")));
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == static_cast<int>(ErrorCode::PhaseError));
  CHECK(r.transcript["steps"].size() == 2);

  // a wrong readable set is an expectation failure, not an error
  const RunResult f = run_doc(with_steps(setup_plus(
      {{{"op", "publish"}, {"message", "purchase-order"}},
       {{"op", "request-key"}, {"reader", "national-supplier"}, {"scheme", "channel"}},
       {{"op", "fetch"}, {"reader", "national-supplier"}, {"message", "purchase-order"},
        {"expect_readable", {"order"}}}})));
  CHECK(f.exit_code == kExpectationFailed);
  CHECK(f.transcript["steps"].size() == 7);
}

TEST_CASE("transaction counts follow the protocol structure") {
  const RunResult empty = run_doc(with_steps(Json::array()));
  for (const auto& [phase, n] : empty.transcript["transactions"].items()) CHECK(n == 0);

  const RunResult r = run_doc(with_steps(setup_plus(
      {{{"op", "request-key"}, {"reader", "manufacturer"}, {"scheme", "onchain"}}})));
  REQUIRE(r.ok);
  const Json& tx = r.transcript["transactions"];
  CHECK(tx["init"] == 9);
  CHECK(tx["certify"] == 1);
  // six RSA key posts, then one request and one delivery per authority
  CHECK(tx["key_requests"] == 6 + 2 * 3);
  CHECK(tx["publish"] == 0);

  const RunResult ch = run_doc(with_steps(setup_plus(
      {{{"op", "request-key"}, {"reader", "manufacturer"}, {"scheme", "channel"}}})));
  CHECK(ch.transcript["transactions"]["key_requests"] == 6);
}

TEST_CASE("world session round-trips wallets, ids and clock") {
  const Scenario sc = Scenario::load(kRoot / "scenarios/running_example.json");
  datastore::MemoryStore store;
  ledger::Ledger ledger;
  World w(sc, ledger, store);
  w.boot();
  w.init();
  w.certify();
  w.publish("purchase-order");
  w.request_key("manufacturer", actors::Scheme::Channel);
  const Json session = w.session();

  ledger::Ledger replayed = ledger::Ledger::replay(ledger.export_ndjson());
  World again(sc, replayed, store);
  again.load_session(session);
  again.restore_authorities();
  CHECK(again.message_id("purchase-order") == w.message_id("purchase-order"));
  CHECK(again.wallet("manufacturer").size() == w.wallet("manufacturer").size());
  CHECK(again.fetch("manufacturer", "purchase-order").slices[0].fields.has_value());
  // the next process draws fresh randomness rather than repeating the last one
  again.publish("customs-clearance");
  CHECK(again.message_id("customs-clearance") != w.message_id("purchase-order"));
  again.request_key("national-customs", actors::Scheme::Onchain);
  CHECK(again.fetch("national-customs", "customs-clearance").slices[0].fields.has_value());

  World other_seed(sc, replayed, store, 99);
  CHECK_THROWS_AS(other_seed.load_session(session), Error);
}

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "martsia/maabe/lsss.hpp"
#include "martsia/scenario/scenario.hpp"
#include "support/abe_fixture.hpp"
#include "support/keys.hpp"
#include "support/random_policy.hpp"
#include "support/running_example.hpp"
#include "support/world.hpp"

using namespace martsia;
namespace rex = martsia::testing::running_example;

namespace {

// Pinned trial counts and limits.
constexpr double kMatrixSeconds = 60.0;
constexpr int kCorrectnessTrials = 200;
constexpr std::size_t kCorrectnessLeaves = 6;
constexpr int kCollusionTrials = 100;
constexpr int kLsssPolicies = 500;
constexpr std::size_t kLsssLeaves = 8;
constexpr int kCoinTossTrials = 100;
constexpr int kThresholdRepeats = 10;
constexpr int kTamperTrials = 100;
constexpr int kExtraCorpusMessages = 12;

const std::filesystem::path kRoot = MARTSIA_SOURCE_DIR;

struct Verdict {
  bool pass;
  std::string detail;
};

using Matrix = std::map<std::string, std::set<std::string>>;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::map<std::string, std::string> publish_running_example(testing::World& w) {
  std::map<std::string, std::string> ids;
  for (const auto& m : rex::messages()) {
    ids[m.name] = actors::owner_publish(w.env, w[m.sender], rex::kCaseId, m.plans);
  }
  return ids;
}

Verdict matrix_criterion() {
  const auto start = std::chrono::steady_clock::now();
  datastore::MemoryStore store;
  const auto r = scenario::run(scenario::Scenario::load(kRoot / "scenarios/running_example.json"), store);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const Matrix expected = rex::expected_access();
  std::size_t cells = 0, wrong = 0;
  int matrices = 0;
  for (const auto& st : r.transcript["steps"]) {
    if (st["op"] != "access-matrix") continue;
    ++matrices;
    Matrix got;
    for (const auto& [cell, readers] : st["result"]["cells"].items()) {
      for (const auto& x : readers) got[cell].insert(x.get<std::string>());
    }
    for (const auto& [cell, readers] : expected) {
      for (const auto& reader : rex::readers()) {
        ++cells;
        if (readers.contains(reader.label) != (got.contains(cell) && got[cell].contains(reader.label))) ++wrong;
      }
    }
    if (got.size() != expected.size()) ++wrong;
  }
  const bool pass = r.ok && matrices == 2 && wrong == 0 && secs < kMatrixSeconds;
  return {pass, fmt("%d schemes, %zu (reader, slice) cells, %zu mismatches, %.1f s (limit %.0f s)", matrices, cells,
                    wrong, secs, kMatrixSeconds)};
}

/// A maximal unauthorized subset of `universe`: adding any missing literal satisfies `f`.
policy::LiteralSet maximal_unauthorized(const policy::Formula& f, const policy::LiteralSet& universe,
                                        crypto::Rng& rng) {
  std::vector<policy::AttributeLiteral> order(universe.begin(), universe.end());
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform(i)]);
  policy::LiteralSet s;
  for (const auto& lit : order) {
    s.insert(lit);
    if (policy::satisfied(f, s)) s.erase(lit);
  }
  return s;
}

Verdict correctness_criterion() {
  testing::AbeFixture fx({"A", "B", "C"}, 201);
  crypto::Rng rng = crypto::Rng::from_seed(202);
  int authorized = 0, refused = 0;
  for (int t = 0; t < kCorrectnessTrials; ++t) {
    const policy::Formula f = testing::random_formula(rng, fx.pp.universes.authorities, kCorrectnessLeaves);
    const auto ct_m = group::random_gt(rng);
    const auto ct = maabe::encrypt(fx.pp, ct_m, policy::compile_lsss(f), fx.public_keys, rng);
    const auto universe = policy::formula_literals(f);
    const std::string gid = fmt("%040x", t);
    if (fx.decrypts(ct, fx.bundle(gid, universe, rng), ct_m)) ++authorized;
    if (!fx.decrypts(ct, fx.bundle(gid, maximal_unauthorized(f, universe, rng), rng), ct_m)) ++refused;
  }
  return {authorized == kCorrectnessTrials && refused == kCorrectnessTrials,
          fmt("authorized %d/%d decrypt, maximal-unauthorized %d/%d refused", authorized, kCorrectnessTrials, refused,
              kCorrectnessTrials)};
}

Verdict collusion_criterion() {
  testing::AbeFixture fx({"A", "B"}, 301);
  crypto::Rng rng = crypto::Rng::from_seed(302);
  int successes = 0, rejected_mixed = 0;
  const auto s = policy::compile_policy("x@A and y@B", fx.pp.universes.authorities);
  for (int t = 0; t < kCollusionTrials; ++t) {
    const auto m = group::random_gt(rng);
    const auto ct = maabe::encrypt(fx.pp, m, s, fx.public_keys, rng);
    const std::string g1 = fmt("%040x", 2 * t), g2 = fmt("%040x", 2 * t + 1);
    auto pooled = fx.bundle(g1, {{"x", "A"}}, rng);
    pooled.push_back(fx.bundle(g2, {{"y", "B"}}, rng).front());
    try {
      if (maabe::decrypt(fx.pp, ct, pooled) == m) ++successes;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MixedGid) ++rejected_mixed;
    }
    // relabelled so the gid check passes; the pairing still cancels nothing
    pooled.back().gid = g1;
    if (fx.decrypts(ct, pooled, m)) ++successes;
  }
  return {successes == 0, fmt("%d successful decryptions over %d trials (two attempts each); %d rejected as mixed-gid",
                              successes, kCollusionTrials, rejected_mixed)};
}

Verdict lsss_criterion() {
  crypto::Rng rng = crypto::Rng::from_seed(401);
  std::size_t discrepancies = 0, subsets = 0;
  for (int t = 0; t < kLsssPolicies; ++t) {
    const auto auths = testing::authority_names(1 + rng.uniform(4));
    const policy::Formula f = testing::random_formula(rng, auths, kLsssLeaves);
    const auto s = policy::compile_lsss(f);
    for (const auto& subset : testing::all_subsets(policy::formula_literals(f))) {
      ++subsets;
      if (maabe::lsss_reconstruct(s, s.rows_for(subset)).has_value() != policy::satisfied(f, subset)) {
        ++discrepancies;
      }
    }
  }
  return {discrepancies == 0,
          fmt("%d policies, %zu subsets, %zu discrepancies", kLsssPolicies, subsets, discrepancies)};
}

Verdict coin_toss_criterion() {
  int attributed = 0, honest_agree = 0;
  const std::vector<std::string> ids{"A", "B", "C"};
  for (int t = 0; t < kCoinTossTrials; ++t) {
    {
      testing::World w(5000 + t);
      w.boot();
      const std::string bad = ids[t % 3];
      w.node(bad).faults().dishonest_opening = true;
      try {
        w.init();
      } catch (const actors::InitAborted& e) {
        if (e.culprit() == w.node(bad).identity().address() &&
            w.ledger.flagged_authorities() == std::set<ledger::Address>{e.culprit()}) {
          ++attributed;
        }
      }
    }
    testing::World w(6000 + t);
    w.boot();
    const auto r = w.init();
    bool same = r.digests.size() == ids.size();
    for (const auto& [id, d] : r.digests) same = same && d == r.pp.digest();
    for (const auto& n : w.nodes) same = same && n->params().digest() == r.pp.digest();
    if (same) ++honest_agree;
  }
  return {attributed == kCoinTossTrials && honest_agree == kCoinTossTrials,
          fmt("dishonest: %d/%d aborted with culprit named; honest: %d/%d identical digests", attributed,
              kCoinTossTrials, honest_agree, kCoinTossTrials)};
}

Verdict governance_criterion() {
  using testing::Party;
  int cases = 0, wrong = 0;
  for (const std::size_t n : {1u, 3u, 4u, 5u}) {
    for (std::size_t k = 1; k <= n; ++k) {
      ++cases;
      ledger::Ledger l;
      std::vector<std::unique_ptr<Party>> certs;
      ledger::Json addrs = ledger::Json::array();
      for (std::size_t i = 0; i < n; ++i) {
        certs.push_back(std::make_unique<Party>(fmt("gov-%zu-%zu", n, i)));
        addrs.push_back(certs.back()->address);
        testing::register_account(l, *certs.back());
      }
      const Party target("gov-target");
      testing::register_account(l, target);
      auto signers = [&](std::size_t count) {
        std::vector<const Party*> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(certs[i].get());
        return out;
      };
      const bool enough = k >= ledger::majority(n);
      auto expect = [&](const ledger::Receipt& r) {
        if (r.accepted != enough || (!enough && r.code != ErrorCode::MajorityMissing)) ++wrong;
      };
      const auto h0 = l.state_hash();
      expect(testing::send(l, *certs[0], ledger::contract::kSystem, "deploy", {{"certifiers", addrs}}, signers(k)));
      if (!enough) {
        if (l.state_hash() != h0) ++wrong;
        testing::send(l, *certs[0], ledger::contract::kSystem, "deploy", {{"certifiers", addrs}}, signers(n));
      }
      const ledger::Json grant = {{"target", target.address}, {"role", "Reader"}};
      expect(testing::send(l, *certs[0], ledger::contract::kSystem, "assign_role", grant, signers(k)));
      if (l.has_role(target.address, ledger::Role::Reader) != enough) ++wrong;
      if (!enough) testing::send(l, *certs[0], ledger::contract::kSystem, "assign_role", grant, signers(n));
      expect(testing::send(l, *certs[0], ledger::contract::kSystem, "revoke_role", grant, signers(k)));
      if (l.has_role(target.address, ledger::Role::Reader) == enough) ++wrong;
    }
  }
  return {wrong == 0, fmt("N in {1,3,4,5}: %d signer counts x deploy/assign/revoke, %d wrong outcomes", cases, wrong)};
}

Verdict threshold_criterion() {
  testing::AbeFixture fx({"A", "B", "C"}, 701);
  crypto::Rng rng = crypto::Rng::from_seed(702);
  const std::vector<std::string> auths = fx.pp.universes.authorities;
  int checks = 0, wrong = 0;
  for (const std::string text : {"x@2+", "x@2+ and y@1+", "x@2+ or y@3+"}) {
    const auto s = policy::compile_policy(text, auths);
    for (int rep = 0; rep < kThresholdRepeats; ++rep) {
      const auto m = group::random_gt(rng);
      const auto ct = maabe::encrypt(fx.pp, m, s, fx.public_keys, rng);
      for (unsigned mask = 1; mask < 8; ++mask) {
        policy::LiteralSet owned;
        std::size_t count = 0;
        for (std::size_t i = 0; i < 3; ++i) {
          if (mask >> i & 1) {
            ++count;
            owned.insert({"x", auths[i]});
            owned.insert({"y", auths[i]});
          }
        }
        ++checks;
        if (fx.decrypts(ct, fx.bundle(fmt("%040x", mask), owned, rng), m) != (count >= 2)) ++wrong;
      }
    }
  }
  return {wrong == 0, fmt("%d bundles over all authority subsets, %d wrong outcomes", checks, wrong)};
}

Verdict integrity_criterion() {
  testing::World w(801);
  rex::populate(w);
  w.setup();
  const auto ids = publish_running_example(w);
  const auto bundle = w.bundle("international-supplier");  // reads all four slices
  crypto::Rng rng = crypto::Rng::from_seed(802);

  int store_hits = 0, slice_hits = 0;
  const std::string id = ids.at("export-document");
  const auto rloc = *w.ledger.message_rloc(id);
  const Bytes pristine = w.store.get(rloc);
  const auto envelope = envelope::MessageEnvelope::from_json(to_string(pristine));
  const auto setup = actors::load_public_setup(w.env);
  auto shares = bundle.shares;

  for (int t = 0; t < kTamperTrials; ++t) {
    // stored bytes, read back through the ledger locator
    datastore::MemoryStore copy;
    copy.put(pristine);
    const std::size_t offset = rng.uniform(pristine.size());
    const auto mask = static_cast<std::uint8_t>(1 + rng.uniform(255));
    copy.tamper(rloc, offset, mask);
    actors::Environment env{w.ledger, copy};
    try {
      actors::reader_fetch(env, bundle, id);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IntegrityFailure) ++store_hits;
    }

    // one byte of an authenticated slice body or nonce
    auto slice = envelope.slices[rng.uniform(envelope.slices.size())];
    const std::size_t body = slice.body.ciphertext.size() + slice.body.nonce.size();
    const std::size_t at = rng.uniform(body);
    if (at < slice.body.ciphertext.size()) {
      slice.body.ciphertext[at] ^= mask;
    } else {
      slice.body.nonce[at - slice.body.ciphertext.size()] ^= mask;
    }
    try {
      envelope::open_slice(setup.pp, envelope.metadata, slice, shares);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IntegrityFailure) ++slice_hits;
    }
  }

  const auto replayed = ledger::Ledger::replay(w.ledger.export_ndjson());
  const bool replay_same = replayed.state_hash() == w.ledger.state_hash() &&
                           replayed.receipts().size() == w.ledger.receipts().size();
  // a log that also carries rejected transactions
  testing::World bad(803);
  try {
    actors::run_system_boot(bad.env, bad.certifiers(), bad.assignments(), std::vector{bad.certifiers()[0]});
  } catch (const Error&) {
  }
  bad.boot();
  const bool replay_rejected = ledger::Ledger::replay(bad.ledger.export_ndjson()).state_hash() == bad.ledger.state_hash();

  return {store_hits == kTamperTrials && slice_hits == kTamperTrials && replay_same && replay_rejected,
          fmt("stored-envelope tampers %d/%d, slice-body tampers %d/%d integrity-failure; replay hash %s, with "
              "rejections %s",
              store_hits, kTamperTrials, slice_hits, kTamperTrials, replay_same ? "equal" : "DIFFERS",
              replay_rejected ? "equal" : "DIFFERS")};
}

Verdict scheme_equivalence_criterion() {
  testing::World w(901);
  rex::populate(w);
  w.setup();
  auto ids = publish_running_example(w);
  crypto::Rng rng = crypto::Rng::from_seed(902);
  const std::vector<std::string> attrs{"Manufacturer", "Supplier", "International", "National",
                                       "Customs",      "Carrier",  "43175279"};
  for (int i = 0; i < kExtraCorpusMessages; ++i) {
    std::vector<envelope::SlicePlan> plans;
    for (int s = 0; s < 2; ++s) {
      std::string text = testing::random_policy_text(rng, {"A", "B", "C"}, 4, attrs.size());
      for (std::size_t a = attrs.size(); a-- > 0;) {
        const std::string from = "a" + std::to_string(a) + "@";
        for (std::size_t p; (p = text.find(from)) != std::string::npos;) text.replace(p, from.size(), attrs[a] + "@");
      }
      plans.push_back({text, {{"n", std::to_string(i)}}});
    }
    ids[fmt("random-%02d", i)] = actors::owner_publish(w.env, w["manufacturer"], rex::kCaseId, plans);
  }

  std::size_t readers = 0, differing = 0, readable = 0;
  for (const auto& r : rex::readers()) {
    ++readers;
    const auto channel = w.bundle(r.label, actors::Scheme::Channel);
    const auto onchain = w.bundle(r.label, actors::Scheme::Onchain);
    for (const auto& [name, id] : ids) {
      const auto a = actors::reader_fetch(w.env, channel, id);
      const auto b = actors::reader_fetch(w.env, onchain, id);
      for (std::size_t i = 0; i < a.slices.size(); ++i) {
        readable += a.slices[i].fields.has_value();
        if (a.slices[i].fields != b.slices[i].fields) ++differing;
      }
    }
  }
  return {differing == 0, fmt("%zu readers x %zu messages, %zu readable slices, %zu differing", readers, ids.size(),
                              readable, differing)};
}

Verdict transaction_count_criterion() {
  const auto sc = scenario::Scenario::load(kRoot / "scenarios/running_example.json");
  datastore::MemoryStore store;
  const auto r = scenario::run(sc, store);
  const auto& tx = r.transcript["transactions"];

  const std::size_t auths = sc.authorities.size();
  std::size_t roles = 0, rsa = 0, attributed = 0, onchain_requests = 0;
  for (const auto& a : sc.actors) {
    roles += a.roles.size();
    rsa += 1;  // every declared actor is a reader or owner here
    attributed += !a.attributes.empty();
  }
  for (const auto& st : sc.steps) {
    if (st.op == "request-key" && st.args["scheme"] == "onchain") onchain_requests += 1;
    if (st.op == "access-matrix" && st.args.value("scheme", "") == "onchain") onchain_requests += attributed;
  }
  const std::size_t accounts = sc.certifiers.size() + auths + sc.actors.size();
  const std::map<std::string, std::size_t> expected = {
      {"boot", accounts + 1 + auths + roles},
      {"init", 3 * auths},
      {"certify", 1},
      {"key_requests", rsa + 2 * auths * onchain_requests},
      {"publish", sc.messages.size()},
  };
  std::string detail;
  bool pass = r.ok;
  for (const auto& [phase, n] : expected) {
    const auto got = tx[phase].get<std::size_t>();
    pass = pass && got == n;
    detail += fmt("%s %zu/%zu ", phase.c_str(), got, n);
  }

  datastore::MemoryStore empty_store;
  scenario::Scenario empty = sc;
  empty.steps.clear();
  const auto e = scenario::run(empty, empty_store);
  pass = pass && e.transcript["transactions"]["total"] == 0;
  return {pass, detail + "(observed/derived); empty run total " + e.transcript["transactions"]["total"].dump()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"running-example access matrix", matrix_criterion},
      {"MA-ABE correctness", correctness_criterion},
      {"collusion resistance", collusion_criterion},
      {"LSSS oracle equivalence", lsss_criterion},
      {"coin-toss robustness", coin_toss_criterion},
      {"governance thresholds", governance_criterion},
      {"threshold semantics", threshold_criterion},
      {"integrity and replay", integrity_criterion},
      {"scheme equivalence", scheme_equivalence_criterion},
      {"transaction-count structure", transaction_count_criterion},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

#include <algorithm>

#include "martsia/scenario/scenario.hpp"

namespace martsia::scenario {

namespace {

/// Outcome of one step: nullopt for success.
struct Outcome {
  std::optional<ErrorCode> error;
  std::string detail;
  Json result = Json::object();
  bool expectation_met = true;
};

std::vector<std::string> strings(const Json& args, const char* key) {
  std::vector<std::string> out;
  if (const auto it = args.find(key); it != args.end()) {
    for (const auto& v : *it) out.push_back(v.get<std::string>());
  }
  return out;
}

Json fetch_json(World& w, const std::string& message, const actors::FetchResult& r) {
  Json slices = Json::array();
  for (std::size_t i = 0; i < r.slices.size(); ++i) {
    const auto& s = r.slices[i];
    Json e = {{"slice", w.slice_name(message, i)}, {"readable", s.fields.has_value()}};
    if (s.fields) {
      Json fields = Json::object();
      for (const auto& [k, v] : *s.fields) fields[k] = v;
      e["fields"] = std::move(fields);
    } else {
      e["error"] = error_code_name(*s.error);
    }
    slices.push_back(std::move(e));
  }
  return slices;
}

Json matrix_json(const AccessMatrix& m) {
  Json out = Json::object();
  for (const auto& [cell, readers] : m) out[cell] = readers;
  return out;
}

std::optional<ErrorCode> slice_error(World& w, const actors::FetchResult& r, const std::string& message,
                                     const std::string& slice) {
  for (std::size_t i = 0; i < r.slices.size(); ++i) {
    if (w.slice_name(message, i) == slice) return r.slices[i].error;
  }
  throw Error(ErrorCode::NotFound, "no slice " + slice);
}

Outcome toggle(World& w, const Json& a) {
  Outcome o;
  const std::string kind = a["kind"].get<std::string>();
  auto& env = w.env();

  if (kind == "dishonest-opening") {
    auto& node = w.authority(a["authority"].get<std::string>());
    node.faults().dishonest_opening = true;
    try {
      w.init();
    } catch (const actors::InitAborted& e) {
      node.faults().dishonest_opening = false;
      o.result["culprit"] = e.culprit();
      o.result["culprit_is_toggled_authority"] = e.culprit() == node.identity().address();
      o.error = e.code();
      o.detail = e.what();
      if (e.culprit() != node.identity().address()) o.expectation_met = false;
      return o;
    }
    node.faults().dishonest_opening = false;
    return o;
  }

  if (kind == "withhold-share") {
    auto& node = w.authority(a["authority"].get<std::string>());
    const std::string reader = a["reader"].get<std::string>();
    const std::string message = a["message"].get<std::string>();
    node.faults().withhold_shares = true;
    const actors::KeyBundle bundle = w.bundle_over(reader, actors::Scheme::Channel);
    node.faults().withhold_shares = false;
    const auto r = actors::reader_fetch(env, bundle, w.message_id(message));
    o.result["slices"] = fetch_json(w, message, r);
    o.error = slice_error(w, r, message, a["slice"].get<std::string>());
    return o;
  }

  if (kind == "mixed-gid-collusion") {
    const auto readers = strings(a, "readers");
    const std::string message = a["message"].get<std::string>();
    std::vector<actors::DecryptionKeyShare> pooled = w.wallet(readers[0]);
    const auto& other = w.wallet(readers[1]);
    pooled.insert(pooled.end(), other.begin(), other.end());
    // Bypass bundle assembly as well: no slice may open from the pooled shares.
    const auto r = actors::reader_fetch(env, actors::KeyBundle{w.actor(readers[0]).gid(), pooled},
                                        w.message_id(message));
    o.result["slices"] = fetch_json(w, message, r);
    const bool breach = std::any_of(r.slices.begin(), r.slices.end(), [](const auto& s) { return s.fields.has_value(); });
    try {
      actors::assemble_fdk(pooled);
    } catch (const Error& e) {
      o.error = e.code();
      o.detail = e.what();
    }
    if (breach) {
      o.error.reset();
      o.detail = "pooled shares opened a slice";
    }
    return o;
  }

  if (kind == "tamper-envelope") {
    const std::string message = a["message"].get<std::string>();
    const auto rloc = env.ledger.message_rloc(w.message_id(message));
    if (!rloc) throw Error(ErrorCode::NotFound, "message not on the ledger");
    const auto offset = a["offset"].get<std::size_t>();
    if (offset >= env.store.get(*rloc).size()) throw Error(ErrorCode::InvalidArgument, "offset past end of envelope");
    env.store.tamper(*rloc, offset, 0x01);
    o.result["offset"] = offset;
    const std::string sender = w.scenario().find_message(message)->sender;
    w.fetch(sender, message);
    return o;
  }

  if (kind == "forged-authority") {
    auto& attacker = w.actor(a["actor"].get<std::string>());
    const std::string message = a["message"].get<std::string>();
    const actors::PublicSetup setup = actors::load_public_setup(env);
    std::set<std::string> attributes;
    for (const auto& actor : w.scenario().actors) attributes.insert(actor.attributes.begin(), actor.attributes.end());

    std::vector<actors::DecryptionKeyShare> forged;
    std::optional<maabe::AuthorityKeyPair> first;
    for (const auto& id : setup.pp.universes.authorities) {
      const auto keys = maabe::auth_setup(setup.pp, id, attacker.rng());
      if (!first) first = keys;
      for (const auto& attr : attributes) {
        forged.push_back(maabe::keygen(setup.pp, attacker.gid(), keys.secret_key, {attr, id}, attacker.rng()));
      }
    }
    const auto r = actors::reader_fetch(env, actors::assemble_fdk(forged), w.message_id(message));
    o.result["slices"] = fetch_json(w, message, r);
    const bool breach = std::any_of(r.slices.begin(), r.slices.end(), [](const auto& s) { return s.fields.has_value(); });

    const ledger::Rloc pk = env.store.put(first->public_key.serialize());
    const auto receipt = attacker.submit(env, ledger::contract::kAuthority, "publish",
                                         {{"metadata_rloc", pk}, {"params_rloc", pk}, {"pubkey_rloc", pk}});
    if (!receipt.accepted) {
      o.error = receipt.code;
      o.detail = receipt.message;
    }
    if (breach) {
      o.error.reset();
      o.detail = "forged shares opened a slice";
    }
    return o;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown toggle " + kind);
}

Outcome execute(World& w, const Step& step) {
  Outcome o;
  const Json& a = step.args;
  if (step.op == "boot") {
    w.boot(strings(a, "signers"));
  } else if (step.op == "init") {
    const auto r = w.init();
    o.result["params_digest"] = to_hex(r.pp.digest());
  } else if (step.op == "store-rsa-keys") {
    w.store_rsa_keys(strings(a, "actors"));
  } else if (step.op == "certify") {
    o.result["rloc"] = w.certify(strings(a, "signers"));
  } else if (step.op == "request-key") {
    const std::string reader = a["reader"].get<std::string>();
    const auto scheme = actors::parse_scheme(a["scheme"].get<std::string>());
    std::set<std::string> literals;
    for (const auto& s : w.request_key(reader, scheme, strings(a, "authorities"))) literals.insert(s.literal.to_string());
    o.result["shares"] = literals;
  } else if (step.op == "publish") {
    const std::string message = a["message"].get<std::string>();
    o.result["message_id"] = w.publish(message);
    o.result["rloc"] = *w.env().ledger.message_rloc(o.result["message_id"].get<std::string>());
  } else if (step.op == "fetch") {
    const std::string message = a["message"].get<std::string>();
    const auto r = w.fetch(a["reader"].get<std::string>(), message);
    o.result["slices"] = fetch_json(w, message, r);
    if (a.contains("expect_readable")) {
      std::set<std::string> expected, actual;
      for (const auto& s : strings(a, "expect_readable")) expected.insert(s);
      for (std::size_t i = 0; i < r.slices.size(); ++i) {
        if (r.slices[i].fields) actual.insert(w.slice_name(message, i));
      }
      o.expectation_met = expected == actual;
    }
  } else if (step.op == "access-matrix") {
    std::optional<actors::Scheme> scheme;
    if (a.contains("scheme")) scheme = actors::parse_scheme(a["scheme"].get<std::string>());
    const AccessMatrix m = w.access_matrix(scheme);
    o.result["cells"] = matrix_json(m);
    if (a.contains("expect_cells")) {
      AccessMatrix expected;
      for (const auto& [cell, readers] : a["expect_cells"].items()) {
        for (const auto& r : readers) expected[cell].insert(r.get<std::string>());
      }
      o.expectation_met = expected == m;
    }
  } else if (step.op == "clear-wallets") {
    w.clear_wallets();
  } else if (step.op == "toggle") {
    return toggle(w, a);
  } else {
    throw Error(ErrorCode::Malformed, "unknown step op '" + step.op + "'");
  }
  return o;
}

}  // namespace

RunResult run(const Scenario& scenario, datastore::ContentStore& store, std::optional<std::uint64_t> seed_override) {
  ledger::Ledger ledger;
  World w(scenario, ledger, store, seed_override);

  RunResult out;
  Json actors = Json::object();
  for (const auto& c : scenario.certifiers) actors[c] = w.actor(c).address();
  for (const auto& a : scenario.authorities) actors[a.label] = w.actor(a.label).address();
  for (const auto& a : scenario.actors) actors[a.label] = w.actor(a.label).address();

  Json steps = Json::array();
  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    const Step& step = scenario.steps[i];
    Outcome o;
    try {
      o = execute(w, step);
    } catch (const Error& e) {
      o.error = e.code();
      o.detail = e.what();
    }
    Json entry = {{"index", i}, {"op", step.op}};
    if (step.op == "toggle") entry["kind"] = step.args["kind"];
    entry["expect"] = step.expect ? Json(error_code_name(*step.expect)) : Json("ok");
    entry["observed"] = o.error ? Json(error_code_name(*o.error)) : Json("ok");
    if (!o.detail.empty()) entry["detail"] = o.detail;
    if (!o.result.empty()) entry["result"] = std::move(o.result);
    const bool ok = o.error == step.expect && o.expectation_met;
    entry["ok"] = ok;
    steps.push_back(std::move(entry));
    if (!ok) {
      out.ok = false;
      if (o.error && !step.expect) {
        out.exit_code = static_cast<int>(*o.error);
        break;
      }
      out.exit_code = kExpectationFailed;
    }
  }

  Json counts = Json::object();
  std::size_t total = 0;
  const auto per_phase = ledger.phase_counts();
  for (const auto p : ledger::kPhases) {
    const std::size_t n = per_phase.contains(p) ? per_phase.at(p) : 0;
    counts[std::string(ledger::phase_name(p))] = n;
    total += n;
  }
  counts["total"] = total;

  out.transcript = {{"scenario", scenario.name},
                    {"seed", w.seed()},
                    {"actors", actors},
                    {"steps", steps},
                    {"messages", w.message_ids()},
                    {"transactions", counts},
                    {"rejected_transactions", ledger.receipts().size() - total},
                    {"state_hash", to_hex(ledger.state_hash())},
                    {"ok", out.ok}};
  return out;
}

}  // namespace martsia::scenario

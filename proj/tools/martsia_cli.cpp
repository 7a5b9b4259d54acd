// Batch command-line surface. Stateful commands share an on-disk ledger log,
// a blob directory and a session file next to the ledger.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "martsia/scenario/scenario.hpp"

using namespace martsia;
namespace fs = std::filesystem;
using scenario::Json;

namespace {

struct Options {
  std::string store_dir = "martsia-store";
  std::string ledger_file = "martsia-ledger.ndjson";
  std::string roster;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
    out << text;
  }
  fs::rename(tmp, p);
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Ledger, store and roster reloaded for one command and saved afterwards.
class Workspace {
 public:
  explicit Workspace(const Options& o)
      : opts_(o),
        session_path_(o.ledger_file + ".session.json"),
        session_(load_session(session_path_)),
        ledger_(fs::exists(o.ledger_file) ? ledger::Ledger::replay(read_file(o.ledger_file)) : ledger::Ledger{}),
        store_(o.store_dir),
        world_(load_roster(o), ledger_, store_, o.seed ? o.seed : session_seed(session_)) {
    if (session_) world_.load_session(*session_);
    world_.restore_authorities();
  }

  void save() {
    write_file(opts_.ledger_file, ledger_.export_ndjson());
    write_file(session_path_, world_.session().dump(2) + "\n");
  }

  scenario::World& world() { return world_; }
  ledger::Ledger& ledger() { return ledger_; }

 private:
  static std::optional<Json> load_session(const fs::path& p) {
    if (!fs::exists(p)) return std::nullopt;
    Json s = Json::parse(read_file(p), nullptr, false);
    if (s.is_discarded()) throw Error(ErrorCode::Malformed, p.string() + " is not valid JSON");
    return s;
  }

  static std::optional<std::uint64_t> session_seed(const std::optional<Json>& s) {
    if (!s || !s->contains("seed")) return std::nullopt;
    return (*s)["seed"].get<std::uint64_t>();
  }

  static scenario::Scenario load_roster(const Options& o) {
    if (o.roster.empty()) throw Error(ErrorCode::InvalidArgument, "--scenario <roster.json> is required");
    return scenario::Scenario::load(o.roster);
  }

  Options opts_;
  fs::path session_path_;
  std::optional<Json> session_;
  ledger::Ledger ledger_;
  datastore::DirectoryStore store_;
  scenario::World world_;
};

void emit(const Options& o, const Json& j, const std::string& human) {
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

Json counts_json(const ledger::Ledger& l) {
  Json out = Json::object();
  std::size_t total = 0;
  const auto counts = l.phase_counts();
  for (const auto p : ledger::kPhases) {
    const std::size_t n = counts.contains(p) ? counts.at(p) : 0;
    out[std::string(ledger::phase_name(p))] = n;
    total += n;
  }
  out["total"] = total;
  return out;
}

std::string counts_text(const Json& counts) {
  std::ostringstream s;
  for (const auto& [phase, n] : counts.items()) s << "  " << std::left << std::setw(14) << phase << n << "\n";
  return s.str();
}

std::string matrix_text(const Json& cells) {
  std::ostringstream s;
  for (const auto& [cell, readers] : cells.items()) {
    s << "  " << std::left << std::setw(34) << cell;
    std::string sep;
    for (const auto& r : readers) {
      s << sep << r.get<std::string>();
      sep = ", ";
    }
    if (readers.empty()) s << "-";
    s << "\n";
  }
  return s.str();
}

int policy_check(const Options& o, const std::string& text, const std::string& authorities) {
  const auto ids = split(authorities);
  try {
    if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "--authorities must name at least one authority");
    const policy::PolicyAst ast = policy::parse(text);
    const policy::AccessStructure lsss = policy::compile_lsss(policy::expand(ast, ids));
    const Json j = {{"ok", true},
                    {"policy", policy::print(ast)},
                    {"literals", ast.literal_count()},
                    {"rows", lsss.rows()},
                    {"columns", lsss.width()}};
    std::ostringstream h;
    h << "ok: " << policy::print(ast) << "\n"
      << "  " << lsss.rows() << " rows x " << lsss.width() << " columns\n";
    emit(o, j, h.str());
    return 0;
  } catch (const policy::PolicyError& e) {
    const Json j = {{"ok", false}, {"error", error_code_name(e.code())}, {"position", e.position()},
                    {"message", e.what()}};
    std::ostringstream h;
    h << "error: " << e.what() << "\n  " << text << "\n  " << std::string(std::min(e.position(), text.size()), ' ')
      << "^\n";
    if (o.json) {
      std::cout << j.dump(2) << "\n";
    } else {
      std::cerr << h.str();
    }
    return static_cast<int>(e.code());
  }
}

std::string fetch_text(const scenario::World& w, const std::string& message, const actors::FetchResult& r) {
  std::ostringstream s;
  s << "message " << r.metadata.message_id << " case " << r.metadata.case_id << " from " << r.metadata.sender << "\n";
  for (std::size_t i = 0; i < r.slices.size(); ++i) {
    const auto& sl = r.slices[i];
    s << "  [" << w.slice_name(message, i) << "] ";
    if (sl.fields) {
      s << "readable\n";
      for (const auto& [k, v] : *sl.fields) s << "      " << k << " = " << v << "\n";
    } else {
      s << error_code_name(*sl.error) << "\n";
    }
  }
  return s.str();
}

int scenario_run(const Options& o, const std::string& file, const std::string& transcript_out) {
  const scenario::Scenario sc = scenario::Scenario::load(file);
  std::unique_ptr<datastore::ContentStore> store;
  if (o.store_dir.empty()) {
    store = std::make_unique<datastore::MemoryStore>();
  } else {
    store = std::make_unique<datastore::DirectoryStore>(o.store_dir);
  }
  const scenario::RunResult r = scenario::run(sc, *store, o.seed);
  const std::string text = r.transcript.dump(2) + "\n";
  if (!transcript_out.empty()) write_file(transcript_out, text);
  if (o.json) {
    std::cout << text;
    return r.exit_code;
  }

  std::ostringstream h;
  h << "scenario " << sc.name << " (seed " << r.transcript["seed"] << ")\n";
  for (const auto& st : r.transcript["steps"]) {
    std::string op = st["op"].get<std::string>();
    if (st.contains("kind")) op += " " + st["kind"].get<std::string>();
    h << "  " << (st["ok"].get<bool>() ? "ok  " : "FAIL") << " #" << std::left << std::setw(3) << st["index"].get<int>()
      << std::setw(30) << op << "expect " << std::setw(18) << st["expect"].get<std::string>() << "observed "
      << st["observed"].get<std::string>() << "\n";
  }
  for (const auto& st : r.transcript["steps"]) {
    if (st["op"] == "access-matrix" && st.contains("result")) {
      h << "access matrix (" << st["index"].get<int>() << "):\n" << matrix_text(st["result"]["cells"]);
    }
  }
  h << "transactions:\n" << counts_text(r.transcript["transactions"]);
  h << "state hash " << r.transcript["state_hash"].get<std::string>() << "\n";
  h << (r.ok ? "PASS" : "FAIL") << "\n";
  std::cout << h.str();
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"martsia: attribute-based access control over a ledger"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--store-dir", o.store_dir, "blob store directory");
  app.add_option("--ledger-file", o.ledger_file, "transaction log (NDJSON)");
  app.add_option("--scenario", o.roster, "scenario file declaring the roster and messages");
  app.add_option("--seed", o.seed, "override the roster seed");
  app.add_flag("--json", o.json, "machine-readable output");

  std::string signers;
  auto* boot = app.add_subcommand("boot", "deploy contracts and assign roles");
  boot->add_option("--signers", signers, "comma-separated certifier labels");
  auto* init = app.add_subcommand("init-authorities", "run the authority coin toss and publish parameters");
  auto* certify = app.add_subcommand("certify", "store and register the attribute file");
  certify->add_option("--signers", signers, "comma-separated certifier labels");

  std::string message;
  auto* publish = app.add_subcommand("publish", "seal and store a declared message");
  publish->add_option("message", message, "message name")->required();

  std::string reader, scheme, authorities;
  auto* request = app.add_subcommand("request-key", "obtain key shares for a reader");
  request->add_option("--reader", reader)->required();
  request->add_option("--scheme", scheme, "channel or onchain")->required()->check(CLI::IsMember({"channel", "onchain"}));
  request->add_option("--authorities", authorities, "comma-separated authority ids (default all)");

  auto* fetch = app.add_subcommand("fetch", "decrypt a message with the reader's wallet");
  fetch->add_option("--reader", reader)->required();
  fetch->add_option("message", message, "message name or id")->required();

  std::string policy_text;
  auto* policy = app.add_subcommand("policy", "policy tools");
  policy->require_subcommand(1);
  auto* check = policy->add_subcommand("check", "parse and compile a policy");
  check->add_option("policy", policy_text)->required();
  check->add_option("--authorities", authorities, "comma-separated authority ids")->required();

  auto* ledger_cmd = app.add_subcommand("ledger", "ledger inspection");
  ledger_cmd->require_subcommand(1);
  auto* dump = ledger_cmd->add_subcommand("dump", "print contract state");
  auto* report = ledger_cmd->add_subcommand("report", "print per-phase transaction counts");

  std::string scenario_file, transcript_out;
  auto* scen = app.add_subcommand("scenario", "scripted runs");
  scen->require_subcommand(1);
  auto* run = scen->add_subcommand("run", "execute a scenario on a fresh ledger");
  run->add_option("file", scenario_file)->required();
  run->add_option("--transcript", transcript_out, "also write the JSON transcript here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorCode::InvalidArgument);
  }

  try {
    if (*check) return policy_check(o, policy_text, authorities);
    if (*run) {
      if (app.get_option("--store-dir")->count() == 0) o.store_dir.clear();
      return scenario_run(o, scenario_file, transcript_out);
    }

    Workspace ws(o);
    auto& w = ws.world();
    int code = 0;
    if (*boot) {
      w.boot(split(signers));
      emit(o, {{"ok", true}}, "booted\n");
    } else if (*init) {
      try {
        const auto r = w.init();
        const std::string digest = to_hex(r.pp.digest());
        emit(o, {{"ok", true}, {"params_digest", digest}}, "authorities initialized, params " + digest + "\n");
      } catch (const actors::InitAborted& e) {
        emit(o, {{"ok", false}, {"error", error_code_name(e.code())}, {"culprit", e.culprit()}},
             std::string("init aborted: ") + e.what() + "\n");
        code = static_cast<int>(e.code());
      }
    } else if (*certify) {
      const auto rloc = w.certify(split(signers));
      emit(o, {{"ok", true}, {"rloc", rloc}}, "attributes certified at " + rloc + "\n");
    } else if (*publish) {
      const std::string id = w.publish(message);
      emit(o, {{"ok", true}, {"message", message}, {"message_id", id}}, "published " + message + " as " + id + "\n");
    } else if (*request) {
      const auto shares = w.request_key(reader, actors::parse_scheme(scheme), split(authorities));
      Json lits = Json::array();
      std::string h = "received " + std::to_string(shares.size()) + " shares\n";
      for (const auto& s : shares) {
        lits.push_back(s.literal.to_string());
        h += "  " + s.literal.to_string() + "\n";
      }
      emit(o, {{"ok", true}, {"shares", lits}}, h);
    } else if (*fetch) {
      const auto r = w.fetch(reader, message);
      Json slices = Json::array();
      for (std::size_t i = 0; i < r.slices.size(); ++i) {
        Json e = {{"slice", w.slice_name(message, i)}, {"readable", r.slices[i].fields.has_value()}};
        if (r.slices[i].fields) {
          for (const auto& [k, v] : *r.slices[i].fields) e["fields"][k] = v;
        } else {
          e["error"] = error_code_name(*r.slices[i].error);
        }
        slices.push_back(std::move(e));
      }
      emit(o, {{"message_id", r.metadata.message_id}, {"slices", slices}}, fetch_text(w, message, r));
    } else if (*dump) {
      std::cout << ws.ledger().state().to_json().dump(2) << "\n";
    } else if (*report) {
      const Json counts = counts_json(ws.ledger());
      emit(o, counts, counts_text(counts));
    }
    ws.save();
    return code;
  } catch (const Error& e) {
    if (o.json) {
      std::cout << Json{{"ok", false}, {"error", error_code_name(e.code())}, {"message", e.what()}}.dump(2) << "\n";
    } else {
      std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    }
    return static_cast<int>(e.code());
  }
}

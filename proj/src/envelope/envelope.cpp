#include "martsia/envelope/envelope.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace martsia::envelope {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::Malformed, "malformed envelope: " + what);
}

const json& member(const json& obj, const char* key, json::value_t type) {
  if (!obj.is_object()) malformed("expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing '") + key + "'");
  if (it->type() != type) malformed(std::string("wrong type for '") + key + "'");
  return *it;
}

std::string string_member(const json& obj, const char* key) {
  return member(obj, key, json::value_t::string).get<std::string>();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      malformed("unexpected key '" + k + "'");
    }
  }
}

bool is_decimal(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Bytes encode_fields(const FieldMap& fields) {
  json obj = json::object();
  for (const auto& [k, v] : fields) obj[k] = v;
  return to_bytes(obj.dump());
}

void check_metadata(const MessageMetadata& m) {
  if (m.sender.empty()) throw Error(ErrorCode::InvalidArgument, "metadata sender is empty");
  if (!is_decimal(m.case_id)) throw Error(ErrorCode::InvalidArgument, "case id must be decimal");
  if (m.message_id.size() != 8 || !is_decimal(m.message_id)) {
    throw Error(ErrorCode::InvalidArgument, "message id must be eight decimal digits");
  }
}

}  // namespace

crypto::AeadKey derive_slice_key(const group::Gt& element) {
  return crypto::sha256(group::serialize(element));
}

std::string random_decimal_id(crypto::Rng& rng) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(rng.uniform(100000000)));
  return buf;
}

Bytes associated_data(const MessageMetadata& metadata, std::string_view slice_id) {
  Bytes ad;
  append_framed(ad, as_bytes(kFormatVersion));
  append_framed(ad, as_bytes(metadata.sender));
  append_framed(ad, as_bytes(metadata.case_id));
  append_framed(ad, as_bytes(metadata.message_id));
  append_framed(ad, as_bytes(slice_id));
  return ad;
}

SealedSlice seal_slice(const SealingKeys& keys, const MessageMetadata& metadata,
                       std::string slice_id, const policy::PolicyAst& policy,
                       const FieldMap& fields, crypto::Rng& rng) {
  if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "a slice needs at least one field");
  std::set<std::string> names;
  for (const auto& [k, v] : fields) {
    if (k.empty() || !names.insert(k).second) {
      throw Error(ErrorCode::InvalidArgument, "field names must be unique and non-empty");
    }
  }
  if (!slice_id.empty() && (slice_id.size() != 8 || !is_decimal(slice_id))) {
    throw Error(ErrorCode::InvalidArgument, "slice id must be eight decimal digits");
  }

  policy::AccessStructure structure =
      policy::compile_lsss(policy::expand(policy, keys.pp.universes.authorities));
  structure.policy_text = policy::print(policy);
  structure.authorities = keys.pp.universes.authorities;

  const group::Gt session = group::random_gt(rng);
  SealedSlice out;
  out.header.slice_id = std::move(slice_id);
  out.header.policy_text = structure.policy_text;
  for (const auto& [k, v] : fields) out.header.field_keys.push_back(k);
  out.header.wrapped_key = maabe::encrypt(keys.pp, session, structure, keys.authority_keys, rng);
  rng.fill(out.body.nonce);
  out.body.ciphertext = crypto::aead_seal(derive_slice_key(session), out.body.nonce,
                                          associated_data(metadata, out.header.slice_id),
                                          encode_fields(fields));
  return out;
}

FieldMap open_slice(const maabe::GlobalParams& pp, const MessageMetadata& metadata,
                    const SealedSlice& slice, const std::vector<maabe::DecryptionKeyShare>& shares) {
  const group::Gt session = maabe::decrypt(pp, slice.header.wrapped_key, shares);
  const auto plain =
      crypto::aead_open(derive_slice_key(session), slice.body.nonce,
                        associated_data(metadata, slice.header.slice_id), slice.body.ciphertext);
  if (!plain) throw Error(ErrorCode::IntegrityFailure, "slice body failed authentication");

  const json obj = json::parse(plain->begin(), plain->end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) malformed("slice payload is not a field map");
  if (obj.size() != slice.header.field_keys.size()) malformed("payload fields differ from header");
  FieldMap out;
  for (const auto& key : slice.header.field_keys) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) malformed("payload lacks field '" + key + "'");
    out.emplace_back(key, it->get<std::string>());
  }
  return out;
}

MessageEnvelope build_envelope(MessageMetadata metadata, std::vector<SealedSlice> slices) {
  check_metadata(metadata);
  if (slices.empty()) throw Error(ErrorCode::InvalidArgument, "an envelope needs at least one slice");
  std::set<std::string> ids;
  for (const auto& s : slices) {
    if (slices.size() == 1) {
      if (!s.header.slice_id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "single-slice messages carry no slice id");
      }
    } else if (s.header.slice_id.empty() || !ids.insert(s.header.slice_id).second) {
      throw Error(ErrorCode::InvalidArgument, "slice ids must be present and distinct");
    }
  }
  return {std::move(metadata), std::move(slices)};
}

MessageEnvelope seal_message(const SealingKeys& keys, MessageMetadata metadata,
                             const std::vector<SlicePlan>& plans, crypto::Rng& rng) {
  check_metadata(metadata);
  if (plans.empty()) throw Error(ErrorCode::InvalidArgument, "an envelope needs at least one slice");
  std::vector<std::string> ids(plans.size());
  if (plans.size() > 1) {
    std::set<std::string> used;
    for (auto& id : ids) {
      do {
        id = random_decimal_id(rng);
      } while (!used.insert(id).second);
    }
  }
  std::vector<SealedSlice> slices;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    slices.push_back(seal_slice(keys, metadata, ids[i], policy::parse(plans[i].policy_text),
                                plans[i].fields, rng));
  }
  return build_envelope(std::move(metadata), std::move(slices));
}

std::string MessageEnvelope::to_json() const {
  json doc;
  doc["version"] = kFormatVersion;
  doc["metadata"] = {{"sender", metadata.sender},
                     {"case_id", metadata.case_id},
                     {"message_id", metadata.message_id}};
  json list = json::array();
  for (const auto& s : slices) {
    json header = {{"wrapped_key", base64_encode(s.header.wrapped_key.serialize())},
                   {"field_keys", s.header.field_keys},
                   {"policy", s.header.policy_text}};
    if (!s.header.slice_id.empty()) header["slice_id"] = s.header.slice_id;
    list.push_back({{"header", header},
                    {"body",
                     {{"ciphertext", base64_encode(s.body.ciphertext)},
                      {"nonce", base64_encode(s.body.nonce)}}}});
  }
  doc["slices"] = std::move(list);
  return doc.dump();
}

MessageEnvelope MessageEnvelope::from_json(std::string_view text) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) malformed("not valid JSON");
  check_keys(doc, {"version", "metadata", "slices"});
  if (string_member(doc, "version") != kFormatVersion) malformed("unsupported version");

  const json& meta = member(doc, "metadata", json::value_t::object);
  check_keys(meta, {"sender", "case_id", "message_id"});
  MessageMetadata metadata{string_member(meta, "sender"), string_member(meta, "case_id"),
                           string_member(meta, "message_id")};

  std::vector<SealedSlice> slices;
  for (const json& entry : member(doc, "slices", json::value_t::array)) {
    check_keys(entry, {"header", "body"});
    const json& h = member(entry, "header", json::value_t::object);
    const json& b = member(entry, "body", json::value_t::object);
    check_keys(h, {"slice_id", "wrapped_key", "field_keys", "policy"});
    check_keys(b, {"ciphertext", "nonce"});
    SealedSlice s;
    if (h.contains("slice_id")) s.header.slice_id = string_member(h, "slice_id");
    s.header.wrapped_key =
        maabe::AbeCiphertext::deserialize(base64_decode(string_member(h, "wrapped_key")));
    for (const json& k : member(h, "field_keys", json::value_t::array)) {
      if (!k.is_string()) malformed("field key is not a string");
      s.header.field_keys.push_back(k.get<std::string>());
    }
    if (s.header.field_keys.empty()) malformed("slice without field keys");
    s.header.policy_text = string_member(h, "policy");
    s.body.ciphertext = base64_decode(string_member(b, "ciphertext"));
    const Bytes nonce = base64_decode(string_member(b, "nonce"));
    if (nonce.size() != s.body.nonce.size()) malformed("nonce must be 12 bytes");
    std::copy(nonce.begin(), nonce.end(), s.body.nonce.begin());
    slices.push_back(std::move(s));
  }
  try {
    return build_envelope(std::move(metadata), std::move(slices));
  } catch (const Error& e) {
    malformed(e.what());
  }
}

}  // namespace martsia::envelope

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "martsia/crypto/aead.hpp"
#include "martsia/crypto/rng.hpp"
#include "martsia/maabe/maabe.hpp"
#include "martsia/policy/policy.hpp"

namespace martsia::envelope {

inline constexpr std::string_view kFormatVersion = "martsia/1";
inline constexpr std::string_view kFileExtension = ".martsia.json";

/// Field name/value pairs in author order. Names are unique.
using FieldMap = std::vector<std::pair<std::string, std::string>>;

struct MessageMetadata {
  std::string sender;
  std::string case_id;
  std::string message_id;
  friend bool operator==(const MessageMetadata&, const MessageMetadata&) = default;
};

struct SliceHeader {
  std::string slice_id;  // empty for single-slice messages
  maabe::AbeCiphertext wrapped_key;
  std::vector<std::string> field_keys;
  std::string policy_text;
};

struct SliceBody {
  Bytes ciphertext;  // AES-256-GCM output including the tag
  crypto::AeadNonce nonce{};
};

struct SealedSlice {
  SliceHeader header;
  SliceBody body;
};

struct MessageEnvelope {
  MessageMetadata metadata;
  std::vector<SealedSlice> slices;

  /// Canonical JSON: sorted keys, no whitespace, base64 binary fields.
  std::string to_json() const;
  Bytes canonical_bytes() const { return to_bytes(to_json()); }
  static MessageEnvelope from_json(std::string_view text);
};

/// A slice to be sealed: its policy and plaintext fields.
struct SlicePlan {
  std::string policy_text;
  FieldMap fields;
};

/// Encryption context shared by every slice of one message.
struct SealingKeys {
  const maabe::GlobalParams& pp;
  const std::map<std::string, maabe::AuthorityPublicKey>& authority_keys;
};

crypto::AeadKey derive_slice_key(const group::Gt& element);

/// Eight random decimal digits.
std::string random_decimal_id(crypto::Rng& rng);

/// Associated data binding a slice body to its message and slice ids.
Bytes associated_data(const MessageMetadata& metadata, std::string_view slice_id);

/// `slice_id` must already be fixed because it is bound into the AEAD.
SealedSlice seal_slice(const SealingKeys& keys, const MessageMetadata& metadata,
                       std::string slice_id, const policy::PolicyAst& policy,
                       const FieldMap& fields, crypto::Rng& rng);

/// Throws Error(Unauthorized) when the shares do not satisfy the slice policy,
/// Error(MixedGid) for mixed-reader bundles, Error(IntegrityFailure) when the
/// body does not authenticate and Error(Malformed) for undecodable payloads.
FieldMap open_slice(const maabe::GlobalParams& pp, const MessageMetadata& metadata,
                    const SealedSlice& slice, const std::vector<maabe::DecryptionKeyShare>& shares);

/// Validates slice-id layout: absent for one slice, present and distinct
/// otherwise.
MessageEnvelope build_envelope(MessageMetadata metadata, std::vector<SealedSlice> slices);

/// Assigns distinct slice ids when there are two or more plans, seals every
/// slice, and builds the envelope.
MessageEnvelope seal_message(const SealingKeys& keys, MessageMetadata metadata,
                             const std::vector<SlicePlan>& plans, crypto::Rng& rng);

}  // namespace martsia::envelope

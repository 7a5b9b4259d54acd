#pragma once

#include <map>
#include <string>
#include <vector>

#include "martsia/maabe/maabe.hpp"

namespace martsia::testing {

struct AbeFixture {
  maabe::GlobalParams pp;
  std::map<std::string, maabe::AuthorityKeyPair> keys;
  std::map<std::string, maabe::AuthorityPublicKey> public_keys;

  explicit AbeFixture(std::vector<std::string> authorities, std::uint64_t seed = 1) {
    crypto::Rng rng = crypto::Rng::from_seed(seed);
    pp = maabe::global_setup(group::random_g1(rng), {std::move(authorities), {}, "test"});
    for (const auto& a : pp.universes.authorities) {
      keys.emplace(a, maabe::auth_setup(pp, a, rng));
      public_keys.emplace(a, keys.at(a).public_key);
    }
  }

  std::vector<maabe::DecryptionKeyShare> bundle(const std::string& gid,
                                                const policy::LiteralSet& literals,
                                                crypto::Rng& rng) const {
    std::vector<maabe::DecryptionKeyShare> out;
    for (const auto& lit : literals) {
      out.push_back(maabe::keygen(pp, gid, keys.at(lit.authority).secret_key, lit, rng));
    }
    return out;
  }

  /// True iff decrypt returns `m`; false on an unauthorized failure or a
  /// wrong plaintext.
  bool decrypts(const maabe::AbeCiphertext& ct, const std::vector<maabe::DecryptionKeyShare>& shares,
                const group::Gt& m) const {
    try {
      return maabe::decrypt(pp, ct, shares) == m;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unauthorized && e.code() != ErrorCode::MixedGid) throw;
      return false;
    }
  }
};

}  // namespace martsia::testing

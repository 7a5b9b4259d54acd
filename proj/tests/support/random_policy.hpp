#pragma once

#include <functional>
#include <string>
#include <vector>

#include "martsia/crypto/rng.hpp"
#include "martsia/policy/policy.hpp"

namespace martsia::testing {

inline std::vector<std::string> authority_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("Auth" + std::to_string(i + 1));
  return out;
}

/// Random policy text over attributes a0..a{pool-1}. Qualifiers are a named
/// authority or `@n+` with n <= |authorities|.
inline std::string random_policy_text(crypto::Rng& rng, const std::vector<std::string>& authorities,
                                      std::size_t max_literals, std::size_t pool = 4) {
  const std::size_t literals = 1 + rng.uniform(max_literals);
  std::function<std::string(std::size_t)> build = [&](std::size_t n) -> std::string {
    if (n == 1) {
      std::string lit = "a" + std::to_string(rng.uniform(pool)) + "@";
      if (rng.uniform(2) == 0) {
        lit += authorities[rng.uniform(authorities.size())];
      } else {
        lit += std::to_string(1 + rng.uniform(authorities.size())) + "+";
      }
      return lit;
    }
    const std::size_t left = 1 + rng.uniform(n - 1);
    const char* op = rng.uniform(2) == 0 ? " and " : " or ";
    return "(" + build(left) + op + build(n - left) + ")";
  };
  return build(literals);
}

/// Random formula whose expansion has at most `max_leaves` leaves.
inline policy::Formula random_formula(crypto::Rng& rng, const std::vector<std::string>& authorities,
                                      std::size_t max_leaves, std::string* text = nullptr) {
  for (;;) {
    const std::string t = random_policy_text(rng, authorities, max_leaves);
    policy::Formula f = policy::expand(policy::parse(t), authorities);
    if (f.leaf_count() <= max_leaves) {
      if (text) *text = t;
      return f;
    }
  }
}

/// All subsets of `universe`, enumerated by bitmask.
inline std::vector<policy::LiteralSet> all_subsets(const policy::LiteralSet& universe) {
  const std::vector<policy::AttributeLiteral> items(universe.begin(), universe.end());
  std::vector<policy::LiteralSet> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
    policy::LiteralSet s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (mask >> i & 1) s.insert(items[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace martsia::testing

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string_view>

#include "martsia/bytes.hpp"

namespace martsia::crypto {

/// ChaCha20 keystream generator. Seeded instances are replayable; `fork`
/// derives independent child streams by label, which is how per-actor
/// randomness is split from one scenario seed.
class Rng {
 public:
  using result_type = std::uint64_t;

  /// Deterministic stream keyed by SHA-256(seed).
  explicit Rng(ByteView seed);
  static Rng from_seed(std::uint64_t seed);
  static Rng from_os_entropy();

  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  ~Rng();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  /// Uniform in [0, bound), bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  Rng fork(std::string_view label) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace martsia::crypto

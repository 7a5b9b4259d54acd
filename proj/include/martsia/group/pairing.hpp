#pragma once

#include <span>
#include <utility>

#include "martsia/group/curve.hpp"
#include "martsia/group/tower.hpp"

namespace martsia::group {

/// Order-r subgroup of Fp12*, written multiplicatively.
class Gt {
 public:
  Gt() : v_(Fp12::one()) {}

  static Gt identity() { return Gt(); }
  /// Caller guarantees `v` lies in the order-r subgroup.
  static Gt from_unchecked(const Fp12& v) { return Gt(v); }

  bool is_identity() const { return v_.is_one(); }
  const Fp12& value() const { return v_; }

  friend Gt operator*(const Gt& a, const Gt& b) { return Gt(a.v_ * b.v_); }
  friend Gt operator/(const Gt& a, const Gt& b) { return Gt(a.v_ * b.v_.conjugate()); }
  Gt& operator*=(const Gt& b) { return *this = *this * b; }
  /// Unitary elements invert by conjugation.
  Gt inverse() const { return Gt(v_.conjugate()); }
  Gt pow(const Fr& e) const;

  friend bool operator==(const Gt& a, const Gt& b) { return a.v_ == b.v_; }

 private:
  explicit Gt(const Fp12& v) : v_(v) {}
  Fp12 v_;
};

/// Optimal ate pairing e: G1 x G2 -> Gt.
Gt pair(const G1& p, const G2& q);

/// Product of pairings sharing one Miller-loop accumulator and a single
/// final exponentiation.
Gt multi_pair(std::span<const std::pair<G1, G2>> terms);

/// Exposed for tests.
Fp12 miller_loop(std::span<const std::pair<G1, G2>> terms);
Fp12 final_exponentiation(const Fp12& f);

}  // namespace martsia::group

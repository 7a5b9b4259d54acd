#pragma once

#include <array>
#include <optional>
#include <span>

#include "martsia/group/field.hpp"

namespace martsia::group {

/// Fp[u] / (u^2 + 1)
struct Fp2 {
  Fp c0, c1;

  static Fp2 zero() { return {}; }
  static Fp2 one() { return {Fp::one(), Fp::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fp2&, const Fp2&) = default;

  friend Fp2 operator+(const Fp2& a, const Fp2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
  friend Fp2 operator-(const Fp2& a, const Fp2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
  Fp2 operator-() const { return {-c0, -c1}; }
  friend Fp2 operator*(const Fp2& a, const Fp2& b) {
    const Fp t0 = a.c0 * b.c0;
    const Fp t1 = a.c1 * b.c1;
    return {t0 - t1, (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1};
  }
  friend Fp2 operator*(const Fp2& a, const Fp& s) { return {a.c0 * s, a.c1 * s}; }
  Fp2& operator+=(const Fp2& b) { return *this = *this + b; }
  Fp2& operator-=(const Fp2& b) { return *this = *this - b; }
  Fp2& operator*=(const Fp2& b) { return *this = *this * b; }

  Fp2 square() const {
    const Fp prod = c0 * c1;
    return {(c0 + c1) * (c0 - c1), prod + prod};
  }
  Fp2 dbl() const { return {c0.dbl(), c1.dbl()}; }
  Fp2 conjugate() const { return {c0, -c1}; }
  /// Multiplication by the sextic non-residue xi = 1 + u.
  Fp2 mul_by_nonresidue() const { return {c0 - c1, c0 + c1}; }
  Fp2 inverse() const {
    const Fp inv = (c0.square() + c1.square()).inverse();
    return {c0 * inv, -(c1 * inv)};
  }
  Fp2 pow(std::span<const u64> exponent) const;
  std::optional<Fp2> sqrt() const;
  /// Ordering used for compressed-point sign bits: c1 first, then c0.
  bool is_lexicographically_largest() const {
    if (!c1.is_zero()) return c1.is_lexicographically_largest();
    return c0.is_lexicographically_largest();
  }
};

/// Fp2[v] / (v^3 - xi)
struct Fp6 {
  Fp2 c0, c1, c2;

  static Fp6 zero() { return {}; }
  static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  friend bool operator==(const Fp6&, const Fp6&) = default;

  friend Fp6 operator+(const Fp6& a, const Fp6& b) {
    return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2};
  }
  friend Fp6 operator-(const Fp6& a, const Fp6& b) {
    return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2};
  }
  Fp6 operator-() const { return {-c0, -c1, -c2}; }
  friend Fp6 operator*(const Fp6& a, const Fp6& b) {
    const Fp2 t0 = a.c0 * b.c0;
    const Fp2 t1 = a.c1 * b.c1;
    const Fp2 t2 = a.c2 * b.c2;
    return {
        t0 + ((a.c1 + a.c2) * (b.c1 + b.c2) - t1 - t2).mul_by_nonresidue(),
        (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1 + t2.mul_by_nonresidue(),
        (a.c0 + a.c2) * (b.c0 + b.c2) - t0 - t2 + t1,
    };
  }
  Fp6 square() const { return *this * *this; }
  /// Multiplication by v.
  Fp6 mul_by_v() const { return {c2.mul_by_nonresidue(), c0, c1}; }
  Fp6 inverse() const {
    const Fp2 a = c0.square() - (c1 * c2).mul_by_nonresidue();
    const Fp2 b = c2.square().mul_by_nonresidue() - c0 * c1;
    const Fp2 c = c1.square() - c0 * c2;
    const Fp2 f = c0 * a + (c2 * b + c1 * c).mul_by_nonresidue();
    const Fp2 inv = f.inverse();
    return {a * inv, b * inv, c * inv};
  }
};

/// Fp6[w] / (w^2 - v). As an Fp2 vector space the basis is w^k for k in
/// [0, 6), with c0 = (w^0, w^2, w^4) and c1 = (w^1, w^3, w^5).
struct Fp12 {
  Fp6 c0, c1;

  static Fp12 zero() { return {}; }
  static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

  bool is_one() const { return *this == one(); }
  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fp12&, const Fp12&) = default;

  friend Fp12 operator*(const Fp12& a, const Fp12& b) {
    const Fp6 t0 = a.c0 * b.c0;
    const Fp6 t1 = a.c1 * b.c1;
    return {t0 + t1.mul_by_v(), (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1};
  }
  Fp12& operator*=(const Fp12& b) { return *this = *this * b; }
  Fp12 square() const {
    const Fp6 prod = c0 * c1;
    const Fp6 t = (c0 + c1) * (c0 + c1.mul_by_v());
    return {t - prod - prod.mul_by_v(), prod + prod};
  }
  Fp12 conjugate() const { return {c0, -c1}; }
  Fp12 inverse() const {
    const Fp6 inv = (c0.square() - c1.square().mul_by_v()).inverse();
    return {c0 * inv, -(c1 * inv)};
  }
  Fp12 pow(std::span<const u64> exponent) const;
  /// x -> x^p
  Fp12 frobenius() const;

  std::array<Fp2, 6> coefficients() const {
    return {c0.c0, c1.c0, c0.c1, c1.c1, c0.c2, c1.c2};
  }
  static Fp12 from_coefficients(const std::array<Fp2, 6>& k) {
    return {{k[0], k[2], k[4]}, {k[1], k[3], k[5]}};
  }
};

}  // namespace martsia::group

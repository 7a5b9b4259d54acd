#pragma once

#include <array>
#include <optional>
#include <span>

#include "martsia/group/field.hpp"
#include "martsia/group/tower.hpp"

namespace martsia::group {

template <class F>
struct Affine {
  F x, y;
};

/// Short Weierstrass curve y^2 = x^3 + b in Jacobian coordinates.
/// `Params::b()` returns the curve constant; the identity has Z = 0.
template <class F, class Params>
class CurvePoint {
 public:
  using Field = F;

  CurvePoint() : x_(F::one()), y_(F::one()), z_(F::zero()) {}

  static CurvePoint identity() { return CurvePoint(); }
  static CurvePoint from_affine(const F& x, const F& y) { return CurvePoint(x, y, F::one()); }

  static bool affine_on_curve(const F& x, const F& y) {
    return y.square() == x.square() * x + Params::b();
  }

  bool is_identity() const { return z_.is_zero(); }

  bool is_on_curve() const {
    if (is_identity()) return true;
    // Y^2 = X^3 + b Z^6
    const F z2 = z_.square();
    const F z6 = z2.square() * z2;
    return y_.square() == x_.square() * x_ + Params::b() * z6;
  }

  /// nullopt for the identity.
  std::optional<Affine<F>> to_affine() const {
    if (is_identity()) return std::nullopt;
    const F zinv = z_.inverse();
    const F zinv2 = zinv.square();
    return Affine<F>{x_ * zinv2, y_ * zinv2 * zinv};
  }

  CurvePoint dbl() const {
    if (is_identity() || y_.is_zero()) return identity();
    const F a = x_.square();
    const F b = y_.square();
    const F c = b.square();
    const F d = ((x_ + b).square() - a - c).dbl();
    const F e = a.dbl() + a;
    const F f = e.square();
    CurvePoint r;
    r.x_ = f - d.dbl();
    r.y_ = e * (d - r.x_) - c.dbl().dbl().dbl();
    r.z_ = (y_ * z_).dbl();
    return r;
  }

  friend CurvePoint operator+(const CurvePoint& p, const CurvePoint& q) {
    if (p.is_identity()) return q;
    if (q.is_identity()) return p;
    const F z1z1 = p.z_.square();
    const F z2z2 = q.z_.square();
    const F u1 = p.x_ * z2z2;
    const F u2 = q.x_ * z1z1;
    const F s1 = p.y_ * q.z_ * z2z2;
    const F s2 = q.y_ * p.z_ * z1z1;
    const F h = u2 - u1;
    const F rr = (s2 - s1).dbl();
    if (h.is_zero()) {
      if (rr.is_zero()) return p.dbl();
      return identity();
    }
    const F i = h.dbl().square();
    const F j = h * i;
    const F v = u1 * i;
    CurvePoint r;
    r.x_ = rr.square() - j - v.dbl();
    r.y_ = rr * (v - r.x_) - (s1 * j).dbl();
    r.z_ = ((p.z_ + q.z_).square() - z1z1 - z2z2) * h;
    return r;
  }
  CurvePoint operator-() const {
    CurvePoint r = *this;
    r.y_ = -r.y_;
    return r;
  }
  friend CurvePoint operator-(const CurvePoint& p, const CurvePoint& q) { return p + (-q); }
  CurvePoint& operator+=(const CurvePoint& q) { return *this = *this + q; }

  /// Little-endian limb scalar, fixed 4-bit windows from the top.
  CurvePoint mul(std::span<const u64> scalar) const {
    std::array<CurvePoint, 16> table;
    table[1] = *this;
    for (std::size_t i = 2; i < 16; ++i) table[i] = table[i - 1] + *this;
    CurvePoint acc;
    for (std::size_t i = scalar.size(); i-- > 0;) {
      for (int shift = 60; shift >= 0; shift -= 4) {
        if (!acc.is_identity()) acc = acc.dbl().dbl().dbl().dbl();
        const unsigned nibble = (scalar[i] >> shift) & 15;
        if (nibble != 0) acc += table[nibble];
      }
    }
    return acc;
  }
  CurvePoint mul(const Fr& s) const {
    const auto limbs = s.to_canonical();
    return mul(std::span<const u64>(limbs));
  }
  friend CurvePoint operator*(const Fr& s, const CurvePoint& p) { return p.mul(s); }

  friend bool operator==(const CurvePoint& p, const CurvePoint& q) {
    if (p.is_identity() || q.is_identity()) return p.is_identity() == q.is_identity();
    const F z1z1 = p.z_.square();
    const F z2z2 = q.z_.square();
    if (!(p.x_ * z2z2 == q.x_ * z1z1)) return false;
    return p.y_ * z2z2 * q.z_ == q.y_ * z1z1 * p.z_;
  }

  const F& jacobian_x() const { return x_; }
  const F& jacobian_y() const { return y_; }
  const F& jacobian_z() const { return z_; }

 private:
  CurvePoint(const F& x, const F& y, const F& z) : x_(x), y_(y), z_(z) {}

  F x_, y_, z_;
};

struct G1CurveParams {
  static Fp b() { return Fp::from_u64(4); }
};
struct G2CurveParams {
  // 4 (1 + u)
  static Fp2 b() { return {Fp::from_u64(4), Fp::from_u64(4)}; }
};

/// E(Fp): y^2 = x^3 + 4, restricted to the order-r subgroup by construction.
using G1 = CurvePoint<Fp, G1CurveParams>;
/// The M-type sextic twist E'(Fp2): y^2 = x^3 + 4(1 + u).
using G2 = CurvePoint<Fp2, G2CurveParams>;

}  // namespace martsia::group

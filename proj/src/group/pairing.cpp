#include "martsia/group/pairing.hpp"

#include <array>
#include <vector>

#include "constants.hpp"

namespace martsia::group {
namespace {

// Lines are evaluated on the untwisted image and scaled by w^3 and an Fp2
// factor; both vanish under the final exponentiation. The resulting sparse
// element is a + b v + c v w.
Fp12 sparse_line(const Fp2& a, const Fp2& b, const Fp2& c) {
  return {{a, b, Fp2::zero()}, {Fp2::zero(), c, Fp2::zero()}};
}

struct LoopState {
  Fp xp, yp;        // affine G1 point
  Fp2 xq, yq;       // affine G2 point
  Fp2 tx, ty, tz;   // Jacobian accumulator T
};

// Tangent at T and T <- 2T.
Fp12 double_step(LoopState& s) {
  const Fp2 x2 = s.tx.square();
  const Fp2 y2 = s.ty.square();
  const Fp2 z2 = s.tz.square();
  const Fp2 three_x2 = x2.dbl() + x2;
  const Fp2 a = three_x2 * s.tx - y2.dbl();
  const Fp2 b = -(three_x2 * z2 * s.xp);
  const Fp2 c = (s.ty * z2 * s.tz).dbl() * s.yp;

  const Fp2 y4 = y2.square();
  const Fp2 d = ((s.tx + y2).square() - x2 - y4).dbl();
  const Fp2 f = three_x2.square();
  const Fp2 nx = f - d.dbl();
  const Fp2 ny = three_x2 * (d - nx) - y4.dbl().dbl().dbl();
  const Fp2 nz = (s.ty * s.tz).dbl();
  s.tx = nx;
  s.ty = ny;
  s.tz = nz;
  return sparse_line(a, b, c);
}

// Chord through T and Q and T <- T + Q.
Fp12 add_step(LoopState& s) {
  const Fp2 z2 = s.tz.square();
  const Fp2 z3 = z2 * s.tz;
  const Fp2 num = s.yq * z3 - s.ty;
  const Fp2 h = s.xq * z2 - s.tx;
  const Fp2 den = h * s.tz;
  const Fp12 line = sparse_line(num * s.xq - den * s.yq, -(num * s.xp), den * s.yp);

  // mixed addition, Q affine
  const Fp2 hh = h.square();
  const Fp2 i = hh.dbl().dbl();
  const Fp2 j = h * i;
  const Fp2 rr = num.dbl();
  const Fp2 v = s.tx * i;
  const Fp2 nx = rr.square() - j - v.dbl();
  const Fp2 ny = rr * (v - nx) - (s.ty * j).dbl();
  const Fp2 nz = (s.tz + h).square() - z2 - hh;
  s.tx = nx;
  s.ty = ny;
  s.tz = nz;
  return line;
}

}  // namespace

Fp12 miller_loop(std::span<const std::pair<G1, G2>> terms) {
  std::vector<LoopState> states;
  states.reserve(terms.size());
  for (const auto& [p, q] : terms) {
    const auto pa = p.to_affine();
    const auto qa = q.to_affine();
    if (!pa || !qa) continue;  // e(O, Q) = e(P, O) = 1
    states.push_back({pa->x, pa->y, qa->x, qa->y, qa->x, qa->y, Fp2::one()});
  }
  Fp12 f = Fp12::one();
  if (states.empty()) return f;

  constexpr u64 x = detail::kBlsX;
  int top = 63;
  while (((x >> top) & 1) == 0) --top;
  for (int bit = top - 1; bit >= 0; --bit) {
    f = f.square();
    for (auto& s : states) f *= double_step(s);
    if ((x >> bit) & 1) {
      for (auto& s : states) f *= add_step(s);
    }
  }
  // x < 0
  return f.conjugate();
}

Fp12 final_exponentiation(const Fp12& f) {
  // easy part: f^((p^6 - 1)(p^2 + 1))
  Fp12 g = f.conjugate() * f.inverse();
  g = g.frobenius().frobenius() * g;

  // hard part: simultaneous exponentiation over the base-p digits
  const auto& digits = detail::constants().hard_part_digits;
  std::array<Fp12, 4> bases;
  bases[0] = g;
  for (int i = 1; i < 4; ++i) bases[i] = bases[i - 1].frobenius();
  std::array<Fp12, 16> table;
  table[0] = Fp12::one();
  for (unsigned mask = 1; mask < 16; ++mask) {
    const unsigned low = mask & (~mask + 1);
    int idx = 0;
    while ((1u << idx) != low) ++idx;
    table[mask] = table[mask ^ low] * bases[idx];
  }
  std::size_t limbs = 0;
  for (const auto& d : digits) limbs = std::max(limbs, d.size());
  Fp12 acc = Fp12::one();
  for (std::size_t i = limbs; i-- > 0;) {
    for (int bit = 63; bit >= 0; --bit) {
      acc = acc.square();
      unsigned mask = 0;
      for (int k = 0; k < 4; ++k) {
        if (i < digits[k].size() && ((digits[k][i] >> bit) & 1)) mask |= 1u << k;
      }
      if (mask != 0) acc *= table[mask];
    }
  }
  return acc;
}

Gt multi_pair(std::span<const std::pair<G1, G2>> terms) {
  return Gt::from_unchecked(final_exponentiation(miller_loop(terms)));
}

Gt pair(const G1& p, const G2& q) {
  const std::pair<G1, G2> term{p, q};
  return multi_pair(std::span<const std::pair<G1, G2>>(&term, 1));
}

Gt Gt::pow(const Fr& e) const {
  const auto limbs = e.to_canonical();
  Gt r;
  r.v_ = v_.pow(limbs);
  return r;
}

}  // namespace martsia::group

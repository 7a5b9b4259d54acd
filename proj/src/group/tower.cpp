#include "martsia/group/tower.hpp"

#include "constants.hpp"

namespace martsia::group {

Fp2 Fp2::pow(std::span<const u64> exponent) const {
  Fp2 result = one();
  for (std::size_t i = exponent.size(); i-- > 0;) {
    for (int bit = 63; bit >= 0; --bit) {
      result = result.square();
      if ((exponent[i] >> bit) & 1) result *= *this;
    }
  }
  return result;
}

std::optional<Fp2> Fp2::sqrt() const {
  if (is_zero()) return zero();
  if (c1.is_zero()) {
    if (auto s = c0.sqrt()) return Fp2{*s, Fp::zero()};
    // c0 = -(t^2) = (t u)^2
    if (auto t = (-c0).sqrt()) return Fp2{Fp::zero(), *t};
    return std::nullopt;
  }
  const auto alpha = (c0.square() + c1.square()).sqrt();
  if (!alpha) return std::nullopt;
  const Fp half = Fp::from_u64(2).inverse();
  auto x0 = ((c0 + *alpha) * half).sqrt();
  if (!x0) x0 = ((c0 - *alpha) * half).sqrt();
  if (!x0) return std::nullopt;
  const Fp x1 = c1 * x0->dbl().inverse();
  const Fp2 root{*x0, x1};
  if (root.square() == *this) return root;
  return std::nullopt;
}

Fp12 Fp12::pow(std::span<const u64> exponent) const {
  std::array<Fp12, 16> table;
  table[0] = one();
  for (std::size_t i = 1; i < 16; ++i) table[i] = table[i - 1] * *this;
  Fp12 result = one();
  for (std::size_t i = exponent.size(); i-- > 0;) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      result = result.square().square().square().square();
      const unsigned nibble = (exponent[i] >> shift) & 15;
      if (nibble != 0) result *= table[nibble];
    }
  }
  return result;
}

Fp12 Fp12::frobenius() const {
  const auto& gamma = detail::constants().frobenius_gamma;
  auto k = coefficients();
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = k[i].conjugate() * gamma[i];
  return from_coefficients(k);
}

}  // namespace martsia::group

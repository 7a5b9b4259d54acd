#include "constants.hpp"

#include <gmpxx.h>

#include <stdexcept>

namespace martsia::group::detail {
namespace {

std::vector<u64> to_limbs(const mpz_class& v) {
  if (v < 0) throw std::logic_error("negative exponent");
  std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 63) / 64;
  std::vector<u64> out(count == 0 ? 1 : count, 0);
  std::size_t written = 0;
  mpz_export(out.data(), &written, -1, sizeof(u64), 0, 0, v.get_mpz_t());
  return out;
}

template <std::size_t N>
mpz_class from_limbs(const Limbs<N>& limbs) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), N, -1, sizeof(u64), 0, 0, limbs.data());
  return v;
}

Constants build() {
  Constants c;
  const mpz_class p = from_limbs(FpParams::kModulus);
  const mpz_class r = from_limbs(FrParams::kModulus);
  const mpz_class x = -mpz_class(kBlsX);

  c.p = to_limbs(p);
  c.r = to_limbs(r);
  c.p_minus_2 = to_limbs(p - 2);

  const Fp2 xi = Fp2::one().mul_by_nonresidue();
  for (int k = 0; k < 6; ++k) {
    const mpz_class e = mpz_class(k) * (p - 1) / 6;
    c.frobenius_gamma[k] = xi.pow(to_limbs(e));
  }

  const mpz_class p2 = p * p;
  const mpz_class num = p2 * p2 - p2 + 1;
  if (num % r != 0) throw std::logic_error("r does not divide the cyclotomic polynomial");
  mpz_class d = num / r;
  for (int i = 0; i < 4; ++i) {
    c.hard_part_digits[i] = to_limbs(mpz_class(d % p));
    d /= p;
  }
  if (d != 0) throw std::logic_error("hard-part exponent exceeds four base-p digits");

  const mpz_class h1 = (x - 1) * (x - 1) / 3;
  c.g1_cofactor = to_limbs(h1);

  mpz_class x2 = x * x, x3 = x2 * x, x4 = x3 * x, x6 = x4 * x2, x7 = x6 * x, x8 = x7 * x;
  const mpz_class h2num = x8 - 4 * x7 + 5 * x6 - 4 * x4 + 6 * x3 - 4 * x2 - 4 * x + 13;
  if (h2num % 9 != 0) throw std::logic_error("bad G2 cofactor");
  c.g2_cofactor = to_limbs(mpz_class(h2num / 9));
  return c;
}

}  // namespace

const Constants& constants() {
  static const Constants kConstants = build();
  return kConstants;
}

}  // namespace martsia::group::detail

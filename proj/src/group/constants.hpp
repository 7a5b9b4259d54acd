#pragma once

#include <array>
#include <vector>

#include "martsia/group/field.hpp"
#include "martsia/group/tower.hpp"

namespace martsia::group::detail {

/// Curve-derived exponents and Frobenius coefficients, computed once.
struct Constants {
  std::vector<u64> p;
  std::vector<u64> r;
  std::vector<u64> p_minus_2;
  /// xi^(k (p - 1) / 6), k = 0..5
  std::array<Fp2, 6> frobenius_gamma;
  /// (p^4 - p^2 + 1) / r written as d0 + d1 p + d2 p^2 + d3 p^3
  std::array<std::vector<u64>, 4> hard_part_digits;
  /// (x - 1)^2 / 3
  std::vector<u64> g1_cofactor;
  /// #E'(Fp2) / r
  std::vector<u64> g2_cofactor;
};

const Constants& constants();

/// |x| for the BLS parameter x = -0xd201000000010000.
inline constexpr u64 kBlsX = 0xd201000000010000ULL;

}  // namespace martsia::group::detail

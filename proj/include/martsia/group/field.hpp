#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace martsia::group {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

template <std::size_t N>
using Limbs = std::array<u64, N>;

namespace detail {

template <std::size_t N>
constexpr bool geq(const Limbs<N>& a, const Limbs<N>& b) {
  for (std::size_t i = N; i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

// a -= b, returns borrow
template <std::size_t N>
constexpr u64 sub_in_place(Limbs<N>& a, const Limbs<N>& b) {
  u64 borrow = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const u128 diff = static_cast<u128>(a[i]) - b[i] - borrow;
    a[i] = static_cast<u64>(diff);
    borrow = static_cast<u64>(diff >> 64) & 1;
  }
  return borrow;
}

// a += b, returns carry
template <std::size_t N>
constexpr u64 add_in_place(Limbs<N>& a, const Limbs<N>& b) {
  u64 carry = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const u128 sum = static_cast<u128>(a[i]) + b[i] + carry;
    a[i] = static_cast<u64>(sum);
    carry = static_cast<u64>(sum >> 64);
  }
  return carry;
}

template <std::size_t N>
constexpr Limbs<N> double_mod(Limbs<N> a, const Limbs<N>& m) {
  u64 top = a[N - 1] >> 63;
  for (std::size_t i = N - 1; i > 0; --i) a[i] = (a[i] << 1) | (a[i - 1] >> 63);
  a[0] <<= 1;
  if (top != 0 || geq(a, m)) sub_in_place(a, m);
  return a;
}

// 2^(64*N*k) mod m
template <std::size_t N>
constexpr Limbs<N> pow2_mod(const Limbs<N>& m, std::size_t bits) {
  Limbs<N> x{};
  x[0] = 1;
  for (std::size_t i = 0; i < bits; ++i) x = double_mod(x, m);
  return x;
}

constexpr u64 neg_inverse_64(u64 m0) {
  u64 x = 1;
  for (int i = 0; i < 7; ++i) x *= 2 - m0 * x;
  return ~x + 1;
}

template <std::size_t N>
constexpr std::size_t bit_length(const Limbs<N>& a) {
  for (std::size_t i = N; i-- > 0;) {
    if (a[i] != 0) {
      std::size_t bits = 64;
      while (((a[i] >> (bits - 1)) & 1) == 0) --bits;
      return i * 64 + bits;
    }
  }
  return 0;
}

}  // namespace detail

/// Prime field in Montgomery representation. `Params` supplies
/// `kLimbs`, `kBytes` and the little-endian `kModulus`.
template <class Params>
class PrimeField {
 public:
  static constexpr std::size_t kLimbs = Params::kLimbs;
  static constexpr std::size_t kBytes = Params::kBytes;
  using LimbArray = Limbs<kLimbs>;
  static constexpr LimbArray kModulus = Params::kModulus;
  static constexpr u64 kInv = detail::neg_inverse_64(kModulus[0]);
  static constexpr LimbArray kR = detail::pow2_mod(kModulus, 64 * kLimbs);
  static constexpr LimbArray kR2 = detail::pow2_mod(kModulus, 128 * kLimbs);
  static constexpr std::size_t kBits = detail::bit_length(kModulus);

  constexpr PrimeField() = default;

  static constexpr PrimeField zero() { return PrimeField(); }
  static constexpr PrimeField one() {
    PrimeField r;
    r.v_ = kR;
    return r;
  }
  static PrimeField from_u64(u64 x) {
    LimbArray a{};
    a[0] = x;
    return from_canonical_unchecked(a);
  }
  /// Requires a < modulus.
  static PrimeField from_canonical_unchecked(const LimbArray& a) {
    PrimeField r;
    r.v_ = mont_mul(a, kR2);
    return r;
  }
  static std::optional<PrimeField> from_canonical(const LimbArray& a) {
    if (detail::geq(a, kModulus)) return std::nullopt;
    return from_canonical_unchecked(a);
  }
  /// Big-endian, exactly kBytes long, value must be below the modulus.
  static std::optional<PrimeField> from_bytes(std::span<const std::uint8_t> in) {
    if (in.size() != kBytes) return std::nullopt;
    LimbArray a{};
    for (std::size_t i = 0; i < kBytes; ++i) {
      const std::size_t bit = (kBytes - 1 - i) * 8;
      a[bit / 64] |= static_cast<u64>(in[i]) << (bit % 64);
    }
    return from_canonical(a);
  }
  /// Interprets arbitrary-length big-endian bytes and reduces them.
  static PrimeField from_bytes_reduce(std::span<const std::uint8_t> in) {
    const PrimeField base = from_u64(256);
    PrimeField acc;
    for (std::uint8_t b : in) acc = acc * base + from_u64(b);
    return acc;
  }

  LimbArray to_canonical() const {
    LimbArray one{};
    one[0] = 1;
    return mont_mul(v_, one);
  }
  std::array<std::uint8_t, kBytes> to_bytes() const {
    const LimbArray a = to_canonical();
    std::array<std::uint8_t, kBytes> out{};
    for (std::size_t i = 0; i < kBytes; ++i) {
      const std::size_t bit = (kBytes - 1 - i) * 8;
      out[i] = static_cast<std::uint8_t>(a[bit / 64] >> (bit % 64));
    }
    return out;
  }
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (std::uint8_t b : to_bytes()) {
      s.push_back(kDigits[b >> 4]);
      s.push_back(kDigits[b & 15]);
    }
    return s;
  }

  bool is_zero() const { return v_ == LimbArray{}; }
  bool is_one() const { return v_ == kR; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.v_ == b.v_; }

  friend PrimeField operator+(PrimeField a, const PrimeField& b) {
    const u64 carry = detail::add_in_place(a.v_, b.v_);
    if (carry != 0 || detail::geq(a.v_, kModulus)) detail::sub_in_place(a.v_, kModulus);
    return a;
  }
  friend PrimeField operator-(PrimeField a, const PrimeField& b) {
    if (detail::sub_in_place(a.v_, b.v_) != 0) detail::add_in_place(a.v_, kModulus);
    return a;
  }
  PrimeField operator-() const { return PrimeField() - *this; }
  friend PrimeField operator*(const PrimeField& a, const PrimeField& b) {
    PrimeField r;
    r.v_ = mont_mul(a.v_, b.v_);
    return r;
  }
  PrimeField& operator+=(const PrimeField& b) { return *this = *this + b; }
  PrimeField& operator-=(const PrimeField& b) { return *this = *this - b; }
  PrimeField& operator*=(const PrimeField& b) { return *this = *this * b; }

  PrimeField square() const { return *this * *this; }
  PrimeField dbl() const { return *this + *this; }

  /// Exponent given as little-endian 64-bit limbs.
  PrimeField pow(std::span<const u64> exponent) const {
    PrimeField result = one();
    for (std::size_t i = exponent.size(); i-- > 0;) {
      for (int bit = 63; bit >= 0; --bit) {
        result = result.square();
        if ((exponent[i] >> bit) & 1) result *= *this;
      }
    }
    return result;
  }

  /// Zero maps to zero.
  PrimeField inverse() const {
    LimbArray e = kModulus;
    LimbArray two{};
    two[0] = 2;
    detail::sub_in_place(e, two);
    return pow(e);
  }

  /// Square root for moduli congruent to 3 mod 4.
  std::optional<PrimeField> sqrt() const {
    static_assert((Params::kModulus[0] & 3) == 3, "sqrt requires p = 3 mod 4");
    // (p + 1) / 4
    LimbArray e = kModulus;
    LimbArray one_limb{};
    one_limb[0] = 1;
    detail::add_in_place(e, one_limb);
    for (std::size_t i = 0; i < kLimbs; ++i) {
      e[i] = (e[i] >> 2) | (i + 1 < kLimbs ? e[i + 1] << 62 : 0);
    }
    PrimeField root = pow(e);
    if (root.square() == *this) return root;
    return std::nullopt;
  }

  /// The larger of {y, -y}, i.e. canonical value > (p - 1) / 2.
  bool is_lexicographically_largest() const {
    LimbArray half = kModulus;
    for (std::size_t i = 0; i < kLimbs; ++i) {
      half[i] = (half[i] >> 1) | (i + 1 < kLimbs ? half[i + 1] << 63 : 0);
    }
    const LimbArray c = to_canonical();
    return detail::geq(c, half) && c != half;
  }

 private:
  static LimbArray mont_mul(const LimbArray& a, const LimbArray& b) {
    constexpr std::size_t N = kLimbs;
    u64 t[N + 2] = {};
#pragma GCC unroll 8
    for (std::size_t i = 0; i < N; ++i) {
      u128 carry = 0;
#pragma GCC unroll 8
      for (std::size_t j = 0; j < N; ++j) {
        const u128 cur = static_cast<u128>(a[j]) * b[i] + t[j] + carry;
        t[j] = static_cast<u64>(cur);
        carry = cur >> 64;
      }
      u128 cur = static_cast<u128>(t[N]) + carry;
      t[N] = static_cast<u64>(cur);
      t[N + 1] = static_cast<u64>(cur >> 64);

      const u64 m = t[0] * kInv;
      cur = static_cast<u128>(m) * kModulus[0] + t[0];
      carry = cur >> 64;
#pragma GCC unroll 8
      for (std::size_t j = 1; j < N; ++j) {
        cur = static_cast<u128>(m) * kModulus[j] + t[j] + carry;
        t[j - 1] = static_cast<u64>(cur);
        carry = cur >> 64;
      }
      cur = static_cast<u128>(t[N]) + carry;
      t[N - 1] = static_cast<u64>(cur);
      t[N] = t[N + 1] + static_cast<u64>(cur >> 64);
    }
    LimbArray r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = t[i];
    if (t[N] != 0 || detail::geq(r, kModulus)) detail::sub_in_place(r, kModulus);
    return r;
  }

  LimbArray v_{};
};

struct FpParams {
  static constexpr std::size_t kLimbs = 6;
  static constexpr std::size_t kBytes = 48;
  // 0x1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab
  static constexpr Limbs<6> kModulus = {
      0xb9feffffffffaaabULL, 0x1eabfffeb153ffffULL, 0x6730d2a0f6b0f624ULL,
      0x64774b84f38512bfULL, 0x4b1ba7b6434bacd7ULL, 0x1a0111ea397fe69aULL};
};

struct FrParams {
  static constexpr std::size_t kLimbs = 4;
  static constexpr std::size_t kBytes = 32;
  // 0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001
  static constexpr Limbs<4> kModulus = {0xffffffff00000001ULL, 0x53bda402fffe5bfeULL,
                                        0x3339d80809a1d805ULL, 0x73eda753299d7d48ULL};
};

/// Base field of BLS12-381.
using Fp = PrimeField<FpParams>;
/// Scalar field: the prime order shared by G1, G2 and GT.
using Fr = PrimeField<FrParams>;

}  // namespace martsia::group

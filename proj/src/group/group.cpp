#include "martsia/group/group.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "constants.hpp"
#include "martsia/error.hpp"

namespace martsia::group {
namespace {

constexpr std::uint8_t kCompressedFlag = 0x80;
constexpr std::uint8_t kInfinityFlag = 0x40;
constexpr std::uint8_t kSignFlag = 0x20;
constexpr std::uint8_t kFlagMask = 0xe0;

std::span<const u64> limbs(const std::vector<u64>& v) { return {v.data(), v.size()}; }

std::array<std::uint8_t, 64> expand64(std::string_view domain, ByteView input, std::uint32_t ctr,
                                      std::uint8_t lane) {
  Bytes prefix;
  append_framed(prefix, as_bytes(domain));
  Bytes suffix;
  append_u32(suffix, ctr);
  suffix.push_back(lane);
  std::array<std::uint8_t, 64> out{};
  for (std::uint8_t half = 0; half < 2; ++half) {
    const std::uint8_t tag[] = {half};
    const auto d = crypto::sha256({prefix, input, suffix, tag});
    std::copy(d.begin(), d.end(), out.begin() + half * 32);
  }
  return out;
}

// Splits off the flag bits; returns the flags and the masked field bytes.
template <std::size_t N>
std::uint8_t strip_flags(ByteView in, std::array<std::uint8_t, N>& field) {
  std::copy(in.begin(), in.end(), field.begin());
  const std::uint8_t flags = field[0] & kFlagMask;
  field[0] &= static_cast<std::uint8_t>(~kFlagMask);
  return flags;
}

template <std::size_t N>
bool all_zero(const std::array<std::uint8_t, N>& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; });
}

// Shared decoding rules for the flag byte. Returns nullopt on a bad
// combination, true for the identity and false for a regular point.
template <std::size_t N>
std::optional<bool> check_flags(std::uint8_t flags, const std::array<std::uint8_t, N>& field) {
  if ((flags & kCompressedFlag) == 0) return std::nullopt;
  if (flags & kInfinityFlag) {
    if ((flags & kSignFlag) || !all_zero(field)) return std::nullopt;
    return true;
  }
  return false;
}

}  // namespace

std::string_view group_name(GroupId id) {
  switch (id) {
    case GroupId::G1: return "G1";
    case GroupId::G2: return "G2";
    case GroupId::GT: return "GT";
  }
  return "?";
}

std::array<std::uint8_t, kG1Bytes> serialize(const G1& p) {
  std::array<std::uint8_t, kG1Bytes> out{};
  const auto a = p.to_affine();
  if (!a) {
    out[0] = kCompressedFlag | kInfinityFlag;
    return out;
  }
  out = a->x.to_bytes();
  out[0] |= kCompressedFlag;
  if (a->y.is_lexicographically_largest()) out[0] |= kSignFlag;
  return out;
}

std::array<std::uint8_t, kG2Bytes> serialize(const G2& p) {
  std::array<std::uint8_t, kG2Bytes> out{};
  const auto a = p.to_affine();
  if (!a) {
    out[0] = kCompressedFlag | kInfinityFlag;
    return out;
  }
  const auto hi = a->x.c1.to_bytes();
  const auto lo = a->x.c0.to_bytes();
  std::copy(hi.begin(), hi.end(), out.begin());
  std::copy(lo.begin(), lo.end(), out.begin() + 48);
  out[0] |= kCompressedFlag;
  if (a->y.is_lexicographically_largest()) out[0] |= kSignFlag;
  return out;
}

std::array<std::uint8_t, kGtBytes> serialize(const Gt& x) {
  std::array<std::uint8_t, kGtBytes> out{};
  std::size_t pos = 0;
  for (const Fp2& c : x.value().coefficients()) {
    for (const Fp& f : {c.c0, c.c1}) {
      const auto b = f.to_bytes();
      std::copy(b.begin(), b.end(), out.begin() + pos);
      pos += b.size();
    }
  }
  return out;
}

std::array<std::uint8_t, kScalarBytes> serialize(const Fr& s) { return s.to_bytes(); }

bool in_prime_subgroup(const G1& p) { return p.mul(limbs(detail::constants().r)).is_identity(); }
bool in_prime_subgroup(const G2& p) { return p.mul(limbs(detail::constants().r)).is_identity(); }
bool in_prime_subgroup(const Gt& x) { return x.value().pow(detail::constants().r).is_one(); }

std::optional<G1> deserialize_g1(ByteView in) {
  if (in.size() != kG1Bytes) return std::nullopt;
  std::array<std::uint8_t, kG1Bytes> field{};
  const std::uint8_t flags = strip_flags(in, field);
  const auto kind = check_flags(flags, field);
  if (!kind) return std::nullopt;
  if (*kind) return G1::identity();
  const auto x = Fp::from_bytes(field);
  if (!x) return std::nullopt;
  auto y = (x->square() * *x + G1CurveParams::b()).sqrt();
  if (!y) return std::nullopt;
  if (y->is_lexicographically_largest() != ((flags & kSignFlag) != 0)) *y = -*y;
  const G1 p = G1::from_affine(*x, *y);
  if (!in_prime_subgroup(p)) return std::nullopt;
  return p;
}

std::optional<G2> deserialize_g2(ByteView in) {
  if (in.size() != kG2Bytes) return std::nullopt;
  std::array<std::uint8_t, kG2Bytes> field{};
  const std::uint8_t flags = strip_flags(in, field);
  const auto kind = check_flags(flags, field);
  if (!kind) return std::nullopt;
  if (*kind) return G2::identity();
  const auto c1 = Fp::from_bytes(ByteView(field).subspan(0, 48));
  const auto c0 = Fp::from_bytes(ByteView(field).subspan(48, 48));
  if (!c0 || !c1) return std::nullopt;
  const Fp2 x{*c0, *c1};
  auto y = (x.square() * x + G2CurveParams::b()).sqrt();
  if (!y) return std::nullopt;
  if (y->is_lexicographically_largest() != ((flags & kSignFlag) != 0)) *y = -*y;
  const G2 p = G2::from_affine(x, *y);
  if (!in_prime_subgroup(p)) return std::nullopt;
  return p;
}

std::optional<Gt> deserialize_gt(ByteView in) {
  if (in.size() != kGtBytes) return std::nullopt;
  std::array<Fp2, 6> k;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto c0 = Fp::from_bytes(in.subspan(96 * i, 48));
    const auto c1 = Fp::from_bytes(in.subspan(96 * i + 48, 48));
    if (!c0 || !c1) return std::nullopt;
    k[i] = {*c0, *c1};
  }
  const Gt x = Gt::from_unchecked(Fp12::from_coefficients(k));
  if (x.value().is_zero() || !in_prime_subgroup(x)) return std::nullopt;
  return x;
}

std::optional<Fr> deserialize_scalar(ByteView in) { return Fr::from_bytes(in); }

G1 decode_g1(ByteView in) {
  if (auto p = deserialize_g1(in)) return *p;
  throw Error(ErrorCode::Malformed, "invalid G1 encoding");
}
G2 decode_g2(ByteView in) {
  if (auto p = deserialize_g2(in)) return *p;
  throw Error(ErrorCode::Malformed, "invalid G2 encoding");
}
Gt decode_gt(ByteView in) {
  if (auto p = deserialize_gt(in)) return *p;
  throw Error(ErrorCode::Malformed, "invalid GT encoding");
}
Fr decode_scalar(ByteView in) {
  if (auto s = deserialize_scalar(in)) return *s;
  throw Error(ErrorCode::Malformed, "invalid scalar encoding");
}

G1 hash_to_g1(ByteView input, std::string_view domain) {
  for (std::uint32_t ctr = 0;; ++ctr) {
    const auto block = expand64(domain, input, ctr, 0);
    const Fp x = Fp::from_bytes_reduce(block);
    auto y = (x.square() * x + G1CurveParams::b()).sqrt();
    if (!y) continue;
    if (y->is_lexicographically_largest() != ((block[0] & 1) != 0)) *y = -*y;
    const G1 p = G1::from_affine(x, *y).mul(limbs(detail::constants().g1_cofactor));
    if (!p.is_identity()) return p;
  }
}

G2 hash_to_g2(ByteView input, std::string_view domain) {
  for (std::uint32_t ctr = 0;; ++ctr) {
    const auto b0 = expand64(domain, input, ctr, 0);
    const auto b1 = expand64(domain, input, ctr, 1);
    const Fp2 x{Fp::from_bytes_reduce(b0), Fp::from_bytes_reduce(b1)};
    auto y = (x.square() * x + G2CurveParams::b()).sqrt();
    if (!y) continue;
    if (y->is_lexicographically_largest() != ((b0[0] & 1) != 0)) *y = -*y;
    const G2 p = G2::from_affine(x, *y).mul(limbs(detail::constants().g2_cofactor));
    if (!p.is_identity()) return p;
  }
}

Fr random_scalar(crypto::Rng& rng) {
  std::array<std::uint8_t, 64> wide{};
  rng.fill(wide);
  return Fr::from_bytes_reduce(wide);
}

Fr random_nonzero_scalar(crypto::Rng& rng) {
  for (;;) {
    const Fr s = random_scalar(rng);
    if (!s.is_zero()) return s;
  }
}

G1 random_g1(crypto::Rng& rng) {
  return GroupSuite::standard().g1.mul(random_nonzero_scalar(rng));
}

Gt random_gt(crypto::Rng& rng) { return GroupSuite::standard().gt.pow(random_nonzero_scalar(rng)); }

const GroupSuite& GroupSuite::standard() {
  static const GroupSuite kSuite = [] {
    GroupSuite s;
    s.generator_seed = "martsia/bls12-381/generators/v1";
    s.g1 = hash_to_g1(as_bytes(s.generator_seed), "martsia/suite/g1");
    s.g2 = hash_to_g2(as_bytes(s.generator_seed), "martsia/suite/g2");
    s.gt = pair(s.g1, s.g2);
    return s;
  }();
  return kSuite;
}

std::string GroupSuite::order_hex() {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (std::size_t i = FrParams::kLimbs; i-- > 0;) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      s.push_back(kDigits[(FrParams::kModulus[i] >> shift) & 15]);
    }
  }
  return s;
}

namespace {

// H and F are deterministic, so results are memoised process-wide.
G2 cached_hash_to_g2(std::string_view input, std::string_view domain) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, std::string>, G2, std::less<>> cache;
  std::pair<std::string, std::string> key{std::string(domain), std::string(input)};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const G2 value = hash_to_g2(as_bytes(input), domain);
  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), value);
  return value;
}

}  // namespace

G2 HashFunctions::gid(std::string_view gid) { return cached_hash_to_g2(gid, "martsia/H/gid"); }

G2 HashFunctions::attribute(std::string_view literal) {
  return cached_hash_to_g2(literal, "martsia/F/attribute");
}

}  // namespace martsia::group

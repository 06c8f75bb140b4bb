#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace mevsim {

using BigInt = boost::multiprecision::cpp_int;
using Uint256 = boost::multiprecision::checked_uint256_t;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kWeiPerGwei = 1'000'000'000ull;

/// Integer wei value (1 ETH = 10^18 wei). Arithmetic is range-checked:
/// overflow and negative results throw std::range_error instead of wrapping.
struct WeiAmount {
  Uint256 wei{0u};

  WeiAmount() = default;
  explicit WeiAmount(Uint256 v) : wei(std::move(v)) {}
  explicit WeiAmount(std::uint64_t v) : wei(v) {}

  static WeiAmount from_eth(std::uint64_t eth);
  static WeiAmount from_gwei(std::uint64_t gwei);

  /// Strict decimal parse: digits only, must fit in 256 bits.
  /// Throws std::invalid_argument otherwise.
  static WeiAmount parse(std::string_view decimal);

  Rational to_rational() const { return Rational(BigInt(wei)); }
  double to_eth() const;
  std::string str() const { return wei.str(); }
  bool is_zero() const { return wei.is_zero(); }

  bool operator==(const WeiAmount& o) const { return wei == o.wei; }
  auto operator<=>(const WeiAmount& o) const { return wei.compare(o.wei) <=> 0; }

  WeiAmount operator+(const WeiAmount& o) const { return WeiAmount(Uint256(wei + o.wei)); }
  WeiAmount operator-(const WeiAmount& o) const { return WeiAmount(Uint256(wei - o.wei)); }
  WeiAmount& operator+=(const WeiAmount& o) {
    wei = Uint256(wei + o.wei);
    return *this;
  }
};

/// floor(amount * factor); factor must be non-negative.
WeiAmount scale_floor(const WeiAmount& amount, const Rational& factor);

/// Floor of a rational to a big integer (toward -inf).
BigInt floor_rational(const Rational& value);

/// Accepts "p/q", plain integers, and plain decimals ("0.13" -> 13/100),
/// all parsed exactly.
Rational parse_rational(std::string_view text);

/// Exact decimal rendering, truncated toward zero after `max_frac_digits`
/// fractional digits; trailing zeros trimmed so the output is canonical.
std::string rational_to_decimal(const Rational& value, unsigned max_frac_digits = 12);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace mevsim

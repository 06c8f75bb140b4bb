#include "mevsim/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mevsim {

namespace {

const BigInt kWeiPerEth = BigInt("1000000000000000000");

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

// cpp_int's string constructor treats a leading 0 as an octal prefix; strip
// redundant zeros so digit strings always parse as decimal.
BigInt big_from_digits(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) {
    return BigInt(0);
  }
  return BigInt(std::string(digits.substr(first)));
}

}  // namespace

WeiAmount WeiAmount::from_eth(std::uint64_t eth) {
  BigInt v = kWeiPerEth * eth;
  return WeiAmount(v.convert_to<Uint256>());
}

WeiAmount WeiAmount::from_gwei(std::uint64_t gwei) {
  BigInt v = BigInt(kWeiPerGwei) * gwei;
  return WeiAmount(v.convert_to<Uint256>());
}

WeiAmount WeiAmount::parse(std::string_view decimal) {
  if (!all_digits(decimal)) {
    throw std::invalid_argument("wei value must be a non-empty string of decimal digits: '" +
                                std::string(decimal) + "'");
  }
  try {
    return WeiAmount(big_from_digits(decimal).convert_to<Uint256>());
  } catch (const std::exception&) {
    throw std::invalid_argument("wei value exceeds 256 bits: '" + std::string(decimal) + "'");
  }
}

double WeiAmount::to_eth() const { return wei.convert_to<double>() / 1e18; }

WeiAmount scale_floor(const WeiAmount& amount, const Rational& factor) {
  if (factor < 0) {
    throw std::invalid_argument("scale_floor requires a non-negative factor");
  }
  BigInt scaled = floor_rational(amount.to_rational() * factor);
  return WeiAmount(scaled.convert_to<Uint256>());
}

BigInt floor_rational(const Rational& value) {
  BigInt num = numerator(value);
  BigInt den = denominator(value);  // always > 0
  BigInt q = num / den;
  if (num < 0 && q * den != num) {
    --q;
  }
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c) != 0; }),
          s.end());
  if (s.empty()) {
    throw std::invalid_argument("empty rational literal");
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string body = s.substr(pos);
  Rational out;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw std::invalid_argument("bad rational literal: '" + std::string(text) + "'");
    }
    BigInt d = big_from_digits(den);
    if (d == 0) {
      throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    }
    out = Rational(big_from_digits(num), d);
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string ip = body.substr(0, dot);
    std::string fp = body.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if ((!all_digits(ip)) || (!fp.empty() && !all_digits(fp))) {
      throw std::invalid_argument("bad decimal literal: '" + std::string(text) + "'");
    }
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    BigInt num = big_from_digits(ip) * scale + big_from_digits(fp);
    out = Rational(num, scale);
  } else {
    if (!all_digits(body)) {
      throw std::invalid_argument("bad integer literal: '" + std::string(text) + "'");
    }
    out = Rational(big_from_digits(body));
  }
  return negative ? Rational(-out) : out;
}

std::string rational_to_decimal(const Rational& value, unsigned max_frac_digits) {
  BigInt num = numerator(value);
  BigInt den = denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt integer_part = num / den;
  BigInt rem = num % den;
  std::string out = integer_part.str();
  std::string frac;
  for (unsigned i = 0; i < max_frac_digits && rem != 0; ++i) {
    rem *= 10;
    frac.push_back(static_cast<char>('0' + (rem / den).convert_to<int>()));
    rem %= den;
  }
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  if (!frac.empty()) {
    out += '.';
    out += frac;
  }
  if (negative && (integer_part != 0 || !frac.empty())) {
    out.insert(out.begin(), '-');
  }
  return out;
}

}  // namespace mevsim

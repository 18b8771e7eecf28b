#include <nwidths/errors.hpp>
#include <nwidths/rational.hpp>

#include <cctype>

namespace nwidths {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("not a rational: '" + std::string(whole) + "'");
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw ParseError("not a rational: '" + std::string(whole) + "'");
  }
  return BigInt(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  BigInt num = parse_integer(s.substr(0, slash), text);
  BigInt den = 1;
  if (slash != std::string_view::npos) den = parse_integer(s.substr(slash + 1), text);
  if (den == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational value = Rational(num) / Rational(den);
  return negative ? Rational(-value) : value;
}

Rational make_rational(long long num, long long den) {
  if (den == 0) throw DegenerateDenominator("make_rational with zero denominator");
  return Rational(num) / Rational(den);
}

std::string to_string(const Rational& x) {
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

}  // namespace nwidths

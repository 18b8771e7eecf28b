#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace nwidths {

using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

// Accepts "a", "a/b" with optional sign; b must be nonzero. Throws ParseError.
Rational parse_rational(std::string_view text);

Rational make_rational(long long num, long long den = 1);

std::string to_string(const Rational& x);
double to_double(const Rational& x);

inline Rational positive_part(const Rational& x) { return x > 0 ? x : Rational(0); }

}  // namespace nwidths

#include "nsplab/scalar.hpp"

#include <cctype>
#include <sstream>

namespace nsplab {

namespace {

using boost::multiprecision::cpp_int;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

cpp_int pow10(long n) {
  cpp_int r = 1;
  for (long i = 0; i < n; ++i) r *= 10;
  return r;
}

// Finite decimal: [+-]digits[.digits][(e|E)[+-]digits]
Rational parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw InputError("empty scalar in '" + std::string(whole) + "'");
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  cpp_int mantissa = 0;
  long frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InputError("not a number: '" + std::string(whole) + "'");
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw InputError("not a number: '" + std::string(whole) + "'");
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_negative = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw InputError("bad exponent in '" + std::string(whole) + "'");
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw InputError("bad exponent in '" + std::string(whole) + "'");
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 400) throw InputError("exponent out of range in '" + std::string(whole) + "'");
    }
    if (exp_negative) exponent = -exponent;
  }
  const long shift = exponent - frac_digits;
  Rational r = shift >= 0 ? Rational(mantissa * pow10(shift)) : Rational(mantissa, pow10(-shift));
  return negative ? Rational(-r) : r;
}

}  // namespace

ScalarMode ScalarMode::floating_point(double tol) {
  if (!(tol > 0.0)) throw InputError("tol_zero must be positive");
  return {Kind::floating, tol};
}

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, text);
  const Rational num = parse_decimal(trim(s.substr(0, slash)), text);
  const Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

}  // namespace nsplab

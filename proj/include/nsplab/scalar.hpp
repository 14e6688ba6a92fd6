#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace nsplab {

using Rational = boost::multiprecision::cpp_rational;

/// Raised for malformed or out-of-range user input (bad files, bad penalty
/// specs, dimension mismatches). The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is called outside its contract, e.g. asking a
/// non-separable penalty for its univariate term.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Scalar arithmetic mode: float64 with a zero tolerance, or exact rationals.
struct ScalarMode {
  enum class Kind { floating, exact };

  Kind kind = Kind::floating;
  double tol_zero = 1e-9;

  static ScalarMode floating_point(double tol = 1e-9);
  static ScalarMode exact_rational() { return {Kind::exact, 0.0}; }

  bool is_exact() const { return kind == Kind::exact; }
};

/// Parses "3/4", "-2", "0.75", "1e-3" or "2.5E+2" into an exact rational.
/// Rejects nan/inf and anything that is not a finite decimal or fraction.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }

std::string to_string(const Rational& r);

template <class T>
T abs_value(const T& v) {
  if constexpr (is_exact_v<T>) {
    return v < 0 ? T(-v) : v;
  } else {
    return v < 0 ? -v : v;
  }
}

}  // namespace nsplab

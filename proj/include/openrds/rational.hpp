#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace openrds {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

inline double to_double(const rational& r) { return r.convert_to<double>(); }

// Doubles are binary rationals, so this conversion is exact.
inline rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite");
  if (x == 0.0) return rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  exp -= 53;
  rational r(mant);
  if (exp >= 0) {
    r *= rational(bigint(1) << exp);
  } else {
    r /= rational(bigint(1) << -exp);
  }
  return r;
}

inline rational make_rational(std::int64_t num, std::int64_t den) {
  return rational(bigint(num), bigint(den));
}

// log of a positive rational, accurate for arbitrarily large numerator/denominator.
inline double log_rational(const rational& r) {
  if (r <= 0) throw std::domain_error("log_rational: nonpositive");
  const bigint num = boost::multiprecision::numerator(r);
  const bigint den = boost::multiprecision::denominator(r);
  auto log_big = [](const bigint& v) {
    const auto bits = boost::multiprecision::msb(v);
    if (bits <= 900) return std::log(v.convert_to<double>());
    const bigint top = v >> (bits - 52);
    return std::log(top.convert_to<double>()) + static_cast<double>(bits - 52) * std::log(2.0);
  };
  return log_big(num) - log_big(den);
}

inline std::string to_string(const rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

}  // namespace openrds

// Exact rational scalar type and the small amount of numeric glue shared by
// the rest of the library. Rational mode is the canonical arithmetic; double
// is supported for imported float data and carries a nonzero tolerance.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lhv {

using rational = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unknown name / index out of range / malformed query.
struct domain_error : error {
  using error::error;
};

/// An operation's stated precondition does not hold for the given input.
struct precondition_error : error {
  using error::error;
};

inline rational rat(long long num, long long den = 1) {
  if (den == 0) throw domain_error("rational with zero denominator");
  return rational(num, den);
}

inline double to_double(const rational& r) { return r.convert_to<double>(); }
inline double to_double(double r) { return r; }

/// Canonical exact rendering: "p/q" in lowest terms, "p" when q == 1.
inline std::string exact_string(const rational& r) {
  auto num = numerator(r);
  auto den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline rational prob_abs(const rational& r) { return r < 0 ? rational(-r) : r; }
inline double prob_abs(double r) { return std::fabs(r); }

template <class R>
R default_tolerance();

template <>
inline rational default_tolerance<rational>() { return rational(0); }

template <>
inline double default_tolerance<double>() { return 1e-9; }

}  // namespace lhv

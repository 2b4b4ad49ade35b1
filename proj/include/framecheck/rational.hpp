#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace framecheck {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Parses "p/q", "p", or a decimal literal without exponent ("0.5" -> 1/2).
/// Throws std::invalid_argument on anything else.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

/// Exact square root when r is a perfect square of a rational, empty otherwise.
std::optional<Rational> exact_sqrt(const Rational& r);

}  // namespace framecheck

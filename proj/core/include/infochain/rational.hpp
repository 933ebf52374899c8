#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace infochain {

/// Exact rational used for every reward and closed-form incentive quantity.
/// Values are kept in lowest terms, so equal values compare and print
/// identically regardless of the order in which they were accumulated.
using Rational = boost::multiprecision::mpq_rational;

/// Parses "3", "-0.95", "1.5e-3" or "2/7" exactly.
Rational parse_rational(std::string_view text);

/// Decimal rendering with `significant` significant digits.
std::string to_decimal(const Rational& value, int significant = 12);

/// "p/q" rendering (just "p" when the denominator is 1).
std::string to_fraction(const Rational& value);

double to_double(const Rational& value);

/// Largest integer not above `value`. Throws InvalidArgument when it does
/// not fit in 64 bits.
std::int64_t floor_to_int64(const Rational& value);
std::int64_t ceil_to_int64(const Rational& value);

}  // namespace infochain

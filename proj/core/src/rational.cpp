#include "infochain/rational.hpp"

#include <cctype>
#include <limits>

#include <fmt/format.h>

#include "infochain/error.hpp"

namespace infochain {

namespace {

using boost::multiprecision::mpz_int;

mpz_int parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw Error(Errc::ParseError, fmt::format("expected digits in '{}'", whole));
  }
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(Errc::ParseError, fmt::format("not a number: '{}'", whole));
    }
  }
  return mpz_int(std::string(digits));
}

mpz_int pow10(unsigned e) {
  mpz_int r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(Errc::ParseError, "empty number");

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_int num = parse_digits(text.substr(0, slash), whole);
    mpz_int den = parse_digits(text.substr(slash + 1), whole);
    if (den == 0) throw Error(Errc::ParseError, fmt::format("zero denominator in '{}'", whole));
    result = Rational(num, den);
  } else {
    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      mpz_int e_value = parse_digits(exp_text, whole);
      if (e_value > 4000) throw Error(Errc::ParseError, fmt::format("exponent too large in '{}'", whole));
      exponent = static_cast<int>(e_value);
      if (exp_negative) exponent = -exponent;
      text = text.substr(0, e);
    }
    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      int_part = text.substr(0, dot);
      frac_part = text.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) {
      throw Error(Errc::ParseError, fmt::format("not a number: '{}'", whole));
    }
    mpz_int num = int_part.empty() ? mpz_int(0) : parse_digits(int_part, whole);
    if (!frac_part.empty()) {
      num = num * pow10(static_cast<unsigned>(frac_part.size())) + parse_digits(frac_part, whole);
    }
    exponent -= static_cast<int>(frac_part.size());
    if (exponent >= 0) {
      result = Rational(num * pow10(static_cast<unsigned>(exponent)));
    } else {
      result = Rational(num, pow10(static_cast<unsigned>(-exponent)));
    }
  }
  return negative ? Rational(-result) : result;
}

std::string to_decimal(const Rational& value, int significant) {
  return fmt::format("{:.{}g}", to_double(value), significant);
}

std::string to_fraction(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

namespace {

std::int64_t checked_int64(const mpz_int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(Errc::InvalidArgument, "value does not fit in 64 bits: " + v.str());
  }
  return v.convert_to<std::int64_t>();
}

}  // namespace

std::int64_t floor_to_int64(const Rational& value) {
  const mpz_int num = boost::multiprecision::numerator(value);
  const mpz_int den = boost::multiprecision::denominator(value);
  mpz_int q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return checked_int64(q);
}

std::int64_t ceil_to_int64(const Rational& value) { return -floor_to_int64(-value); }

}  // namespace infochain

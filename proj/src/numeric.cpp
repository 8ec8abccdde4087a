#include "rankorder/numeric.hpp"

#include <algorithm>
#include <string>

#include "rankorder/errors.hpp"

namespace rankorder {

Rational make_rational(const BigCount& num, const BigCount& den) {
  if (den == 0) throw Error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_exact_string(const Rational& q) { return q.get_str(); }

namespace {

BigCount pow10(unsigned long e) {
  BigCount r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

std::string to_decimal_string(const Rational& q, int significant_digits) {
  if (significant_digits < 1) throw Error("precision must be at least 1");
  if (q == 0) return "0";

  const bool negative = q < 0;
  const Rational a = abs(q);

  // Find e with 10^e <= a < 10^(e+1).
  long e = 0;
  {
    Rational scale = 1;
    while (a >= scale * 10) {
      scale *= 10;
      ++e;
    }
    while (a < scale) {
      scale /= 10;
      --e;
    }
  }

  // Scale so that the integer part carries exactly `significant_digits` digits.
  const long shift = significant_digits - 1 - e;
  Rational scaled = a;
  if (shift >= 0) {
    scaled *= Rational(pow10(static_cast<unsigned long>(shift)));
  } else {
    scaled /= Rational(pow10(static_cast<unsigned long>(-shift)));
  }

  // Round half away from zero: floor(scaled + 1/2).
  BigCount digits = scaled.get_num() * 2 + scaled.get_den();
  mpz_fdiv_q(digits.get_mpz_t(), digits.get_mpz_t(), BigCount(scaled.get_den() * 2).get_mpz_t());

  long point = e + 1;  // digits before the decimal point
  if (digits == pow10(static_cast<unsigned long>(significant_digits))) {
    digits /= 10;
    ++point;
  }

  std::string body = digits.get_str();
  std::string out;
  if (point <= 0) {
    out = "0." + std::string(static_cast<std::size_t>(-point), '0') + body;
  } else if (static_cast<std::size_t>(point) >= body.size()) {
    out = body + std::string(static_cast<std::size_t>(point) - body.size(), '0');
  } else {
    out = body.substr(0, static_cast<std::size_t>(point)) + "." +
          body.substr(static_cast<std::size_t>(point));
  }

  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return negative ? "-" + out : out;
}

Rational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den.front() == '-') {
    throw Error("not a rational: '" + std::string(text) + "'");
  }
  return make_rational(BigCount(std::string(num)), BigCount(std::string(den)));
}

}  // namespace rankorder

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "entropy_games/errors.hpp"

namespace entropy_games {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

// a / b in canonical form. Prefer this over Rational(a, b), which does not
// canonicalize and breaks equality tests.
inline Rational frac(long a, long b = 1) {
  if (b == 0) throw DomainError("zero denominator");
  Rational q(a, b);
  q.canonicalize();
  return q;
}

// "p/q" for non-integers, "p" for integers.
inline std::string to_string(const Rational& q) { return q.get_str(); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline mpz_class parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ValidationError("not an integer");
  mpz_class z(std::string(s), 10);
  return neg ? mpz_class(-z) : z;
}

}  // namespace detail

/// Parses an exact rational from "3", "-0.25", "1.5e-3" or "7/9".
/// Decimal text is read digit by digit, so "0.1" is exactly 1/10.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ValidationError("empty number");
  try {
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      mpz_class num = detail::parse_integer(s.substr(0, slash));
      mpz_class den = detail::parse_integer(s.substr(slash + 1));
      if (den == 0) throw ValidationError("zero denominator");
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = s[0] == '-';
      s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mpz_class ez = detail::parse_integer(s.substr(e + 1));
      if (!ez.fits_slong_p() || abs(ez) > 4096) throw ValidationError("exponent out of range");
      exponent = ez.get_si();
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
      if ((ip.empty() && fp.empty()) || (!ip.empty() && !detail::all_digits(ip)) ||
          (!fp.empty() && !detail::all_digits(fp)))
        throw ValidationError("bad decimal");
      digits = std::string(ip) + std::string(fp);
      exponent -= static_cast<long>(fp.size());
    } else {
      if (!detail::all_digits(s)) throw ValidationError("bad number");
      digits = std::string(s);
    }
    if (digits.empty()) digits = "0";
    Rational q{mpz_class(digits, 10)};
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0)
      q /= Rational(scale);
    else
      q *= Rational(scale);
    if (neg) q = -q;
    q.canonicalize();
    return q;
  } catch (const ValidationError&) {
    throw ValidationError("cannot parse number '" + std::string(text) + "'");
  } catch (const std::invalid_argument&) {
    throw ValidationError("cannot parse number '" + std::string(text) + "'");
  }
}

// Exact conversion of a finite double (binary expansion, no rounding).
inline Rational from_double_exact(double x) {
  if (!std::isfinite(x)) throw ValidationError("non-finite value");
  return Rational(x);
}

inline std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return out;
}

inline std::vector<std::string> to_strings(const RationalVector& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

inline Rational floor_rational(const Rational& q) {
  mpz_class z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(z);
}

inline mpz_class ceil_integer(const Rational& q) {
  mpz_class z;
  mpz_cdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return z;
}

}  // namespace entropy_games

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace securemode {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

using Rational = mpq_class;
using Integer = mpz_class;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view name = "rational";
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& x) { return x; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "float";
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& x) { return x.get_d(); }
};

template <class T>
concept Scalar = requires(const T& x) {
  { ScalarTraits<T>::exact } -> std::convertible_to<bool>;
  { ScalarTraits<T>::is_zero(x) } -> std::same_as<bool>;
};

template <Scalar T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw Error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace detail {

// Accepts ASCII '-', '+', and U+2212 (the typographic minus sign).
inline bool consume_sign(std::string_view& s) {
  if (s.empty()) return false;
  if (s.front() == '-') {
    s.remove_prefix(1);
    return true;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
    return false;
  }
  if (s.starts_with("\xE2\x88\x92")) {
    s.remove_prefix(3);
    return true;
  }
  return false;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Unsigned decimal "123", "1.25", "1e-3", "2.5E+4".
inline Rational parse_unsigned_decimal(std::string_view s, std::string_view original) {
  auto fail = [&] { return ParseError("not a number: \"" + std::string(original) + "\""); };
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool neg = consume_sign(exp_part);
    if (!all_digits(exp_part)) throw fail();
    auto [ptr, ec] = std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
    if (ec != std::errc{} || exponent > 4000) throw fail();
    if (neg) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw fail();
    if (!int_part.empty() && !all_digits(int_part)) throw fail();
    if (!frac_part.empty() && !all_digits(frac_part)) throw fail();
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) throw fail();
    digits = std::string(s);
  }
  Integer mantissa(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale, 1);
  q.canonicalize();
  return q;
}

}  // namespace detail

/// Parses "3", "-1/2", "−1/2", "0.1", "1e-3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = detail::trim(text);
  bool negative = detail::consume_sign(s);
  Rational q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = detail::trim(s.substr(0, slash));
    std::string_view den = detail::trim(s.substr(slash + 1));
    bool den_negative = detail::consume_sign(den);
    if (!detail::all_digits(num) || !detail::all_digits(den))
      throw ParseError("not a rational: \"" + std::string(text) + "\"");
    Integer d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator: \"" + std::string(text) + "\"");
    q = Rational(Integer(std::string(num), 10), d);
    q.canonicalize();
    if (den_negative) negative = !negative;
  } else {
    q = detail::parse_unsigned_decimal(s, text);
  }
  return negative ? Rational(-q) : q;
}

/// Shortest decimal that round-trips, read back exactly: 0.1 becomes 1/10.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ParseError("non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw ParseError("cannot format number");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

template <Scalar T>
T scalar_from_rational(const Rational& q) {
  return ScalarTraits<T>::from_rational(q);
}

template <Scalar T>
double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

}  // namespace securemode

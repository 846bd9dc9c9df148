#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "cmax/errors.hpp"

namespace cmax {

// Exact rational arithmetic for everything that must be compared or summed
// without rounding error: processing times, makespans, rounding boundaries,
// LP coefficients. Arbitrary precision, so repeated halving in the binary
// search and simplex pivoting cannot overflow.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return numerator(q); }
inline Int rat_den(const Rat& q) { return denominator(q); }

inline bool is_integer(const Rat& q) { return denominator(q) == 1; }

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

// Largest integer <= q.
inline Int rat_floor(const Rat& q) {
  Int n = numerator(q), d = denominator(q);  // d > 0 by construction
  Int t = n / d;
  if (n < 0 && t * d != n) --t;
  return t;
}

inline Int rat_ceil(const Rat& q) { return -rat_floor(-q); }

inline long long to_ll(const Int& v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw ContractViolation("integer out of 64-bit range: " + v.str());
  return v.convert_to<long long>();
}

// Accepts "12", "3/4" and decimal forms like "0.25" or "1.5e-3".
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw ParseError("empty number");
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') neg = (text[pos++] == '-');

  Int num = 0, den = 1;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    num = num * 10 + (text[pos++] - '0');
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    Int d = 0;
    bool dd = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      d = d * 10 + (text[pos++] - '0');
      dd = true;
    }
    if (!any_digit || !dd || d == 0 || pos != text.size())
      throw ParseError("bad fraction: '" + text + "'");
    Rat q(num, d);
    return neg ? Rat(-q) : q;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      num = num * 10 + (text[pos++] - '0');
      den *= 10;
      any_digit = true;
    }
  }
  long exp10 = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool eneg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) eneg = (text[pos++] == '-');
    bool ed = false;
    long e = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      e = e * 10 + (text[pos++] - '0');
      ed = true;
      if (e > 100000) throw ParseError("exponent out of range: '" + text + "'");
    }
    if (!ed) throw ParseError("bad exponent: '" + text + "'");
    exp10 = eneg ? -e : e;
  }
  if (!any_digit || pos != text.size()) throw ParseError("bad number: '" + text + "'");
  Rat q(num, den);
  for (; exp10 > 0; --exp10) q *= 10;
  for (; exp10 < 0; ++exp10) q /= 10;
  return neg ? Rat(-q) : q;
}

// Exact text form, round-trips through parse_rat: "12" or "7/36".
inline std::string rat_str(const Rat& q) {
  std::string s = numerator(q).str();
  if (denominator(q) != 1) s += "/" + denominator(q).str();
  return s;
}

// Fixed-point decimal with the given number of digits, round half away from
// zero. Used for CSV cells where the format, not the value, is fixed.
inline std::string rat_fixed(const Rat& q, int digits) {
  Int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Rat scaled = q * scale;
  Int r = rat_floor(abs(scaled) + Rat(1, 2));
  bool neg = q < 0 && r != 0;
  std::string ds = r.str();
  if (static_cast<int>(ds.size()) <= digits) ds.insert(0, digits + 1 - ds.size(), '0');
  std::string out = ds.substr(0, ds.size() - digits);
  if (digits > 0) out += "." + ds.substr(ds.size() - digits);
  return neg ? "-" + out : out;
}

inline int ceil_log2(unsigned long long v) {
  if (v <= 1) return 0;
  int k = 0;
  unsigned long long p = 1;
  while (p < v) {
    p <<= 1;
    ++k;
  }
  return k;
}

}  // namespace cmax

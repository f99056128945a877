// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>

namespace ndecomp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// 160 mantissa bits: well beyond the 64 fractional bits kept after rounding.
using HighFloat =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160, boost::multiprecision::digit_base_2>>;

inline constexpr int kFixedFractionBits = 64;

// Round x to the nearest multiple of 2^-bits. The result is an exact dyadic
// rational, so every later sum and comparison involving it is exact.
inline Rational to_fixed(const HighFloat& x, int bits = kFixedFractionBits) {
  HighFloat scaled = boost::multiprecision::ldexp(x, bits);
  BigInt num = static_cast<BigInt>(boost::multiprecision::round(scaled));
  return Rational(num, BigInt(1) << bits);
}

inline HighFloat to_high(const Rational& r) {
  return HighFloat(boost::multiprecision::numerator(r)) / HighFloat(boost::multiprecision::denominator(r));
}

// e^x rounded to 64 fractional bits.
inline Rational fixed_exp(const Rational& x) { return to_fixed(boost::multiprecision::exp(to_high(x))); }

inline double to_double(const Rational& r) { return static_cast<double>(to_high(r)); }

inline Rational pow2(int e) {
  return e >= 0 ? Rational(BigInt(1) << e) : Rational(BigInt(1), BigInt(1) << (-e));
}

// Fixed decimal rendering; identical on every platform because it goes
// through the exact rational, not through a double.
inline std::string format_decimal(const Rational& r, int digits = 6) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt q = (num * scale * 2 + den) / (den * 2);  // round half up
  BigInt ip = q / scale, fp = q % scale;
  std::ostringstream out;
  if (neg && q != 0) out << '-';
  out << ip;
  if (digits > 0) {
    std::string f = fp.str();
    out << '.' << std::string(static_cast<std::size_t>(digits) - f.size(), '0') << f;
  }
  return out.str();
}

// Smallest r with r^k >= n.
inline long long ceil_root(long long n, int k) {
  long long r = 1;
  while (boost::multiprecision::pow(BigInt(r), static_cast<unsigned>(k)) < n) ++r;
  return r;
}

inline std::uint64_t ceil_log2(std::uint64_t x) {
  std::uint64_t r = 0;
  while ((std::uint64_t{1} << r) < x) ++r;
  return r;
}

}  // namespace ndecomp

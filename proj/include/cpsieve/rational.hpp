#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace cpsieve {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// base^e for e >= 0.
inline BigInt big_pow(const BigInt& base, std::uint64_t e) {
    BigInt r = 1, b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/// x^e, e may be negative (x nonzero then).
inline Rational rational_pow(const Rational& x, std::int64_t e) {
    if (e >= 0) {
        return Rational(big_pow(numerator(x), static_cast<std::uint64_t>(e)),
                        big_pow(denominator(x), static_cast<std::uint64_t>(e)));
    }
    return Rational(big_pow(denominator(x), static_cast<std::uint64_t>(-e)),
                    big_pow(numerator(x), static_cast<std::uint64_t>(-e)));
}

/// Decimal expansion with `digits` places after the point, truncated toward zero.
inline std::string decimal_string(const Rational& x, unsigned digits = 10) {
    BigInt num = numerator(x), den = denominator(x);
    std::string sign;
    if (num < 0) {
        sign = "-";
        num = -num;
    }
    BigInt ip = num / den;
    BigInt rem = num % den;
    std::string frac;
    for (unsigned i = 0; i < digits; ++i) {
        rem *= 10;
        frac += static_cast<char>('0' + static_cast<int>(rem / den));
        rem %= den;
    }
    return sign + ip.str() + "." + frac;
}

inline double to_double(const Rational& x) {
    return static_cast<double>(x);
}

inline std::string ratio_string(const Rational& x) {
    return numerator(x).str() + "/" + denominator(x).str();
}

} // namespace cpsieve

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace medbounds {

/// Exact rational scalar used wherever results must be bit-exact.
using Rational = mpq_class;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

/// n/d in the scalar type T, canonicalized for rationals.
template <class T>
T ratio(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("ratio: zero denominator");
    if constexpr (is_exact_v<T>) {
        Rational r(static_cast<long>(n), static_cast<unsigned long>(d < 0 ? -d : d));
        if (d < 0) r = -r;
        r.canonicalize();
        return r;
    } else {
        return static_cast<T>(n) / static_cast<T>(d);
    }
}

/// Converts between scalar types. Double to rational is exact (binary expansion).
template <class To, class From>
To scalar_cast(const From& x) {
    if constexpr (std::is_same_v<To, From>) {
        return x;
    } else if constexpr (is_exact_v<To>) {
        return Rational(x);
    } else {
        return static_cast<To>(to_double(x));
    }
}

/// Comparison slack for the scalar type: exact for rationals.
template <class T>
T tolerance() {
    if constexpr (is_exact_v<T>) {
        return Rational(0);
    } else {
        return T(1e-12);
    }
}

/// Best rational approximation of x with denominator at most max_den
/// (continued fractions with a final semiconvergent check).
inline Rational rationalize(double x, std::int64_t max_den = 1000000000) {
    if (!std::isfinite(x)) throw std::domain_error("rationalize: non-finite value");
    if (max_den < 1) throw std::domain_error("rationalize: max_den must be positive");
    Rational target(x);
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rational rem = target;
    const mpz_class bound = static_cast<long>(max_den);
    while (true) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
        mpz_class q2 = a * q1 + q0;
        if (q2 > bound) {
            // semiconvergent (p0 + k p1)/(q0 + k q1) with the largest admissible k
            mpz_class k = (bound - q0) / q1;
            Rational semi(mpz_class(p0 + k * p1), mpz_class(q0 + k * q1));
            Rational conv(p1, q1);
            semi.canonicalize();
            conv.canonicalize();
            Rational ds = abs(semi - target);
            Rational dc = abs(conv - target);
            return ds < dc ? semi : conv;
        }
        mpz_class p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Rational frac = rem - Rational(a);
        if (frac == 0) break;
        rem = 1 / frac;
    }
    Rational out(p1, q1);
    out.canonicalize();
    return out;
}

/// Formats a real with 12 significant digits (the reporting precision).
inline std::string format_sig12(double x) {
    if (x == 0.0) x = 0.0;  // drop negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Rounds to 12 significant digits.
inline double round_sig12(double x) { return std::strtod(format_sig12(x).c_str(), nullptr); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace medbounds

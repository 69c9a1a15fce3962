#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace gravomit {

// Scalar used where double runs out of digits (peak-position and
// peak-height differences of order 1e-16 relative).
#if defined(__SIZEOF_FLOAT128__) && !defined(GRAVOMIT_NO_FLOAT128)
using extended_real = __float128;
inline constexpr bool has_quad_precision = true;
#else
using extended_real = long double;
inline constexpr bool has_quad_precision = false;
#endif

template <class Real>
struct real_traits {
    static constexpr Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
    static constexpr const char* name() {
        if constexpr (std::numeric_limits<Real>::digits == 53) {
            return "double";
        } else {
            return "long double";
        }
    }
};

#if defined(__SIZEOF_FLOAT128__) && !defined(GRAVOMIT_NO_FLOAT128)
template <>
struct real_traits<__float128> {
    // 2^-112
    static constexpr __float128 epsilon() { return __float128(1.0) / __float128(5192296858534827628530496329220096.0); }
    static constexpr const char* name() { return "binary128"; }
};
#endif

template <class Real>
constexpr Real abs_real(Real x) {
    return x < Real(0) ? -x : x;
}

template <class Real>
constexpr Real norm_sq(const std::complex<Real>& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

template <class To, class From>
std::complex<To> complex_cast(const std::complex<From>& z) {
    return {static_cast<To>(z.real()), static_cast<To>(z.imag())};
}

} // namespace gravomit

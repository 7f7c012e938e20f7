#pragma once

// Scalar log/exp shared by every sampling path.
//
// The AVX2 kernels evaluate exactly the same operation sequence lane by lane,
// so scalar and vector results are bit-identical. Both rely on the build
// disabling floating-point contraction (-ffp-contract=off).

#include <bit>
#include <cmath>
#include <cstdint>

namespace moonlab::fastmath {

namespace detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kInvLn2 = 1.44269504088896338700e+00;
inline constexpr double kSqrt2 = 1.41421356237309514547e+00;

inline constexpr double kLg1 = 6.666666666666735130e-01;
inline constexpr double kLg2 = 3.999999999940941908e-01;
inline constexpr double kLg3 = 2.857142874366239149e-01;
inline constexpr double kLg4 = 2.222219843214978396e-01;
inline constexpr double kLg5 = 1.818357216161805012e-01;
inline constexpr double kLg6 = 1.531383769920937332e-01;
inline constexpr double kLg7 = 1.479819860511658591e-01;

inline constexpr double kP1 = 1.66666666666666019037e-01;
inline constexpr double kP2 = -2.77777777770155933842e-03;
inline constexpr double kP3 = 6.61375632143793436117e-05;
inline constexpr double kP4 = -1.65339022054652515390e-06;
inline constexpr double kP5 = 4.13813679705723846039e-08;

inline constexpr double kExpMax = 709.0;
inline constexpr double kExpMin = -708.0;

inline constexpr std::uint64_t kMantissaMask = 0x000fffffffffffffULL;
inline constexpr std::uint64_t kOneBits = 0x3ff0000000000000ULL;

}  // namespace detail

/// Natural log for finite normal x > 0.
inline double log_positive(double x) {
    using namespace detail;
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52)) - 1023.0;
    double m = std::bit_cast<double>((bits & kMantissaMask) | kOneBits);  // [1, 2)
    if (m > kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    const double f = m - 1.0;
    const double s = f / (2.0 + f);
    const double z = s * s;
    const double w = z * z;
    const double t1 = w * (kLg2 + w * (kLg4 + w * kLg6));
    const double t2 = z * (kLg1 + w * (kLg3 + w * (kLg5 + w * kLg7)));
    const double r = t2 + t1;
    const double hfsq = 0.5 * f * f;
    return e * kLn2Hi - ((hfsq - (s * (hfsq + r) + e * kLn2Lo)) - f);
}

/// exp(x); flushes to 0 below -708 and saturates to +inf above 709.
inline double exp_clamped(double x) {
    using namespace detail;
    if (x > kExpMax) return HUGE_VAL;
    if (x < kExpMin) return 0.0;
    const double k = std::nearbyint(x * kInvLn2);
    const double hi = x - k * kLn2Hi;
    const double lo = k * kLn2Lo;
    const double r = hi - lo;
    const double rr = r * r;
    const double c = r - rr * (kP1 + rr * (kP2 + rr * (kP3 + rr * (kP4 + rr * kP5))));
    const double y = 1.0 - ((lo - (r * c) / (2.0 - c)) - hi);
    const auto biased = static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023);
    return y * std::bit_cast<double>(biased << 52);
}

/// Standard exponential variate -ln(1-u) for u in [0,1).
inline double neg_log1m(double u) {
    if (u == 0.0) return 0.0;
    const double v = 1.0 - u;
    // 1 - u rounds when u is off the 2^-53 grid; d is the exact rounding error.
    const double d = (1.0 - v) - u;
    return -log_positive(v) - d / v;
}

/// scale * e^(1/shape), the Weibull inverse CDF given an exponential variate e.
inline double weibull_from_exponential(double e, double inv_shape, double scale, bool unit_shape) {
    if (unit_shape) return scale * e;
    if (e == 0.0) return 0.0;
    return scale * exp_clamped(log_positive(e) * inv_shape);
}

}  // namespace moonlab::fastmath

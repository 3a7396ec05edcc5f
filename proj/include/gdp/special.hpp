#pragma once

#include <cmath>
#include <cstdlib>

#include "gdp/errors.hpp"

namespace gdp {

// Scaled complementary error function exp(z^2) erfc(z) for z >= 0.
// Direct product below the exp overflow point, asymptotic series above.
inline double erfcx(double z) {
    if (z < 0.0) throw DataError("erfcx: requires z >= 0");
    if (z < 26.0) return std::exp(z * z) * std::erfc(z);
    // 1/(z sqrt(pi)) * sum (-1)^k (2k-1)!! / (2 z^2)^k
    double inv2z2 = 1.0 / (2.0 * z * z);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 20; ++k) {
        term *= -(2.0 * k - 1.0) * inv2z2;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / (z * 1.7724538509055160273);
}

// Kummer's confluent hypergeometric 1F1(a; b; x) by power series with
// term-ratio stopping (relative term < 1e-15, cap 1e4 terms). Negative
// arguments go through the Kummer transformation 1F1(a,b,x) =
// e^x 1F1(b-a,b,-x) so the series keeps positive terms where possible.
inline double hyp1f1(double a, double b, double x) {
    if (b <= 0.0 && b == std::floor(b))
        throw DataError("hyp1f1: b must not be a non-positive integer");
    if (x < 0.0) return std::exp(x) * hyp1f1(b - a, b, -x);
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 10000; ++k) {
        term *= (a + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-15 * std::abs(sum)) return sum;
    }
    throw NumericError("hyp1f1: series did not converge within 10^4 terms");
}

}  // namespace gdp

#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>

#include "gdp/errors.hpp"
#include "gdp/special.hpp"

using namespace gdp;

TEST_CASE("erfcx agrees with the direct product for small arguments") {
    for (double z : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 25.9}) {
        double direct = std::exp(z * z) * std::erfc(z);
        REQUIRE(erfcx(z) == Catch::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("erfcx large-argument branch is continuous and follows 1/(z sqrt(pi))") {
    double below = erfcx(25.999999);
    double above = erfcx(26.000001);
    REQUIRE(std::abs(below - above) / below < 1e-9);
    for (double z : {30.0, 100.0, 1e4}) {
        double leading = 1.0 / (z * std::sqrt(M_PI));
        REQUIRE(erfcx(z) == Catch::Approx(leading * (1.0 - 1.0 / (2.0 * z * z))).epsilon(1e-6));
    }
    REQUIRE_THROWS_AS(erfcx(-0.5), DataError);
}

TEST_CASE("hyp1f1 matches an independent implementation") {
    for (double a : {0.5, 1.0, 2.5, 4.0}) {
        for (double b : {0.5, 1.5, 3.0}) {
            for (double x : {-40.0, -8.0, -1.0, 0.0, 0.5, 3.0, 10.0, 30.0}) {
                double ours = hyp1f1(a, b, x);
                double ref = boost::math::hypergeometric_1F1(a, b, x);
                REQUIRE(ours == Catch::Approx(ref).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("hyp1f1 rejects poles and reports non-convergence") {
    REQUIRE_THROWS_AS(hyp1f1(1.0, 0.0, 1.0), DataError);
    REQUIRE_THROWS_AS(hyp1f1(1.0, -2.0, 1.0), DataError);
    // the series needs roughly x terms; far past the cap it must fail loudly
    REQUIRE_THROWS_AS(hyp1f1(1.0, 2.0, 5.0e4), NumericError);
}

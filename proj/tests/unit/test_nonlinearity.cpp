#include "subdiff/errors.hpp"
#include "subdiff/nonlinearity.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace subdiff;

namespace {

std::vector<Nonlinearity> catalogue() {
    return {Nonlinearity::linear(-2.0), Nonlinearity::linear(5.0), Nonlinearity::quadratic(), Nonlinearity::nsy(),
            Nonlinearity::power(3.0), Nonlinearity::power(1.5), Nonlinearity::power(2.5, false),
            Nonlinearity::polynomial({1.0, 0.0, -1.0}), Nonlinearity::quadratic().scaled(0.5)};
}

} // namespace

TEST_SUITE("nonlinearity") {

TEST_CASE("values") {
    CHECK(Nonlinearity::linear(3.0)(2.0) == 6.0);
    CHECK(Nonlinearity::quadratic()(-3.0) == 9.0);
    CHECK(Nonlinearity::nsy()(3.0) == 6.0);
    CHECK(Nonlinearity::power(3.0)(-2.0) == doctest::Approx(-8.0));
    CHECK(Nonlinearity::power(3.0, false)(-2.0) == 0.0);
    CHECK(Nonlinearity::polynomial({1.0, 2.0, 3.0})(2.0) == 17.0);
    CHECK(Nonlinearity::zero()(123.0) == 0.0);
    CHECK(Nonlinearity::zero().is_zero());
    CHECK(!Nonlinearity::linear(1.0).is_zero());
    CHECK(Nonlinearity::quadratic().scaled(0.5)(4.0) == 8.0);
    CHECK(Nonlinearity::nsy().f0prime() == -1.0);
    CHECK(Nonlinearity::quadratic().f0prime() == 0.0);
}

TEST_CASE("derivatives match centered differences") {
    testing::Gen gen;
    std::vector<double> points;
    for (int i = 0; i < 50; ++i) points.push_back(gen.uniform(-3.0, 3.0));
    for (const auto& f : catalogue()) {
        CAPTURE(f.name());
        CHECK(f.derivative_self_test(points) <= 1e-6);
        for (double u : points) {
            const double h = 1e-5 * std::max(1.0, std::abs(u));
            const double fd = (f(u + h) - f(u - h)) / (2 * h);
            CHECK(std::abs(f.derivative(u) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("reciprocal integral against quadrature") {
    using boost::math::quadrature::gauss_kronrod;
    testing::Gen gen;
    for (const auto& f : {Nonlinearity::quadratic(), Nonlinearity::power(3.0), Nonlinearity::nsy(),
                          Nonlinearity::linear(2.0)}) {
        for (int trial = 0; trial < 5; ++trial) {
            const double y0 = gen.uniform(1.5, 4.0);
            const double y = y0 + gen.uniform(0.1, 10.0);
            const double expected = gauss_kronrod<double, 61>::integrate([&](double r) { return 1.0 / f(r); }, y0, y, 15, 1e-13);
            CHECK(f.reciprocal_integral(y0, y) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("reciprocal integral to infinity") {
    CHECK(Nonlinearity::quadratic().reciprocal_integral_to_infinity(4.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(Nonlinearity::power(3.0).reciprocal_integral_to_infinity(2.0) == doctest::Approx(0.125).epsilon(1e-10));
    // int_2^inf dr / (r^2 - r) = ln 2
    CHECK(Nonlinearity::nsy().reciprocal_integral_to_infinity(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(Nonlinearity::linear(1.0).reciprocal_integral_to_infinity(1.0) == std::numeric_limits<double>::infinity());
    CHECK(Nonlinearity::quadratic().scaled(0.5).reciprocal_integral_to_infinity(25.0) ==
          doctest::Approx(0.08).epsilon(1e-12));
    CHECK_THROWS_AS(Nonlinearity::nsy().reciprocal_integral_to_infinity(0.5), DomainError);
    CHECK_THROWS_AS(Nonlinearity::linear(-1.0).reciprocal_integral_to_infinity(1.0), DomainError);
}

TEST_CASE("domain restriction") {
    const auto f = Nonlinearity::quadratic().with_domain_lower(0.0);
    CHECK(f.in_domain(0.1));
    CHECK(!f.in_domain(0.0));
    CHECK(f.scaled(2.0).domain_lower() == 0.0);
    CHECK(Nonlinearity::linear(1.0).in_domain(-1e300));
}

}

#include "subdiff/errors.hpp"
#include "subdiff/kernel.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace subdiff;
namespace bm = boost::math;
namespace quad = boost::math::quadrature;

namespace {

double integrate_singular(const std::function<double(double)>& f, double a, double b) {
    quad::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b) {
    return quad::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// k(t) = int_0^1 t^(b-1)/Gamma(b) db, without the library's Legendre rule
double distributed_k(double t) {
    return integrate_smooth([t](double b) { return b <= 0.0 ? 0.0 : std::pow(t, b - 1.0) / bm::tgamma(b); }, 0.0, 1.0);
}

double distributed_K(double t) {
    return integrate_smooth([t](double b) { return std::pow(t, b) / bm::tgamma(b + 1.0); }, 0.0, 1.0);
}

double distributed_l(double t) { return std::exp(t) * bm::expint(1, t); }

std::vector<KernelPair> catalogue() {
    return {KernelPair::fractional(0.3), KernelPair::fractional(0.5), KernelPair::fractional(0.8),
            KernelPair::fractional_exp(0.5, 1.0), KernelPair::fractional_exp(0.25, 3.0),
            KernelPair::distributed_order()};
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("pointwise kernels at t = 1") {
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    CHECK(KernelPair::fractional(0.5).k(1.0) == doctest::Approx(inv_sqrt_pi).epsilon(1e-13));
    CHECK(KernelPair::fractional(0.5).l(1.0) == doctest::Approx(inv_sqrt_pi).epsilon(1e-13));
    CHECK(KernelPair::fractional_exp(0.5, 0.0).k(1.0) == doctest::Approx(inv_sqrt_pi).epsilon(1e-13));
    const auto d = KernelPair::distributed_order();
    CHECK(d.k(1.0) == doctest::Approx(distributed_k(1.0)).epsilon(1e-10));
    CHECK(d.k(1.0) == doctest::Approx(0.54124).epsilon(1e-4));
    CHECK(d.l(1.0) == doctest::Approx(0.5963473623231940).epsilon(1e-12));
}

TEST_CASE("distributed-order kernels against independent quadrature") {
    const auto d = KernelPair::distributed_order();
    testing::Gen gen;
    for (int i = 0; i < 40; ++i) {
        const double t = gen.log_uniform(1e-3, 1e3);
        CHECK(std::abs(d.k(t) / distributed_k(t) - 1.0) < 1e-9);
        CHECK(std::abs(d.cumulative_k(t) / distributed_K(t) - 1.0) < 1e-9);
        CHECK(std::abs(d.l(t) / distributed_l(t) - 1.0) < 1e-12);
        const double L = integrate_singular([](double s) { return distributed_l(s); }, 0.0, t);
        CHECK(std::abs(d.cumulative_l(t) / L - 1.0) < 1e-9);
    }
}

TEST_CASE("tempered kernels against quadrature of their definitions") {
    for (auto [alpha, g] : {std::pair{0.5, 1.0}, std::pair{0.25, 3.0}, std::pair{0.8, 0.2}}) {
        const auto p = KernelPair::fractional_exp(alpha, g);
        const auto ga = [alpha = alpha, g = g](double s) {
            return std::pow(s, alpha - 1.0) * std::exp(-g * s) / bm::tgamma(alpha);
        };
        for (double t : {0.01, 0.3, 1.0, 4.0, 20.0}) {
            const double k = std::pow(t, -alpha) * std::exp(-g * t) / bm::tgamma(1.0 - alpha);
            CHECK(p.k(t) == doctest::Approx(k).epsilon(1e-12));
            const double l = ga(t) + g * integrate_singular(ga, 0.0, t);
            CHECK(p.l(t) == doctest::Approx(l).epsilon(1e-9));
            const double K = integrate_singular([&](double s) { return p.k(s); }, 0.0, t);
            CHECK(p.cumulative_k(t) == doctest::Approx(K).epsilon(1e-9));
            const double L = integrate_singular([&](double s) { return p.l(s); }, 0.0, t);
            CHECK(p.cumulative_l(t) == doctest::Approx(L).epsilon(1e-9));
        }
    }
}

TEST_CASE("tempered l keeps the fractional singularity") {
    const auto p = KernelPair::fractional_exp(0.5, 1.0);
    for (double t : {1e-6, 1e-8, 1e-10}) {
        CHECK(p.l(t) * std::sqrt(std::numbers::pi * t) == doctest::Approx(1.0).epsilon(1e-2));
    }
}

TEST_CASE("fractional cumulatives in closed form") {
    const auto p = KernelPair::fractional(0.5);
    CHECK(p.cumulative_l(1.0) == doctest::Approx(1.1283791670955126).epsilon(1e-13));
    CHECK(p.cumulative_k(1.0) == doctest::Approx(1.1283791670955126).epsilon(1e-13));
    for (const auto& pair : catalogue()) {
        CHECK(pair.cumulative_k(0.0) == 0.0);
        CHECK(pair.cumulative_l(0.0) == 0.0);
        CHECK_THROWS_AS(pair.k(0.0), DomainError);
        CHECK_THROWS_AS(pair.l(-1.0), DomainError);
        CHECK_THROWS_AS(pair.cumulative_k(-1e-3), DomainError);
    }
}

TEST_CASE("order and factory validation") {
    CHECK_THROWS_AS(KernelPair::fractional(0.97), DomainError);
    CHECK_THROWS_AS(KernelPair::fractional(0.0), DomainError);
    CHECK_THROWS_AS(KernelPair::fractional_exp(0.5, -1.0), DomainError);
    CHECK_THROWS_AS(KernelPair::distributed_order(0), DomainError);
    CHECK(!KernelPair::distributed_order().order().has_value());
    CHECK(*KernelPair::fractional(0.3).order() == 0.3);
}

TEST_CASE("weights are nonnegative and nonincreasing on random grids") {
    testing::Gen gen;
    for (const auto& pair : catalogue()) {
        for (int trial = 0; trial < 5; ++trial) {
            const TimeGrid grid{gen.log_uniform(1e-4, 1e-1), gen.integer(10, 400)};
            for (const auto& w : {k_weights(pair, grid), l_weights(pair, grid)}) {
                REQUIRE(w.values.size() == static_cast<std::size_t>(grid.steps));
                for (std::size_t m = 0; m < w.values.size(); ++m) {
                    CHECK(w.values[m] >= 0.0);
                    if (m > 0) CHECK(w.values[m] <= w.values[m - 1]);
                }
            }
            double sum = 0.0;
            for (double b : k_weights(pair, grid).values) sum += grid.tau * b;
            CHECK(sum == doctest::Approx(pair.cumulative_k(grid.horizon())).epsilon(1e-12));
        }
    }
}

TEST_CASE("first weights in closed form") {
    const auto p = KernelPair::fractional(0.5);
    const TimeGrid grid{0.01, 100};
    CHECK(l_weights(p, grid).values[0] == doctest::Approx(0.1128379167).epsilon(1e-9));
    CHECK(k_weights(p, grid).values[0] == doctest::Approx(11.28379167).epsilon(1e-9));
}

TEST_CASE("time grid from a horizon") {
    const auto g = TimeGrid::from_horizon(1.0, 1e-3);
    CHECK(g.steps == 1000);
    CHECK(g.horizon() == doctest::Approx(1.0));
    CHECK_THROWS_AS(TimeGrid::from_horizon(1.0, 0.3), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_horizon(1.0, 0.0), DomainError);
}

TEST_CASE("discrete convolution") {
    const auto p = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    const auto w = l_weights(p, grid);
    std::vector<double> zeros(grid.steps + 1, 0.0);
    for (double v : discrete_conv(w, zeros)) CHECK(v == 0.0);

    std::vector<double> ones(grid.steps + 1, 1.0);
    const auto L = discrete_conv(w, ones);
    for (int n = 0; n <= grid.steps; n += 37) {
        CHECK(L[n] == doctest::Approx(p.cumulative_l(grid.time(n))).epsilon(1e-12));
    }

    std::vector<double> ramp(grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) ramp[n] = grid.time(n);
    const double exact = 1.0 / bm::tgamma(2.5);
    CHECK(std::abs(discrete_conv(w, ramp).back() - exact) <= 2e-3);

    std::vector<double> too_long(grid.steps + 2, 1.0);
    CHECK_THROWS_AS(discrete_conv(w, too_long), std::invalid_argument);
    CHECK_THROWS_AS(discrete_conv(w, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("discrete k * l approaches one") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    CHECK(verify_pair(KernelPair::fractional(0.5), grid, 0.1) <= 1e-2);
    CHECK(verify_pair(KernelPair::fractional(0.25), grid, 0.1) <= 2e-2);
    CHECK(verify_pair(KernelPair::distributed_order(), TimeGrid::from_horizon(1.0, 1e-3), 0.5) <= 3e-2);
    CHECK_THROWS_AS(verify_pair(KernelPair::fractional(0.5), grid, 1.5), DomainError);
}

TEST_CASE("discrete k * l deviation shrinks under step halving") {
    for (const auto& pair : catalogue()) {
        const double coarse = verify_pair(pair, TimeGrid::from_horizon(2.0, 2e-3), 0.5);
        const double fine = verify_pair(pair, TimeGrid::from_horizon(2.0, 1e-3), 0.5);
        CAPTURE(pair.name());
        CHECK(fine <= 0.9 * coarse);
    }
}

}

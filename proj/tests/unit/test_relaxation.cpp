#include "subdiff/errors.hpp"
#include "subdiff/kernel.hpp"
#include "support.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>

using namespace subdiff;
namespace bm = boost::math;

namespace {

// E_{1/2}(-x) = e^{x^2} erfc(x)
double ml_half(double x) { return std::exp(x * x) * bm::erfc(x); }

// Direct series, in long double; adequate for |z| <= 3.
double ml_series(double alpha, double z) {
    long double sum = 0.0L;
    long double zj = 1.0L;
    for (int j = 0; j < 400; ++j) {
        const long double term = zj / bm::tgamma(static_cast<long double>(alpha) * j + 1.0L);
        sum += term;
        if (j > 10 && std::fabs(term) < 1e-20L) break;
        zj *= z;
    }
    return static_cast<double>(sum);
}

double max_ml_error(const KernelPair& pair, double alpha, double mu, const TimeGrid& grid, double t_from,
                    RelaxationScheme scheme) {
    const auto fam = relaxation_family(pair, mu, grid, scheme);
    double err = 0.0;
    for (int n = 1; n <= grid.steps; ++n) {
        const double t = grid.time(n);
        if (t < t_from) continue;
        err = std::max(err, std::abs(fam.s[n] - ml_series(alpha, -mu * std::pow(t, alpha))));
    }
    return err;
}

std::vector<KernelPair> catalogue() {
    return {KernelPair::fractional(0.3), KernelPair::fractional(0.7), KernelPair::fractional_exp(0.5, 1.0),
            KernelPair::distributed_order()};
}

} // namespace

TEST_SUITE("relaxation") {

TEST_CASE("gamma = 0 keeps s identically one") {
    for (const auto& pair : catalogue()) {
        const auto fam = relaxation_family(pair, 0.0, TimeGrid{1e-2, 200});
        // the recursion telescopes to 1; only rounding remains
        for (double v : fam.s) CHECK(std::abs(v - 1.0) <= 1e-12);
        for (double v : fam.h) CHECK(std::abs(v) <= 1e-12 / 1e-2);
    }
}

TEST_CASE("monotone family for nonnegative gamma") {
    testing::Gen gen;
    for (const auto& pair : catalogue()) {
        for (int trial = 0; trial < 6; ++trial) {
            const double gamma = gen.log_uniform(1e-2, 1e2);
            const TimeGrid grid{gen.log_uniform(1e-4, 1e-1), gen.integer(20, 300)};
            const auto fam = relaxation_family(pair, gamma, grid);
            for (std::size_t n = 0; n < fam.s.size(); ++n) {
                CHECK(fam.s[n] > 0.0);
                CHECK(fam.s[n] <= 1.0);
                if (n > 0) {
                    CHECK(fam.s[n] <= fam.s[n - 1]);
                    CHECK(fam.k_gamma[n] <= fam.k_gamma[n - 1]);
                }
            }
            for (double h : fam.h) CHECK(h >= 0.0);
        }
    }
}

TEST_CASE("gamma (1 * r) + s = 1") {
    testing::Gen gen;
    for (const auto& pair : catalogue()) {
        for (auto scheme : {RelaxationScheme::KForm, RelaxationScheme::LForm}) {
            const double gamma = gen.log_uniform(1e-1, 1e1);
            const TimeGrid grid{1e-3, 500};
            const auto fam = relaxation_family(pair, gamma, grid, scheme);
            double acc = 0.0;
            for (int n = 1; n <= grid.steps; ++n) {
                acc += grid.tau * fam.r[n - 1];
                CHECK(std::abs(gamma * acc + fam.s[n] - 1.0) <= 1e-10);
            }
        }
    }
}

TEST_CASE("s(1) against e erfc(1)") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    const auto fam = relaxation_family(KernelPair::fractional(0.5), 1.0, grid);
    CHECK(std::abs(fam.s.back() - ml_half(1.0)) <= 1e-3);
    CHECK(ml_half(1.0) == doctest::Approx(0.4275836).epsilon(1e-7));
}

TEST_CASE("negative gamma grows like the Mittag-Leffler function") {
    const auto grid = TimeGrid::from_horizon(0.1, 1e-4);
    const auto fam = relaxation_family(KernelPair::fractional(0.5), -5.1304, grid);
    const double exact = ml_series(0.5, 5.1304 * std::sqrt(0.1));
    CHECK(exact == doctest::Approx(27.50).epsilon(2e-3));
    CHECK(fam.s.back() == doctest::Approx(exact).epsilon(2e-2));
}

TEST_CASE("first k-form step in closed form") {
    testing::Gen gen;
    for (int trial = 0; trial < 20; ++trial) {
        const double alpha = gen.uniform(0.1, 0.9);
        const double gamma = gen.log_uniform(1e-2, 1e2);
        const double tau = gen.log_uniform(1e-5, 1e-1);
        const TimeGrid grid{tau, 3};
        const double b0 = std::pow(tau, -alpha) / bm::tgamma(2.0 - alpha);
        const auto fam = relaxation_family(KernelPair::fractional(alpha), gamma, grid);
        CHECK(fam.s[1] == doctest::Approx(b0 / (b0 + gamma)).epsilon(1e-12));
    }
}

TEST_CASE("k-form agrees with Mittag-Leffler away from the origin") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            CAPTURE(alpha);
            CAPTURE(mu);
            CHECK(max_ml_error(KernelPair::fractional(alpha), alpha, mu, grid, 0.05, RelaxationScheme::KForm) <=
                  1e-3);
        }
    }
}

TEST_CASE("l-form agrees with Mittag-Leffler on the whole grid") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    for (double alpha : {0.5, 0.7}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            CHECK(max_ml_error(KernelPair::fractional(alpha), alpha, mu, grid, 0.0, RelaxationScheme::LForm) <=
                  1e-3);
        }
    }
}

TEST_CASE("k-form and l-form cross-check") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    for (const auto& pair : catalogue()) {
        CAPTURE(pair.name());
        CHECK(relaxation_cross_check(pair, 1.0, grid) <= 5e-2);
    }
}

TEST_CASE("nonpositive pivot is a step-size error") {
    const TimeGrid grid{1e-2, 10};
    const auto pair = KernelPair::fractional(0.5);
    const double b0 = k_weights(pair, grid).values[0];
    CHECK_THROWS_AS(relaxation_family(pair, -b0 * 1.01, grid), StepSizeError);
    const double w0 = l_weights(pair, grid).values[0];
    CHECK_THROWS_AS(relaxation_family(pair, -1.01 / w0, grid, RelaxationScheme::LForm), StepSizeError);
    CHECK_THROWS_AS(relaxation_family(pair, std::nan(""), grid), DomainError);
}

TEST_CASE("ultraslow decay bound") {
    const auto grid = TimeGrid::from_horizon(1000.0, 0.1);
    const auto fam = relaxation_family(KernelPair::distributed_order(), 1.0, grid);
    for (int n = 100; n <= grid.steps; n += 10) {
        CHECK(fam.s[n] <= 1.05 / (1.0 + 0.5 * std::log(grid.time(n))));
    }
}

TEST_CASE("convexity inequality") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    const auto kg = relaxation_family(KernelPair::fractional(0.5), 2.0, grid).k_gamma;
    std::vector<double> sine(grid.steps + 1), ramp(grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) {
        sine[n] = std::sin(grid.time(n));
        ramp[n] = 1.0 + grid.time(n);
    }
    const ConvexFunction linear{[](double y) { return y; }, [](double) { return 1.0; }};
    const ConvexFunction square{[](double y) { return y * y; }, [](double y) { return 2.0 * y; }};
    const ConvexFunction neg_log{[](double y) { return -std::log(y); }, [](double y) { return -1.0 / y; }};
    CHECK(std::abs(check_convexity_inequality(kg, linear, sine, 0.0)) <= 1e-12);
    CHECK(check_convexity_inequality(kg, square, sine, 0.0) >= -1e-2);
    CHECK(check_convexity_inequality(kg, neg_log, ramp, 1.0) >= -1e-2);

    // property: any convex H, any path, any nonincreasing nonnegative kernel
    testing::Gen gen;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> kernel(50), path(51);
        double level = gen.uniform(0.5, 5.0);
        for (auto& k : kernel) k = level *= gen.uniform(0.5, 1.0);
        for (auto& u : path) u = gen.uniform(-2.0, 2.0);
        CHECK(check_convexity_inequality(kernel, square, path, path[0]) >= -1e-12);
    }
    CHECK_THROWS_AS(check_convexity_inequality(kg, square, std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("approximate identity sharpens with n") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    const auto pair = KernelPair::fractional(0.5);
    std::vector<double> zero(grid.steps + 1, 0.0), sine(grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) sine[n] = std::sin(grid.time(n));
    CHECK(approx_identity_error(pair, 10.0, zero, grid) == 0.0);
    const double e10 = approx_identity_error(pair, 10.0, sine, grid);
    const double e100 = approx_identity_error(pair, 100.0, sine, grid);
    const double e1000 = approx_identity_error(pair, 1000.0, sine, grid);
    CHECK(e100 < e10);
    CHECK(e1000 < e100);
    CHECK_THROWS_AS(approx_identity_error(pair, 10.0, std::vector<double>(5, 0.0), grid), std::invalid_argument);
}

}

// Full-grid comparison including the first step; kept separate because the
// k-form first step carries an O(tau^alpha) defect (see README).
TEST_SUITE("relaxation_ml_consistency") {

TEST_CASE("k-form matches Mittag-Leffler within 1e-3 on the whole grid") {
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            CAPTURE(alpha);
            CAPTURE(mu);
            CHECK(max_ml_error(KernelPair::fractional(alpha), alpha, mu, grid, 0.0, RelaxationScheme::KForm) <=
                  1e-3);
        }
    }
}

}

#include "subdiff/nonlinearity.hpp"

#include "subdiff/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subdiff {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kTailStart = 1e6;

double polynomial_value(const std::vector<double>& a, double u) {
    double acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
    return acc;
}

double polynomial_derivative(const std::vector<double>& a, double u) {
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > 1;) acc = acc * u + static_cast<double>(i) * a[i];
    return acc;
}

// degree and leading coefficient after trimming trailing zeros
std::pair<int, double> polynomial_leading(const std::vector<double>& a) {
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != 0.0) return {static_cast<int>(i), a[i]};
    }
    return {-1, 0.0};
}

double integrate(const auto& fn, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 25, 1e-13);
}

} // namespace

Nonlinearity::Nonlinearity(NonlinearityVariant v, double factor) : variant_(std::move(v)), factor_(factor) {
    if (!std::isfinite(factor_)) throw DomainError("nonlinearity: factor must be finite");
    if (const auto* power = std::get_if<PowerTerm>(&variant_)) {
        if (!(power->p >= 1.0)) throw DomainError("nonlinearity: power exponent must be >= 1");
    }
    if (const auto* poly = std::get_if<PolynomialTerm>(&variant_)) {
        for (double a : poly->coefficients) {
            if (!std::isfinite(a)) throw DomainError("nonlinearity: polynomial coefficients must be finite");
        }
    }
}

std::string Nonlinearity::name() const {
    std::ostringstream os;
    if (factor_ != 1.0) os << factor_ << "*";
    std::visit(Overloaded{
                   [&](const LinearTerm& t) { os << "linear(c=" << t.c << ")"; },
                   [&](const PowerTerm& t) {
                       os << "power(p=" << t.p << (t.odd_extension ? ", odd)" : ", zero)");
                   },
                   [&](const QuadraticTerm&) { os << "quadratic"; },
                   [&](const NsyTerm&) { os << "nsy"; },
                   [&](const PolynomialTerm& t) {
                       os << "polynomial(";
                       for (std::size_t i = 0; i < t.coefficients.size(); ++i) {
                           os << (i ? " " : "") << t.coefficients[i];
                       }
                       os << ")";
                   },
               },
               variant_);
    return os.str();
}

double Nonlinearity::operator()(double u) const {
    const double value = std::visit(
        Overloaded{
            [&](const LinearTerm& t) { return t.c * u; },
            [&](const PowerTerm& t) {
                if (u >= 0.0) return std::pow(u, t.p);
                return t.odd_extension ? -std::pow(-u, t.p) : 0.0;
            },
            [&](const QuadraticTerm&) { return u * u; },
            [&](const NsyTerm&) { return u * u - u; },
            [&](const PolynomialTerm& t) { return polynomial_value(t.coefficients, u); },
        },
        variant_);
    return factor_ * value;
}

double Nonlinearity::derivative(double u) const {
    const double value = std::visit(
        Overloaded{
            [&](const LinearTerm& t) { return t.c; },
            [&](const PowerTerm& t) {
                if (u >= 0.0) return t.p == 1.0 ? 1.0 : t.p * std::pow(u, t.p - 1.0);
                if (!t.odd_extension) return 0.0;
                return t.p == 1.0 ? 1.0 : t.p * std::pow(-u, t.p - 1.0);
            },
            [&](const QuadraticTerm&) { return 2.0 * u; },
            [&](const NsyTerm&) { return 2.0 * u - 1.0; },
            [&](const PolynomialTerm& t) { return polynomial_derivative(t.coefficients, u); },
        },
        variant_);
    return factor_ * value;
}

bool Nonlinearity::is_zero() const {
    if (factor_ == 0.0) return true;
    if (const auto* poly = std::get_if<PolynomialTerm>(&variant_)) {
        return polynomial_leading(poly->coefficients).first < 0;
    }
    if (const auto* lin = std::get_if<LinearTerm>(&variant_)) return lin->c == 0.0;
    return false;
}

double Nonlinearity::reciprocal_integral(double y0, double y) const {
    if (!(y >= y0)) throw DomainError("reciprocal_integral: need y >= y0");
    if (y == y0) return 0.0;
    // positivity on [y0, y], sampled
    for (int i = 0; i <= 256; ++i) {
        const double r = y0 + (y - y0) * i / 256.0;
        if (!((*this)(r) > 0.0)) {
            throw DomainError("reciprocal_integral: f is not positive at r=" + std::to_string(r));
        }
    }
    const double scale = factor_;
    const double closed = std::visit(
        Overloaded{
            [&](const LinearTerm& t) { return std::log(y / y0) / t.c; },
            [&](const PowerTerm& t) {
                if (t.p == 1.0) return std::log(y / y0);
                return (std::pow(y0, 1.0 - t.p) - std::pow(y, 1.0 - t.p)) / (t.p - 1.0);
            },
            [&](const QuadraticTerm&) { return 1.0 / y0 - 1.0 / y; },
            [&](const NsyTerm&) { return std::log((y - 1.0) / y) - std::log((y0 - 1.0) / y0); },
            [&](const PolynomialTerm&) { return std::numeric_limits<double>::quiet_NaN(); },
        },
        variant_);
    if (!std::isnan(closed)) return closed / scale;

    const auto reciprocal = [this](double r) { return 1.0 / (*this)(r); };
    double total = 0.0;
    double lower = y0;
    if (lower <= 0.0) {
        const double upper = std::min(y, 1.0);
        total += integrate(reciprocal, lower, upper);
        lower = upper;
    }
    if (y > lower) {
        // r = e^s
        const auto in_log = [&](double s) {
            const double r = std::exp(s);
            return r * reciprocal(r);
        };
        total += integrate(in_log, std::log(lower), std::log(y));
    }
    return total;
}

double Nonlinearity::reciprocal_integral_to_infinity(double y0) const {
    if (!((*this)(y0) > 0.0)) {
        throw DomainError("blowup bound: f must be positive at u0=" + std::to_string(y0));
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        Overloaded{
            [&](const LinearTerm&) {
                if (!(y0 > 0.0)) throw DomainError("blowup bound: linear term needs u0 > 0");
                return inf;
            },
            [&](const PowerTerm& t) {
                if (!(y0 > 0.0)) throw DomainError("blowup bound: power term needs u0 > 0");
                if (t.p == 1.0) return inf;
                return std::pow(y0, 1.0 - t.p) / ((t.p - 1.0) * factor_);
            },
            [&](const QuadraticTerm&) {
                if (!(y0 > 0.0)) throw DomainError("blowup bound: quadratic term needs u0 > 0");
                return 1.0 / (y0 * factor_);
            },
            [&](const NsyTerm&) {
                if (!(y0 > 1.0)) throw DomainError("blowup bound: u^2 - u needs u0 > 1");
                return std::log(y0 / (y0 - 1.0)) / factor_;
            },
            [&](const PolynomialTerm& t) {
                const auto [degree, leading] = polynomial_leading(t.coefficients);
                if (degree <= 1) {
                    if (degree == 1 && leading * factor_ > 0.0 && y0 > 0.0 &&
                        polynomial_value(t.coefficients, 0.0) * factor_ >= 0.0) {
                        return inf;
                    }
                    throw DomainError("blowup bound: f is not positive on [u0, inf)");
                }
                if (!(leading * factor_ > 0.0)) {
                    throw DomainError("blowup bound: f is not positive on [u0, inf)");
                }
                const double cut = std::max(kTailStart, 2.0 * std::abs(y0));
                const double body = reciprocal_integral(y0, cut);
                // int_cut^inf dr / (a_d r^d) for the leading term
                const double tail =
                    std::pow(cut, 1.0 - degree) / ((degree - 1.0) * leading * factor_);
                return body + tail;
            },
        },
        variant_);
}

double Nonlinearity::derivative_self_test(const std::vector<double>& points) const {
    double worst = 0.0;
    for (double u : points) {
        const double h = 1e-6 * std::max(1.0, std::abs(u));
        const double fd = ((*this)(u + h) - (*this)(u - h)) / (2.0 * h);
        const double exact = derivative(u);
        worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
    return worst;
}

} // namespace subdiff

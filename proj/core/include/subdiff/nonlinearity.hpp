#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace subdiff {

struct LinearTerm {
    double c;
};

/// u^p on u >= 0; below zero either -|u|^p (odd) or 0.
struct PowerTerm {
    double p;
    bool odd_extension = true;
};

struct QuadraticTerm {};

/// f(u) = u^2 - u.
struct NsyTerm {};

/// a_0 + a_1 u + a_2 u^2 + ...
struct PolynomialTerm {
    std::vector<double> coefficients;
};

using NonlinearityVariant = std::variant<LinearTerm, PowerTerm, QuadraticTerm, NsyTerm, PolynomialTerm>;

/**
 * Reaction term f from a fixed catalogue, optionally multiplied by a
 * constant factor. Derivatives are analytic.
 */
class Nonlinearity {
public:
    explicit Nonlinearity(NonlinearityVariant v, double factor = 1.0);

    static Nonlinearity zero() { return Nonlinearity(PolynomialTerm{}); }
    static Nonlinearity linear(double c) { return Nonlinearity(LinearTerm{c}); }
    static Nonlinearity quadratic() { return Nonlinearity(QuadraticTerm{}); }
    static Nonlinearity power(double p, bool odd_extension = true) {
        return Nonlinearity(PowerTerm{p, odd_extension});
    }
    static Nonlinearity nsy() { return Nonlinearity(NsyTerm{}); }
    static Nonlinearity polynomial(std::vector<double> coefficients) {
        return Nonlinearity(PolynomialTerm{std::move(coefficients)});
    }

    const NonlinearityVariant& variant() const noexcept { return variant_; }
    double factor() const noexcept { return factor_; }
    std::string name() const;

    /// The same term multiplied by an extra constant.
    Nonlinearity scaled(double factor) const {
        Nonlinearity out(variant_, factor_ * factor);
        out.domain_lower_ = domain_lower_;
        return out;
    }

    /// Restricts f to (lower, inf); trajectories leaving it raise DomainEscapeError.
    Nonlinearity with_domain_lower(double lower) const {
        Nonlinearity out = *this;
        out.domain_lower_ = lower;
        return out;
    }
    double domain_lower() const noexcept { return domain_lower_; }
    bool in_domain(double u) const noexcept { return u > domain_lower_; }

    double operator()(double u) const;
    double derivative(double u) const;
    double f0prime() const { return derivative(0.0); }
    bool is_zero() const;

    /// int_{y0}^{y} dr / f(r); f must be positive on [y0, y].
    double reciprocal_integral(double y0, double y) const;

    /// int_{y0}^{inf} dr / f(r), +inf when it diverges. Throws DomainError
    /// unless f is positive on [y0, inf).
    double reciprocal_integral_to_infinity(double y0) const;

    /// Max relative mismatch between derivative() and centered differences on the points.
    double derivative_self_test(const std::vector<double>& points) const;

private:
    NonlinearityVariant variant_;
    double factor_;
    double domain_lower_ = -std::numeric_limits<double>::infinity();
};

} // namespace subdiff

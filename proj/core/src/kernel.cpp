#include "subdiff/kernel.hpp"

#include "subdiff/errors.hpp"
#include "subdiff/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace subdiff {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_order(double alpha) {
    if (!(alpha > KernelPair::kMinOrder && alpha < KernelPair::kMaxOrder)) {
        std::ostringstream os;
        os << "kernel order alpha=" << alpha << " outside (" << KernelPair::kMinOrder << ", "
           << KernelPair::kMaxOrder << ")";
        throw DomainError(os.str());
    }
}

void check_positive_time(double t, const char* what) {
    if (!(t > 0.0)) {
        throw DomainError(std::string(what) + ": time must be positive, got " + std::to_string(t));
    }
}

void check_nonnegative_time(double t, const char* what) {
    if (!(t >= 0.0)) {
        throw DomainError(std::string(what) + ": time must be nonnegative, got " +
                          std::to_string(t));
    }
}

// Gauss-Legendre rule on (0, 1) by Newton iteration on P_n.
void legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            derivative = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / derivative;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
}

double fractional_k(double alpha, double t) {
    return std::pow(t, -alpha) / special::gamma(1.0 - alpha);
}

double fractional_l(double alpha, double t) {
    return std::pow(t, alpha - 1.0) / special::gamma(alpha);
}

double fractional_cumulative_k(double alpha, double t) {
    return std::pow(t, 1.0 - alpha) / special::gamma(2.0 - alpha);
}

double fractional_cumulative_l(double alpha, double t) {
    return std::pow(t, alpha) / special::gamma(1.0 + alpha);
}

// L(t) = e^t E1(t) + ln t + gamma_E, rearranged below t = 1 to avoid cancellation:
// (e^t - 1) E1(t) - sum_{k>=1} (-t)^k / (k k!).
double distributed_cumulative_l(double t) {
    if (t > 1.0) return special::scaled_exp_integral_e1(t) + std::log(t) + kEulerGamma;
    double series = 0.0;
    double factor = 1.0;
    for (int k = 1; k < 60; ++k) {
        factor *= -t / k;
        const double term = factor / k;
        series += term;
        if (std::abs(term) < 1e-18 * std::abs(series)) break;
    }
    return std::expm1(t) * special::exp_integral_e1(t) - series;
}

} // namespace

KernelPair::KernelPair(KernelVariant v, int quad_depth)
    : variant_(v), quad_depth_(quad_depth) {}

KernelPair KernelPair::fractional(double alpha) {
    check_order(alpha);
    return KernelPair(Fractional{alpha}, kDefaultQuadDepth);
}

KernelPair KernelPair::fractional_exp(double alpha, double gamma0) {
    check_order(alpha);
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) {
        throw DomainError("fractional_exp: gamma0 must be finite and nonnegative");
    }
    return KernelPair(FractionalExp{alpha, gamma0}, kDefaultQuadDepth);
}

KernelPair KernelPair::distributed_order(int quad_depth) {
    if (quad_depth < 1) {
        throw DomainError("distributed_order: quad_depth must be positive");
    }
    KernelPair pair(DistributedOrder{}, quad_depth);
    auto rule = std::make_shared<LegendreRule>();
    legendre_rule(quad_depth, rule->nodes, rule->weights);
    for (double beta : rule->nodes) {
        rule->inv_gamma.push_back(1.0 / std::tgamma(beta));
        rule->inv_gamma_next.push_back(1.0 / std::tgamma(beta + 1.0));
    }
    pair.rule_ = std::move(rule);
    return pair;
}

std::string KernelPair::name() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Fractional& f) { os << "fractional(alpha=" << f.alpha << ")"; },
                   [&](const FractionalExp& f) {
                       os << "fractional_exp(alpha=" << f.alpha << ", gamma0=" << f.gamma0 << ")";
                   },
                   [&](const DistributedOrder&) { os << "distributed(depth=" << quad_depth_ << ")"; },
               },
               variant_);
    return os.str();
}

std::optional<double> KernelPair::order() const {
    return std::visit(Overloaded{
                          [](const Fractional& f) -> std::optional<double> { return f.alpha; },
                          [](const FractionalExp& f) -> std::optional<double> { return f.alpha; },
                          [](const DistributedOrder&) -> std::optional<double> { return {}; },
                      },
                      variant_);
}

double KernelPair::k(double t) const {
    check_positive_time(t, "kernel k");
    return std::visit(Overloaded{
                          [&](const Fractional& f) { return fractional_k(f.alpha, t); },
                          [&](const FractionalExp& f) {
                              return fractional_k(f.alpha, t) * std::exp(-f.gamma0 * t);
                          },
                          [&](const DistributedOrder&) {
                              const double log_t = std::log(t);
                              double sum = 0.0;
                              for (std::size_t i = 0; i < rule_->nodes.size(); ++i) {
                                  sum += rule_->weights[i] *
                                         std::exp((rule_->nodes[i] - 1.0) * log_t) *
                                         rule_->inv_gamma[i];
                              }
                              return sum;
                          },
                      },
                      variant_);
}

double KernelPair::l(double t) const {
    check_positive_time(t, "kernel l");
    return std::visit(Overloaded{
                          [&](const Fractional& f) { return fractional_l(f.alpha, t); },
                          [&](const FractionalExp& f) {
                              const double decayed = fractional_l(f.alpha, t) * std::exp(-f.gamma0 * t);
                              if (f.gamma0 == 0.0) return decayed;
                              // gamma (1 * [g_alpha e^{-gamma .}])(t) = gamma^{1-alpha} P(alpha, gamma t)
                              return decayed + std::pow(f.gamma0, 1.0 - f.alpha) *
                                                   boost::math::gamma_p(f.alpha, f.gamma0 * t);
                          },
                          [&](const DistributedOrder&) { return special::scaled_exp_integral_e1(t); },
                      },
                      variant_);
}

double KernelPair::cumulative_k(double t) const {
    check_nonnegative_time(t, "cumulative K");
    if (t == 0.0) return 0.0;
    return std::visit(Overloaded{
                          [&](const Fractional& f) { return fractional_cumulative_k(f.alpha, t); },
                          [&](const FractionalExp& f) {
                              if (f.gamma0 == 0.0) return fractional_cumulative_k(f.alpha, t);
                              return std::pow(f.gamma0, f.alpha - 1.0) *
                                     boost::math::gamma_p(1.0 - f.alpha, f.gamma0 * t);
                          },
                          [&](const DistributedOrder&) {
                              const double log_t = std::log(t);
                              double sum = 0.0;
                              for (std::size_t i = 0; i < rule_->nodes.size(); ++i) {
                                  sum += rule_->weights[i] * std::exp(rule_->nodes[i] * log_t) *
                                         rule_->inv_gamma_next[i];
                              }
                              return sum;
                          },
                      },
                      variant_);
}

double KernelPair::cumulative_l(double t) const {
    check_nonnegative_time(t, "cumulative L");
    if (t == 0.0) return 0.0;
    return std::visit(Overloaded{
                          [&](const Fractional& f) { return fractional_cumulative_l(f.alpha, t); },
                          [&](const FractionalExp& f) {
                              if (f.gamma0 == 0.0) return fractional_cumulative_l(f.alpha, t);
                              const double x = f.gamma0 * t;
                              const double p = boost::math::gamma_p(f.alpha, x);
                              const double p_next = boost::math::gamma_p(f.alpha + 1.0, x);
                              return std::pow(f.gamma0, -f.alpha) * ((1.0 + x) * p - f.alpha * p_next);
                          },
                          [&](const DistributedOrder&) { return distributed_cumulative_l(t); },
                      },
                      variant_);
}

TimeGrid TimeGrid::from_horizon(double horizon, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("time grid: tau must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("time grid: horizon must be positive");
    }
    const double ratio = horizon / tau;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(steps * tau - horizon) > 1e-9 * horizon) {
        throw DomainError("time grid: horizon " + std::to_string(horizon) +
                          " is not an integer multiple of tau " + std::to_string(tau));
    }
    if (steps > 1e8) throw DomainError("time grid: too many steps");
    return TimeGrid{tau, static_cast<int>(steps)};
}

std::vector<double> cumulative_table(const KernelPair& pair, const TimeGrid& grid, WeightForm form) {
    std::vector<double> table(static_cast<std::size_t>(grid.steps) + 1);
    for (int n = 0; n <= grid.steps; ++n) {
        const double t = grid.time(n);
        table[n] = form == WeightForm::KForm ? pair.cumulative_k(t) : pair.cumulative_l(t);
        if (!std::isfinite(table[n])) {
            throw RangeError("cumulative integral is not finite at t=" + std::to_string(t));
        }
    }
    return table;
}

ConvolutionWeights k_weights(const KernelPair& pair, const TimeGrid& grid) {
    const auto table = cumulative_table(pair, grid, WeightForm::KForm);
    ConvolutionWeights weights{WeightForm::KForm, grid.tau, std::vector<double>(grid.steps)};
    for (int m = 0; m < grid.steps; ++m) weights.values[m] = (table[m + 1] - table[m]) / grid.tau;
    return weights;
}

ConvolutionWeights l_weights(const KernelPair& pair, const TimeGrid& grid) {
    const auto table = cumulative_table(pair, grid, WeightForm::LForm);
    ConvolutionWeights weights{WeightForm::LForm, grid.tau, std::vector<double>(grid.steps)};
    for (int m = 0; m < grid.steps; ++m) weights.values[m] = table[m + 1] - table[m];
    return weights;
}

std::vector<double> discrete_conv(const ConvolutionWeights& weights, std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("discrete_conv: empty sequence");
    if (v.size() > weights.values.size() + 1) {
        throw std::invalid_argument("discrete_conv: sequence of length " + std::to_string(v.size()) +
                                    " exceeds " + std::to_string(weights.values.size()) +
                                    " weights + 1");
    }
    const double scale = weights.form == WeightForm::KForm ? weights.tau : 1.0;
    const auto& w = weights.values;
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t n = 1; n < v.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j) acc += w[n - j] * v[j];
        out[n] = scale * acc;
    }
    return out;
}

double verify_pair(const KernelPair& pair, const TimeGrid& grid, double t_min) {
    if (!(t_min > 0.0 && t_min < grid.horizon())) {
        throw DomainError("verify_pair: need 0 < t_min < horizon");
    }
    // cell j = [t_{j-1}, t_j] contributes (mean of k over [t_n - t_j, t_n - t_{j-1}]) * int_cell l,
    // i.e. b_{n-j} w_{j-1}; both factors are exact cumulative differences
    const auto b = k_weights(pair, grid).values;
    const auto w = l_weights(pair, grid).values;

    double deviation = 0.0;
    const int first = static_cast<int>(std::ceil(t_min / grid.tau - 1e-9));
    for (int n = std::max(first, 1); n <= grid.steps; ++n) {
        double sum = 0.0;
        for (int j = 1; j <= n; ++j) sum += b[n - j] * w[j - 1];
        deviation = std::max(deviation, std::abs(sum - 1.0));
    }
    return deviation;
}

double check_convexity_inequality(std::span<const double> kernel_samples, const ConvexFunction& H,
                                  std::span<const double> u, double u0) {
    if (u.size() < 2) throw std::invalid_argument("check_convexity_inequality: need u_0..u_N, N >= 1");
    const std::size_t steps = u.size() - 1;
    if (kernel_samples.size() < steps) {
        throw std::invalid_argument("check_convexity_inequality: need at least N kernel samples");
    }
    std::vector<double> v(u.begin(), u.end());
    v[0] = u0;
    std::vector<double> hv(v.size());
    std::transform(v.begin(), v.end(), hv.begin(), H.value);

    double min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= steps; ++n) {
        double du = 0.0;
        double dh = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            du += kernel_samples[n - j] * (v[j] - v[j - 1]);
            dh += kernel_samples[n - j] * (hv[j] - hv[j - 1]);
        }
        min_residual = std::min(min_residual, H.derivative(v[n]) * du - dh);
    }
    return min_residual;
}

double approx_identity_error(const KernelPair& pair, double n_index, std::span<const double> f,
                             const TimeGrid& grid) {
    if (f.size() != static_cast<std::size_t>(grid.steps) + 1) {
        throw std::invalid_argument("approx_identity_error: f must be sampled at t_0..t_N");
    }
    const auto family = relaxation_family(pair, n_index, grid);
    const ConvolutionWeights h{WeightForm::KForm, grid.tau, family.h};
    const auto smoothed = discrete_conv(h, f);
    double error = 0.0;
    for (std::size_t n = 1; n < f.size(); ++n) error += std::abs(smoothed[n] - f[n]);
    return grid.tau * error;
}

} // namespace subdiff

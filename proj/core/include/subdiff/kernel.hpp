#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace subdiff {

/// (k, l) = (g_{1-alpha}, g_alpha), the time-fractional pair.
struct Fractional {
    double alpha;
};

/// Fractional pair tempered by e^{-gamma0 t} in k.
struct FractionalExp {
    double alpha;
    double gamma0;
};

/// k = int_0^1 g_beta dbeta, l(t) = int_0^inf e^{-st}/(1+s) ds (ultraslow regime).
struct DistributedOrder {};

using KernelVariant = std::variant<Fractional, FractionalExp, DistributedOrder>;

/**
 * A kernel pair (k, l) with k nonnegative, nonincreasing and k * l = 1.
 *
 * Only the closed catalogue above is supported. Cumulative integrals
 * K = 1 * k and L = 1 * l are the quadrature primitive for all
 * discretizations; k and l are never evaluated at t = 0.
 */
class KernelPair {
public:
    static constexpr double kMinOrder = 0.05;
    static constexpr double kMaxOrder = 0.95;
    static constexpr int kDefaultQuadDepth = 64;

    static KernelPair fractional(double alpha);
    static KernelPair fractional_exp(double alpha, double gamma0);
    static KernelPair distributed_order(int quad_depth = kDefaultQuadDepth);

    const KernelVariant& variant() const noexcept { return variant_; }
    int quad_depth() const noexcept { return quad_depth_; }
    std::string name() const;

    /// Order alpha of the pair; DistributedOrder has none.
    std::optional<double> order() const;

    double k(double t) const;
    double l(double t) const;
    double cumulative_k(double t) const;
    double cumulative_l(double t) const;

    /// Whether l is integrable on (0, inf). False for the whole catalogue.
    bool l_integrable() const noexcept { return false; }

private:
    struct LegendreRule {
        std::vector<double> nodes;   // on (0, 1)
        std::vector<double> weights;
        std::vector<double> inv_gamma;       // 1/Gamma(beta)
        std::vector<double> inv_gamma_next;  // 1/Gamma(beta + 1)
    };

    KernelPair(KernelVariant v, int quad_depth);

    KernelVariant variant_;
    int quad_depth_;
    std::shared_ptr<const LegendreRule> rule_;
};

/// Uniform grid t_n = n tau, n = 0..steps.
struct TimeGrid {
    double tau;
    int steps;

    static TimeGrid from_horizon(double horizon, double tau);

    double horizon() const noexcept { return tau * steps; }
    double time(int n) const noexcept { return tau * n; }
};

enum class WeightForm { KForm, LForm };

/**
 * Product-integration weights on a uniform grid.
 *
 * KForm: b_m = (K(t_{m+1}) - K(t_m)) / tau, the cell average of k.
 * LForm: w_m = L(t_{m+1}) - L(t_m), the cell integral of l.
 */
struct ConvolutionWeights {
    WeightForm form;
    double tau;
    std::vector<double> values;
};

/// Samples of a cumulative integral, K or L, at t_0..t_N.
std::vector<double> cumulative_table(const KernelPair& pair, const TimeGrid& grid, WeightForm form);

ConvolutionWeights k_weights(const KernelPair& pair, const TimeGrid& grid);
ConvolutionWeights l_weights(const KernelPair& pair, const TimeGrid& grid);

/**
 * Right-endpoint product integration (w * v)_n = sum_{j=1}^n w_{n-j} v_j.
 * KForm weights are scaled by tau so both forms approximate the continuous
 * convolution. v holds samples at t_0..t_M with M <= number of weights;
 * v_0 does not enter. O(M^2).
 */
std::vector<double> discrete_conv(const ConvolutionWeights& weights, std::span<const double> v);

/**
 * Max deviation of the discrete (k * l)(t_n) from 1 over t_n >= t_min.
 * Every cell pairs the exact mean of k with the exact integral of l, so
 * neither singularity is sampled pointwise.
 */
double verify_pair(const KernelPair& pair, const TimeGrid& grid, double t_min);

/**
 * Discrete relaxation family for a given gamma.
 *
 * s solves the monotone k-form scheme sum_{j<=n} b_{n-j}(s_j - s_{j-1}) = -gamma s_n,
 * s_0 = 1. h_m = (s_m - s_{m+1}) / tau is the cell average of -s', r = h / gamma
 * (r = l cell averages when gamma = 0), k_gamma = gamma s.
 */
struct RelaxationFamily {
    double gamma;
    double tau;
    std::vector<double> s;        // t_0..t_N
    std::vector<double> r;        // cells 0..N-1
    std::vector<double> h;        // cells 0..N-1
    std::vector<double> k_gamma;  // t_0..t_N
};

enum class RelaxationScheme { KForm, LForm };

/// Throws StepSizeError when gamma <= -b_0 (KForm) or gamma <= -1/w_0 (LForm).
RelaxationFamily relaxation_family(const KernelPair& pair, double gamma, const TimeGrid& grid,
                                   RelaxationScheme scheme = RelaxationScheme::KForm);

/// Max |s_KForm - s_LForm| on the grid.
double relaxation_cross_check(const KernelPair& pair, double gamma, const TimeGrid& grid);

/// A convex C^1 scalar map with its derivative.
struct ConvexFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/**
 * min_n [ H'(u_n) D(u)_n - D(H(u))_n ] for the discrete derivative
 * D(v)_n = sum_{j=1}^n kappa_{n-j} (v_j - v_{j-1}) with v_0 replaced by u0.
 * kernel_samples holds kappa_0..kappa_{N-1}; u holds u_0..u_N.
 */
double check_convexity_inequality(std::span<const double> kernel_samples, const ConvexFunction& H,
                                  std::span<const double> u, double u0);

/// Discrete L1 norm of h_gamma * f - f with gamma = n_index; f sampled at t_0..t_N.
double approx_identity_error(const KernelPair& pair, double n_index, std::span<const double> f,
                             const TimeGrid& grid);

} // namespace subdiff

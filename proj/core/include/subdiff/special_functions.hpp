#pragma once

namespace subdiff::special {

/// Evaluation controls for E_alpha(-x).
struct MLEvalPolicy {
    double series_cutoff = 1.0;
    int asymptotic_terms = 8;
    double target_accuracy = 1e-8;
};

/// Gamma function for x > 0. Throws DomainError for x <= 0.
double gamma(double x);

/// 1/Gamma(z) for any real z; zero at the poles.
double reciprocal_gamma(double z);

double erfc(double x);

/// Exponential integral E1(x) for x > 0.
double exp_integral_e1(double x);

/// e^x E1(x); stays finite for large x where E1 underflows.
double scaled_exp_integral_e1(double x);

/**
 * Mittag-Leffler function on the negative half-line, E_alpha(-x).
 *
 * Power series below policy.series_cutoff, the K-term asymptotic expansion
 * beyond the crossover where its first omitted term drops under
 * policy.target_accuracy, and the spectral (completely monotone) integral
 * representation in between. Requires alpha in [0.05, 0.95] and x >= 0.
 */
double mittag_leffler_neg(double alpha, double x, const MLEvalPolicy& policy = {});

/// Crossover point beyond which the asymptotic expansion is used.
double mittag_leffler_asymptotic_crossover(double alpha, const MLEvalPolicy& policy = {});

/// E_alpha(x) for x >= 0 by direct series, alpha in [0.05, 1].
double mittag_leffler_pos(double alpha, double x);

} // namespace subdiff::special

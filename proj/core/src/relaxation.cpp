#include "subdiff/errors.hpp"
#include "subdiff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subdiff {

namespace {

std::vector<double> relaxation_kform(const KernelPair& pair, double gamma, const TimeGrid& grid) {
    const auto b = k_weights(pair, grid).values;
    const double pivot = b[0] + gamma;
    if (!(pivot > 0.0)) {
        throw StepSizeError("relaxation: pivot b_0 + gamma = " + std::to_string(pivot) +
                            " is not positive; reduce tau");
    }
    // b_0 s_n - sum_{j=1}^{n-1} (b_{n-j-1} - b_{n-j}) s_j - b_{n-1} s_0 = -gamma s_n
    std::vector<double> drop(b.size(), 0.0);
    for (std::size_t m = 1; m < b.size(); ++m) drop[m] = b[m - 1] - b[m];

    const int steps = grid.steps;
    std::vector<double> s(static_cast<std::size_t>(steps) + 1);
    s[0] = 1.0;
    for (int n = 1; n <= steps; ++n) {
        double acc = b[n - 1] * s[0];
        for (int j = 1; j < n; ++j) acc += drop[n - j] * s[j];
        s[n] = acc / pivot;
    }
    return s;
}

std::vector<double> relaxation_lform(const KernelPair& pair, double gamma, const TimeGrid& grid) {
    const auto w = l_weights(pair, grid).values;
    const double pivot = 1.0 + gamma * w[0];
    if (!(pivot > 0.0)) {
        throw StepSizeError("relaxation: pivot 1 + gamma w_0 = " + std::to_string(pivot) +
                            " is not positive; reduce tau");
    }
    const int steps = grid.steps;
    std::vector<double> s(static_cast<std::size_t>(steps) + 1);
    s[0] = 1.0;
    for (int n = 1; n <= steps; ++n) {
        double acc = 0.0;
        for (int j = 1; j < n; ++j) acc += w[n - j] * s[j];
        s[n] = (1.0 - gamma * acc) / pivot;
    }
    return s;
}

} // namespace

RelaxationFamily relaxation_family(const KernelPair& pair, double gamma, const TimeGrid& grid,
                                   RelaxationScheme scheme) {
    if (!std::isfinite(gamma)) throw DomainError("relaxation: gamma must be finite");
    RelaxationFamily family;
    family.gamma = gamma;
    family.tau = grid.tau;
    family.s = scheme == RelaxationScheme::KForm ? relaxation_kform(pair, gamma, grid)
                                                 : relaxation_lform(pair, gamma, grid);

    const int steps = grid.steps;
    family.h.resize(steps);
    family.r.resize(steps);
    for (int m = 0; m < steps; ++m) family.h[m] = (family.s[m] - family.s[m + 1]) / grid.tau;
    if (gamma != 0.0) {
        for (int m = 0; m < steps; ++m) family.r[m] = family.h[m] / gamma;
    } else {
        // r_0 = l; use exact cell averages
        const auto w = l_weights(pair, grid).values;
        for (int m = 0; m < steps; ++m) family.r[m] = w[m] / grid.tau;
    }
    family.k_gamma.resize(family.s.size());
    std::transform(family.s.begin(), family.s.end(), family.k_gamma.begin(),
                   [gamma](double v) { return gamma * v; });
    return family;
}

double relaxation_cross_check(const KernelPair& pair, double gamma, const TimeGrid& grid) {
    const auto k_form = relaxation_kform(pair, gamma, grid);
    const auto l_form = relaxation_lform(pair, gamma, grid);
    double deviation = 0.0;
    for (std::size_t n = 0; n < k_form.size(); ++n) {
        deviation = std::max(deviation, std::abs(k_form[n] - l_form[n]));
    }
    return deviation;
}

} // namespace subdiff

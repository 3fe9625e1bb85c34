#pragma once

#include "subdiff/evolution.hpp"

#include <vector>

namespace subdiff {

/// W_n = sum_i psi_i u_{n,i} h^dim over every snapshot; needs stride 1.
std::vector<double> kaplan_series(const Trajectory& trajectory, const Field& psi, const Mesh& mesh);

/**
 * min_n ( C |u0|_inf s_rate(t_n) - |u_n|_inf ), with s_rate from the
 * discrete relaxation family on the trajectory's grid. The trajectory must
 * be uniform with step tau.
 */
double decay_envelope_check(const Trajectory& trajectory, const KernelPair& pair, double tau,
                            double rate, double C);

/// min_{n >= 1} ( W_n - W0 exp(kappa L(t_n)) ) on the uniform grid.
double instability_lowerbound_check(const std::vector<double>& W, double W0, double kappa,
                                    const KernelPair& pair, const TimeGrid& grid);

/**
 * Upper bound on the blowup time: the t solving L(t) = safety_factor * F(inf; u0),
 * F(inf; u0) = int_{u0}^inf dr/f(r). +inf when the integral diverges or L
 * never reaches the target. safety_factor 1 is the scalar bound, 2 the
 * half-rate eigenfunction bound.
 */
double blowup_time_bound(const Nonlinearity& f, const KernelPair& pair, double u0,
                         double safety_factor);

struct ComparisonResult {
    bool ordered;
    /// max_n |u_high,n - u_low,n|_inf
    double max_gap;
    /// max_n max_i (u_low - u_high), positive when ordering fails
    double worst_violation;
    RunResult low;
    RunResult high;
};

/// Runs both initial data concurrently on identical grids.
ComparisonResult comparison_run(const Problem& problem, const Field& u0_low, const Field& u0_high);

} // namespace subdiff

#pragma once

#include "subdiff/elliptic.hpp"
#include "subdiff/kernel.hpp"
#include "subdiff/nonlinearity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subdiff {

enum class Scheme { KForm, LForm };
enum class NonlinearMode { IMEX, Newton };

/**
 * d/dt (k * [u - u0]) + L_h u = f(u) on a uniform grid, or the scalar
 * equation without spatial operator. u0 has one entry for the scalar case.
 */
struct Problem {
    Problem(KernelPair pair, TimeGrid grid, std::optional<EllipticOperator> spatial, Nonlinearity f, Field u0)
        : pair(std::move(pair)), grid(grid), spatial(std::move(spatial)), f(std::move(f)), u0(std::move(u0)) {}

    KernelPair pair;
    TimeGrid grid;
    std::optional<EllipticOperator> spatial;
    Nonlinearity f;
    Field u0;
    Scheme scheme = Scheme::KForm;
    NonlinearMode mode = NonlinearMode::Newton;
    double blowup_threshold = 1e8;
    double newton_tol = 1e-12;
    double max_growth_per_step = 10.0;
    int max_halvings = 40;
    int snapshot_stride = 1;
    /// When set, W_n = sum psi_i u_n,i h^dim is recorded every step.
    std::optional<Field> kaplan_weight;
};

struct Trajectory {
    std::vector<double> times;        // every accepted step, t_0 = 0
    std::vector<double> supnorm;      // |u_n|_inf, every accepted step
    int stride = 1;
    std::vector<int> snapshot_steps;  // step indices of the stored snapshots
    std::vector<Field> snapshots;
    std::vector<double> kaplan;       // empty unless Problem::kaplan_weight was set
    /// True while every accepted step had the nominal size tau.
    bool uniform = true;

    std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
};

enum class RunStatus { CompletedHorizon, Blowup };

struct BlowupReport {
    RunStatus status = RunStatus::CompletedHorizon;
    double t_low = 0.0;
    double t_high = 0.0;
    std::optional<double> theoretical_bound;
    double threshold = 0.0;
    std::string reason;
};

struct RunResult {
    Trajectory trajectory;
    BlowupReport report;
};

/// Scalar Volterra problem d/dt (k * [u - u0]) = f(u).
RunResult run_ode(const Problem& problem);

/// Semilinear problem on the mesh of problem.spatial.
RunResult run_pde(const Problem& problem);

/// Dispatches on whether a spatial operator is present.
RunResult run(const Problem& problem);

} // namespace subdiff

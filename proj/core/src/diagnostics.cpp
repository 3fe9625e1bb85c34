#include "subdiff/diagnostics.hpp"

#include "subdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace subdiff {

std::vector<double> kaplan_series(const Trajectory& trajectory, const Field& psi, const Mesh& mesh) {
    if (trajectory.snapshots.size() != trajectory.times.size()) {
        throw DomainError("kaplan_series: trajectory must store every step (stride 1)");
    }
    if (psi.size() != mesh.size()) throw DomainError("kaplan_series: psi does not match the mesh");
    std::vector<double> W;
    W.reserve(trajectory.snapshots.size());
    for (const auto& u : trajectory.snapshots) {
        if (u.size() != psi.size()) throw DomainError("kaplan_series: snapshot does not match the mesh");
        W.push_back(psi.dot(u) * mesh.cell_volume());
    }
    return W;
}

double decay_envelope_check(const Trajectory& trajectory, const KernelPair& pair, double tau,
                            double rate, double C) {
    if (!(rate > 0.0)) throw DomainError("decay_envelope_check: rate must be positive");
    if (!trajectory.uniform) throw DomainError("decay_envelope_check: trajectory is not uniform");
    const int steps = static_cast<int>(trajectory.steps());
    if (steps < 1) throw DomainError("decay_envelope_check: empty trajectory");
    const TimeGrid grid{tau, steps};
    const auto family = relaxation_family(pair, rate, grid);
    const double initial = trajectory.supnorm.front();
    double margin = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= steps; ++n) {
        margin = std::min(margin, C * initial * family.s[n] - trajectory.supnorm[n]);
    }
    return margin;
}

double instability_lowerbound_check(const std::vector<double>& W, double W0, double kappa,
                                    const KernelPair& pair, const TimeGrid& grid) {
    if (!(kappa >= 0.0)) throw DomainError("instability_lowerbound_check: kappa must be nonnegative");
    if (W.size() < 2) throw DomainError("instability_lowerbound_check: need W_0..W_N, N >= 1");
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < W.size(); ++n) {
        const double bound = W0 * std::exp(kappa * pair.cumulative_l(grid.time(static_cast<int>(n))));
        margin = std::min(margin, W[n] - bound);
    }
    return margin;
}

double blowup_time_bound(const Nonlinearity& f, const KernelPair& pair, double u0, double safety_factor) {
    if (!(safety_factor > 0.0)) throw DomainError("blowup_time_bound: safety factor must be positive");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double reciprocal = f.reciprocal_integral_to_infinity(u0);
    if (!std::isfinite(reciprocal)) return inf;
    const double target = safety_factor * reciprocal;

    double lo = 0.0;
    double hi = 1.0;
    while (pair.cumulative_l(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) return inf;
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (pair.cumulative_l(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ComparisonResult comparison_run(const Problem& problem, const Field& u0_low, const Field& u0_high) {
    if (u0_low.size() != u0_high.size()) throw DomainError("comparison_run: data sizes differ");
    if ((u0_low.array() > u0_high.array()).any()) {
        throw DomainError("comparison_run: u0_low must not exceed u0_high");
    }
    Problem low = problem;
    low.u0 = u0_low;
    low.snapshot_stride = 1;
    Problem high = problem;
    high.u0 = u0_high;
    high.snapshot_stride = 1;

    auto low_run = std::async(std::launch::async, [&low] { return run(low); });
    RunResult high_result = run(high);
    RunResult low_result = low_run.get();

    ComparisonResult out{true, 0.0, -std::numeric_limits<double>::infinity(), {}, {}};
    const auto& a = low_result.trajectory;
    const auto& b = high_result.trajectory;
    const std::size_t common = std::min(a.snapshots.size(), b.snapshots.size());
    for (std::size_t n = 0; n < common; ++n) {
        if (a.times[n] != b.times[n]) break;
        const Field diff = b.snapshots[n] - a.snapshots[n];
        out.max_gap = std::max(out.max_gap, diff.cwiseAbs().maxCoeff());
        out.worst_violation = std::max(out.worst_violation, (-diff).maxCoeff());
    }
    out.ordered = out.worst_violation <= 1e-10;
    out.low = std::move(low_result);
    out.high = std::move(high_result);
    return out;
}

} // namespace subdiff

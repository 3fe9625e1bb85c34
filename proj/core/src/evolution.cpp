#include "subdiff/evolution.hpp"

#include "subdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subdiff {

namespace {

constexpr int kMaxNewtonIterations = 50;
constexpr int kMaxDamping = 30;

// One run of the product-integration scheme with local step halving.
//
// Step n solves  d u_n + L u_n - f(u_n) = r_n,  where for KForm
//   d = c_n,  r_n = sum_{j=1}^{n-1} (c_{j+1} - c_j) u_j + c_1 u_0,
//   c_j = (K(t_n - t_{j-1}) - K(t_n - t_j)) / (t_j - t_{j-1}),
// and for LForm (Volterra form divided by the last weight)
//   d = 1/w_n,  r_n = (u_0 - sum_{j<n} w_j (L u_j - f(u_j))) / w_n,
//   w_j = L(t_n - t_{j-1}) - L(t_n - t_j).
// On a uniform grid c_j = b_{n-j} and w_j = w_{n-j}, read from a table.
class Stepper {
public:
    explicit Stepper(const Problem& problem);

    RunResult run();

private:
    struct Attempt {
        bool ok = false;
        Field u;
        std::string failure;
    };

    Attempt attempt(double t_new);
    void accept(double t_new, Field u);
    Field apply_spatial(const Field& u) const;
    Field solve_spatial(const Field& diag, const Field& rhs) const;
    double cumulative(double t) const;
    void assemble_step(double t_new, double& d, Field& rhs);

    const Problem& problem_;
    const bool is_kform_;
    const int size_;
    const double horizon_;
    std::vector<double> table_;  // K or L at t_m on the nominal grid
    std::vector<double> times_;
    Eigen::MatrixXd history_;    // columns u_j
    Eigen::MatrixXd operator_history_;  // LForm: columns L u_j - f(u_j)
    RunResult result_;
};

Stepper::Stepper(const Problem& problem)
    : problem_(problem),
      is_kform_(problem.scheme == Scheme::KForm),
      size_(static_cast<int>(problem.u0.size())),
      horizon_(problem.grid.horizon()) {
    if (size_ < 1) throw DomainError("run: empty initial datum");
    if (problem.spatial && problem.spatial->mesh().size() != size_) {
        throw DomainError("run: initial datum does not match the mesh");
    }
    if (!problem.spatial && size_ != 1) throw DomainError("run: scalar problem needs a scalar u0");
    if (!problem.u0.allFinite()) throw DomainError("run: initial datum is not finite");
    if (!(problem.blowup_threshold > problem.u0.lpNorm<Eigen::Infinity>())) {
        throw DomainError("run: blowup threshold must exceed |u0|_inf");
    }
    if (problem.snapshot_stride < 1) throw DomainError("run: snapshot stride must be positive");
    if (problem.kaplan_weight && problem.kaplan_weight->size() != size_) {
        throw DomainError("run: Kaplan weight does not match the mesh");
    }
    for (Eigen::Index i = 0; i < problem.u0.size(); ++i) {
        if (!problem.f.in_domain(problem.u0[i])) {
            throw DomainEscapeError("run: initial datum outside the domain of f");
        }
    }
    table_ = cumulative_table(problem.pair, problem.grid, is_kform_ ? WeightForm::KForm : WeightForm::LForm);

    const int capacity = std::min(problem.grid.steps + 1, 1 << 16);
    history_.resize(size_, capacity);
    if (!is_kform_) operator_history_.resize(size_, capacity);
    result_.trajectory.stride = problem.snapshot_stride;
    result_.report.threshold = problem.blowup_threshold;
    accept(0.0, problem.u0);
}

double Stepper::cumulative(double t) const {
    return is_kform_ ? problem_.pair.cumulative_k(t) : problem_.pair.cumulative_l(t);
}

Field Stepper::apply_spatial(const Field& u) const {
    if (!problem_.spatial) return Field::Zero(size_);
    return problem_.spatial->apply(u);
}

Field Stepper::solve_spatial(const Field& diag, const Field& rhs) const {
    if (!problem_.spatial) {
        if (!(std::abs(diag[0]) > 0.0)) throw SolverError("scalar step: zero pivot", rhs.norm());
        return rhs.cwiseQuotient(diag);
    }
    return problem_.spatial->solve_diagonal_shifted(diag, rhs);
}

void Stepper::assemble_step(double t_new, double& d, Field& rhs) {
    const int n = static_cast<int>(times_.size());
    // lag_j = C(t_n - t_j), j = 0..n-1; lag_n = 0
    std::vector<double> lag(static_cast<std::size_t>(n) + 1, 0.0);
    const bool on_grid = result_.trajectory.uniform && n <= problem_.grid.steps &&
                         t_new == problem_.grid.time(n);
    for (int j = 0; j < n; ++j) lag[j] = on_grid ? table_[n - j] : cumulative(t_new - times_[j]);

    if (is_kform_) {
        // c_j for j = 1..n
        std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
        for (int j = 1; j <= n; ++j) {
            const double dt = (j < n ? times_[j] : t_new) - times_[j - 1];
            c[j] = (lag[j - 1] - lag[j]) / dt;
        }
        d = c[n];
        Eigen::VectorXd weights(n);
        weights[0] = c[1];
        for (int j = 1; j < n; ++j) weights[j] = c[j + 1] - c[j];
        rhs = history_.leftCols(n) * weights;
    } else {
        const double last = lag[n - 1];
        d = 1.0 / last;
        rhs = problem_.u0;
        if (n > 1) {
            Eigen::VectorXd weights(n - 1);
            for (int j = 1; j < n; ++j) weights[j - 1] = lag[j - 1] - lag[j];
            rhs.noalias() -= operator_history_.middleCols(1, n - 1) * weights;
        }
        rhs /= last;
    }
}

Stepper::Attempt Stepper::attempt(double t_new) {
    Attempt out;
    double d = 0.0;
    Field rhs;
    assemble_step(t_new, d, rhs);
    if (!(d > 0.0) || !std::isfinite(d) || !rhs.allFinite()) {
        out.failure = "non-finite memory term";
        return out;
    }

    const Field previous = history_.col(static_cast<Eigen::Index>(times_.size()) - 1);
    const auto& f = problem_.f;
    const auto eval_f = [&f](const Field& u) { return u.unaryExpr([&f](double v) { return f(v); }); };

    Field u;
    if (problem_.mode == NonlinearMode::IMEX) {
        u = solve_spatial(Field::Constant(size_, d), rhs + eval_f(previous));
    } else {
        u = previous;
        Field residual = d * u + apply_spatial(u) - eval_f(u) - rhs;
        double residual_norm = residual.lpNorm<Eigen::Infinity>();
        bool converged = false;
        for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
            Field jacobian_diag(size_);
            for (int i = 0; i < size_; ++i) jacobian_diag[i] = d - f.derivative(u[i]);
            if (jacobian_diag.minCoeff() <= 0.0) {
                out.failure = "Newton pivot d - f'(u) is not positive";
                return out;
            }
            const Field delta = solve_spatial(jacobian_diag, -residual);
            double lambda = 1.0;
            Field trial = u + delta;
            Field trial_residual = d * trial + apply_spatial(trial) - eval_f(trial) - rhs;
            for (int k = 0; k < kMaxDamping && !(trial_residual.lpNorm<Eigen::Infinity>() <= residual_norm) &&
                            residual_norm > 0.0;
                 ++k) {
                lambda *= 0.5;
                trial = u + lambda * delta;
                trial_residual = d * trial + apply_spatial(trial) - eval_f(trial) - rhs;
            }
            u = std::move(trial);
            residual = std::move(trial_residual);
            residual_norm = residual.lpNorm<Eigen::Infinity>();
            if (!u.allFinite()) break;
            const double scale = std::max(1.0, u.lpNorm<Eigen::Infinity>());
            if ((lambda * delta).lpNorm<Eigen::Infinity>() <= problem_.newton_tol * scale) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            out.failure = "Newton iteration did not converge";
            return out;
        }
    }
    if (!u.allFinite()) {
        out.failure = "non-finite step";
        return out;
    }
    const double growth_floor = std::max(previous.lpNorm<Eigen::Infinity>(), 1.0);
    if (u.lpNorm<Eigen::Infinity>() > problem_.max_growth_per_step * growth_floor) {
        out.failure = "growth per step exceeds limit";
        return out;
    }
    for (int i = 0; i < size_; ++i) {
        if (!f.in_domain(u[i])) {
            throw DomainEscapeError("run: solution left the domain of f at t=" + std::to_string(t_new));
        }
    }
    out.ok = true;
    out.u = std::move(u);
    return out;
}

void Stepper::accept(double t_new, Field u) {
    auto& traj = result_.trajectory;
    const int n = static_cast<int>(times_.size());
    if (n >= history_.cols()) {
        const Eigen::Index grown = std::max<Eigen::Index>(2 * history_.cols(), 16);
        history_.conservativeResize(Eigen::NoChange, grown);
        if (!is_kform_) operator_history_.conservativeResize(Eigen::NoChange, grown);
    }
    if (n > 0 && traj.uniform && t_new != problem_.grid.time(n)) traj.uniform = false;
    history_.col(n) = u;
    if (!is_kform_) {
        const auto& f = problem_.f;
        operator_history_.col(n) = apply_spatial(u) - u.unaryExpr([&f](double v) { return f(v); });
    }
    times_.push_back(t_new);
    traj.times.push_back(t_new);
    traj.supnorm.push_back(u.lpNorm<Eigen::Infinity>());
    if (problem_.kaplan_weight) {
        const double volume = problem_.spatial ? problem_.spatial->mesh().cell_volume() : 1.0;
        traj.kaplan.push_back(problem_.kaplan_weight->dot(u) * volume);
    }
    if (n % problem_.snapshot_stride == 0) {
        traj.snapshot_steps.push_back(n);
        traj.snapshots.push_back(std::move(u));
    }
}

RunResult Stepper::run() {
    const double tau = problem_.grid.tau;
    const double end_slack = 1e-12 * horizon_;
    double step = tau;
    auto& report = result_.report;

    while (times_.back() < horizon_ - end_slack) {
        const double t = times_.back();
        const int n = static_cast<int>(times_.size());
        double first_rejected = -1.0;
        int halvings = 0;
        bool accepted = false;
        while (!accepted) {
            double t_new;
            if (result_.trajectory.uniform && step == tau && n <= problem_.grid.steps) {
                t_new = problem_.grid.time(n);
            } else {
                t_new = std::min(t + step, horizon_);
            }
            if (!(t_new > t)) {
                // the step no longer resolves in double precision
                report.status = RunStatus::Blowup;
                report.t_low = t;
                report.t_high = first_rejected > t ? first_rejected : std::nextafter(t, horizon_);
                report.reason = "step size underflow near singularity";
                break;
            }
            const Attempt trial = attempt(t_new);
            if (trial.ok) {
                const double sup = trial.u.lpNorm<Eigen::Infinity>();
                accept(t_new, trial.u);
                accepted = true;
                if (sup > problem_.blowup_threshold) {
                    report.status = RunStatus::Blowup;
                    report.t_low = t;
                    report.t_high = t_new;
                    report.reason = "sup-norm exceeded threshold";
                }
                break;
            }
            if (first_rejected < 0.0) first_rejected = t_new;
            if (++halvings > problem_.max_halvings) {
                report.status = RunStatus::Blowup;
                report.t_low = t;
                report.t_high = first_rejected;
                report.reason = "step halving cascade: " + trial.failure;
                break;
            }
            step *= 0.5;
        }
        if (report.status == RunStatus::Blowup) break;
        step = std::min(2.0 * step, tau);
    }

    auto& traj = result_.trajectory;
    const int last = static_cast<int>(times_.size()) - 1;
    if (traj.snapshot_steps.back() != last) {
        traj.snapshot_steps.push_back(last);
        traj.snapshots.push_back(history_.col(last));
    }
    if (report.status == RunStatus::CompletedHorizon) {
        report.t_low = report.t_high = times_.back();
    }
    return std::move(result_);
}

} // namespace

RunResult run_ode(const Problem& problem) {
    if (problem.spatial) throw DomainError("run_ode: problem has a spatial operator");
    return Stepper(problem).run();
}

RunResult run_pde(const Problem& problem) {
    if (!problem.spatial) throw DomainError("run_pde: problem has no spatial operator");
    return Stepper(problem).run();
}

RunResult run(const Problem& problem) { return problem.spatial ? run_pde(problem) : run_ode(problem); }

} // namespace subdiff

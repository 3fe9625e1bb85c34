#include "subdiff/verification.hpp"

#include "subdiff/diagnostics.hpp"
#include "subdiff/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace subdiff {

namespace {

using Row = std::vector<CsvCell>;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

CriterionResult make(int id) {
    CriterionResult r;
    r.id = id;
    r.title = std::string(criterion_title(id));
    return r;
}

EllipticOperator unit_operator(int n) {
    const Mesh mesh = Mesh::interval(1.0, n);
    return assemble(mesh, CoefficientField::constant(mesh, 1.0));
}

Problem pde(const KernelPair& pair, const TimeGrid& grid, const EllipticOperator& op, Nonlinearity f, Field u0) {
    return Problem{pair, grid, op, std::move(f), std::move(u0)};
}

Problem ode(const KernelPair& pair, const TimeGrid& grid, Nonlinearity f, double u0) {
    return Problem{pair, grid, std::nullopt, std::move(f), Field::Constant(1, u0)};
}

Field bump(const Mesh& mesh) {
    return mesh.sample([](double x, double) { return (x > 0.3 && x < 0.6) ? 1.0 : 0.0; });
}

Field random_field(const Mesh& mesh, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field u(mesh.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = dist(rng);
    return u;
}

// min and max over every stored snapshot
std::pair<double, double> range_of(const Trajectory& traj) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& u : traj.snapshots) {
        lo = std::min(lo, u.minCoeff());
        hi = std::max(hi, u.maxCoeff());
    }
    return {lo, hi};
}

std::string status_name(RunStatus s) { return s == RunStatus::Blowup ? "blowup" : "completed"; }

// --- criteria ---------------------------------------------------------------

CriterionResult kernel_identity() {
    auto r = make(1);
    CsvTable table{{"alpha", "tau", "deviation"}, {}};
    double worst = 0.0;
    double worst_ratio = 0.0;
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto pair = KernelPair::fractional(alpha);
        const double coarse = verify_pair(pair, TimeGrid::from_horizon(1.0, 1e-4), 0.1);
        const double fine = verify_pair(pair, TimeGrid::from_horizon(1.0, 5e-5), 0.1);
        table.rows.push_back(Row{alpha, 1e-4, coarse});
        table.rows.push_back(Row{alpha, 5e-5, fine});
        worst = std::max(worst, coarse);
        worst_ratio = std::max(worst_ratio, fine / coarse);
    }
    r.passed = worst <= 2e-2 && worst_ratio <= 0.9;
    r.expected = "deviation <= 2e-2 and deviation(tau/2) <= 0.9 deviation(tau)";
    r.got = "max deviation " + num(worst) + "; max ratio " + num(worst_ratio);
    r.tolerance = "2e-2; ratio 0.9";
    r.artifacts.push_back({"kernel_identity", std::move(table)});
    return r;
}

CriterionResult mittag_leffler_sandwich() {
    auto r = make(2);
    CsvTable table{{"alpha", "x", "lower", "ml", "upper"}, {}};
    double worst = -kInf;
    int count = 0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        const double g1 = special::gamma(1.0 - alpha);
        const double g2 = special::gamma(1.0 + alpha);
        for (int i = 0; i < 40; ++i) {
            const double x = std::pow(10.0, -3.0 + 6.0 * i / 39.0);
            const double e = special::mittag_leffler_neg(alpha, x);
            const double lower = 1.0 / (1.0 + g1 * x);
            const double upper = 1.0 / (1.0 + x / g2);
            worst = std::max({worst, lower - e, e - upper});
            table.rows.push_back(Row{alpha, x, lower, e, upper});
            ++count;
        }
    }
    r.passed = count == 120 && worst <= 1e-9;
    r.expected = "1/(1+Gamma(1-a)x) <= E_a(-x) <= 1/(1+x/Gamma(1+a)) at 120 points";
    r.got = "worst violation " + num(worst) + " over " + std::to_string(count) + " points";
    r.tolerance = "1e-9";
    r.artifacts.push_back({"ml_sandwich", std::move(table)});
    return r;
}

CriterionResult relaxation_oracle() {
    auto r = make(3);
    const auto pair = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(1.0, 1e-4);
    CsvTable table{{"mu", "scheme", "max_error", "t_at_max"}, {}};
    double worst_k = 0.0;
    double worst_l = 0.0;
    for (double mu : {0.5, 1.0, 2.0}) {
        std::vector<double> exact(grid.steps + 1);
        for (int n = 0; n <= grid.steps; ++n) {
            exact[n] = special::mittag_leffler_neg(0.5, mu * std::sqrt(grid.time(n)));
        }
        for (auto scheme : {RelaxationScheme::KForm, RelaxationScheme::LForm}) {
            const auto family = relaxation_family(pair, mu, grid, scheme);
            double err = 0.0;
            int at = 0;
            for (int n = 0; n <= grid.steps; ++n) {
                const double d = std::abs(family.s[n] - exact[n]);
                if (d > err) {
                    err = d;
                    at = n;
                }
            }
            const bool k = scheme == RelaxationScheme::KForm;
            table.rows.push_back(Row{mu, std::string(k ? "kform" : "lform"), err, grid.time(at)});
            (k ? worst_k : worst_l) = std::max(k ? worst_k : worst_l, err);
        }
    }
    r.passed = worst_k <= 1e-3;
    r.expected = "|s_mu - E_1/2(-mu t^1/2)| <= 1e-3 on [0;1] (k-form relaxation family)";
    r.got = "max error " + num(worst_k);
    r.tolerance = "1e-3";
    r.detail = "l-form Volterra solve on the same grid: max error " + num(worst_l);
    r.artifacts.push_back({"relaxation_oracle", std::move(table)});
    return r;
}

CriterionResult ultraslow_decay() {
    auto r = make(4);
    const auto pair = KernelPair::distributed_order();
    const auto grid = TimeGrid::from_horizon(1000.0, 0.1);
    const auto family = relaxation_family(pair, 1.0, grid);
    CsvTable table{{"t", "s", "bound"}, {}};
    double worst = 0.0;
    for (int n = 100; n <= grid.steps; ++n) {
        const double t = grid.time(n);
        const double bound = 1.05 / (1.0 + 0.5 * std::log(t));
        worst = std::max(worst, family.s[n] / bound);
        if (n % 100 == 0) table.rows.push_back(Row{t, family.s[n], bound});
    }
    r.passed = worst <= 1.0;
    r.expected = "s_1(t) <= 1.05/(1+0.5 ln t) on [10;1000]";
    r.got = "max s/bound " + num(worst);
    r.tolerance = "ratio <= 1";
    r.artifacts.push_back({"ultraslow", std::move(table)});
    return r;
}

CriterionResult maximum_principle(const SuiteOptions& options) {
    auto r = make(5);
    const auto op = unit_operator(99);
    const Mesh& mesh = op.mesh();
    std::mt19937_64 rng(options.seed);
    const std::vector<std::pair<std::string, Field>> shapes{
        {"bump", bump(mesh)},
        {"sine2", mesh.sample([](double x, double) { return std::sin(2.0 * kPi * x); })},
        {"random", random_field(mesh, rng, -0.5, 1.0)},
    };
    const std::vector<std::pair<std::string, KernelPair>> pairs{
        {"fractional", KernelPair::fractional(0.5)},
        {"distributed", KernelPair::distributed_order()},
    };
    CsvTable table{{"pair", "shape", "lower", "min_u", "max_u", "upper"}, {}};
    double worst = -kInf;
    for (const auto& [pair_name, pair] : pairs) {
        for (const auto& [shape_name, u0] : shapes) {
            const auto result = run(pde(pair, TimeGrid::from_horizon(1.0, 1e-3), op, Nonlinearity::zero(), u0));
            const double lower = std::min(0.0, u0.minCoeff());
            const double upper = std::max(0.0, u0.maxCoeff());
            const auto [lo, hi] = range_of(result.trajectory);
            worst = std::max({worst, lower - lo, hi - upper});
            table.rows.push_back(Row{pair_name, shape_name, lower, lo, hi, upper});
        }
    }
    r.passed = worst <= 1e-10;
    r.expected = "min(0;min u0) <= u_n <= max(0;max u0)";
    r.got = "worst excursion " + num(worst);
    r.tolerance = "1e-10";
    r.artifacts.push_back({"max_principle", std::move(table)});
    return r;
}

CriterionResult comparison_principle(const SuiteOptions& options) {
    auto r = make(6);
    const auto op = unit_operator(99);
    const Mesh& mesh = op.mesh();
    const auto pair = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    std::mt19937_64 rng(options.seed);
    const Field random_low = random_field(mesh, rng, 0.0, 0.4);
    const Field random_high = random_low + random_field(mesh, rng, 0.0, 0.3);

    struct Scenario {
        std::string name;
        Nonlinearity f;
        Field low;
        Field high;
    };
    const std::vector<Scenario> scenarios{
        {"zero_shift", Nonlinearity::zero(), bump(mesh), (bump(mesh).array() + 0.5).matrix()},
        {"quadratic_small", Nonlinearity::quadratic(), Field::Constant(mesh.size(), 0.02),
         Field::Constant(mesh.size(), 0.05)},
        {"nsy_random", Nonlinearity::nsy(), random_low, random_high},
    };
    CsvTable table{{"scenario", "worst_violation", "max_gap"}, {}};
    double worst = -kInf;
    bool ok = true;
    for (const auto& s : scenarios) {
        const auto cmp = comparison_run(pde(pair, grid, op, s.f, s.low), s.low, s.high);
        ok = ok && cmp.ordered;
        worst = std::max(worst, cmp.worst_violation);
        if (s.name == "zero_shift") ok = ok && cmp.max_gap <= 0.5 + 1e-10;
        table.rows.push_back(Row{s.name, cmp.worst_violation, cmp.max_gap});
    }
    r.passed = ok;
    r.expected = "u_low <= u_high + 1e-10 everywhere; gap <= 0.5 for the shifted pair";
    r.got = "worst violation " + num(worst);
    r.tolerance = "1e-10";
    r.artifacts.push_back({"comparison", std::move(table)});
    return r;
}

CriterionResult positivity(const SuiteOptions& options) {
    auto r = make(7);
    const auto op = unit_operator(99);
    const Mesh& mesh = op.mesh();
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    std::mt19937_64 rng(options.seed);
    CsvTable table{{"scenario", "min_u"}, {}};

    const auto a = run(pde(KernelPair::fractional(0.5), grid, op, Nonlinearity::quadratic(), 0.5 * bump(mesh)));
    const double min_a = range_of(a.trajectory).first;
    table.rows.push_back(Row{std::string("quadratic_bump"), min_a});

    const auto b = run(pde(KernelPair::distributed_order(), grid, op, Nonlinearity::polynomial({1.0, 0.0, -1.0}),
                           random_field(mesh, rng, 0.0, 1.0)));
    const double min_b = range_of(b.trajectory).first;
    table.rows.push_back(Row{std::string("one_minus_u2_random"), min_b});

    const double worst = std::min(min_a, min_b);
    r.passed = worst >= -1e-10;
    r.expected = "u_n >= 0";
    r.got = "min u " + num(worst);
    r.tolerance = "1e-10";
    r.artifacts.push_back({"positivity", std::move(table)});
    return r;
}

// max_n |u_n - E(-(lambda_h - c) t_n^alpha) sin(pi x)|
double linear_decay_error(const Trajectory& traj, const Mesh& mesh, double rate) {
    const Field mode = mesh.sample([](double x, double) { return std::sin(kPi * x); });
    double err = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double t = traj.times[traj.snapshot_steps[k]];
        const double amp = special::mittag_leffler_neg(0.5, rate * std::sqrt(t));
        err = std::max(err, (traj.snapshots[k] - amp * mode).lpNorm<Eigen::Infinity>());
    }
    return err;
}

CriterionResult linear_decay() {
    auto r = make(8);
    const auto op = unit_operator(199);
    const Mesh& mesh = op.mesh();
    const Field u0 = mesh.sample([](double x, double) { return std::sin(kPi * x); });
    const auto pair = KernelPair::fractional(0.5);
    const double rate_h = discrete_laplacian_first_eigenvalue(mesh) - 5.0;

    const auto coarse = run(pde(pair, TimeGrid::from_horizon(1.0, 1e-3), op, Nonlinearity::linear(5.0), u0));
    const auto fine = run(pde(pair, TimeGrid::from_horizon(1.0, 5e-4), op, Nonlinearity::linear(5.0), u0));
    const double mid = coarse.trajectory.snapshots.back()[99];  // x = 0.5
    const double exact = special::mittag_leffler_neg(0.5, kPi * kPi - 5.0);
    const double rel = std::abs(mid - exact) / exact;
    const double e1 = linear_decay_error(coarse.trajectory, mesh, rate_h);
    const double e2 = linear_decay_error(fine.trajectory, mesh, rate_h);
    const double order = std::log2(e1 / e2);

    r.passed = rel <= 2e-2 && order >= 0.4;
    r.expected = "u(1;0.5) = E_1/2(-(pi^2-5)) = " + num(exact) + "; order >= 0.4";
    r.got = "u(1;0.5) " + num(mid) + " (rel " + num(rel) + "); order " + num(order);
    r.tolerance = "2e-2 relative; order 0.4";
    CsvTable table{{"tau", "u_mid", "exact", "max_error"}, {}};
    table.rows.push_back(Row{1e-3, mid, exact, e1});
    table.rows.push_back(Row{5e-4, fine.trajectory.snapshots.back()[99], exact, e2});
    r.artifacts.push_back({"linear_decay", std::move(table)});
    return r;
}

CriterionResult stability_envelope() {
    auto r = make(9);
    const auto op = unit_operator(199);
    const auto pair = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(10.0, 1e-3);
    const double lambda = op.principal_eigenpair().lambda;
    const auto result = run(pde(pair, grid, op, Nonlinearity::quadratic(), Field::Constant(op.mesh().size(), 0.05)));
    const auto& traj = result.trajectory;
    const bool completed = result.report.status == RunStatus::CompletedHorizon;
    double margin = -kInf;
    double sup1 = kInf;
    if (completed) {
        margin = decay_envelope_check(traj, pair, grid.tau, 0.5 * lambda, 1.1);
        sup1 = traj.supnorm[1000];
    }
    const double sup10 = traj.supnorm.back();
    r.passed = completed && sup10 < sup1 && margin >= 0.0;
    r.expected = "no blowup; sup(10) < sup(1); envelope margin >= 0";
    r.got = status_name(result.report.status) + "; sup(1) " + num(sup1) + "; sup(10) " + num(sup10) + "; margin " +
            num(margin);
    r.tolerance = "margin >= 0 (rate lambda*/2; C 1.1)";
    CsvTable table{{"t", "supnorm"}, {}};
    for (std::size_t n = 0; n < traj.supnorm.size(); n += 100) table.rows.push_back(Row{traj.times[n], traj.supnorm[n]});
    r.artifacts.push_back({"stability", std::move(table)});
    return r;
}

CriterionResult instability_bound() {
    auto r = make(10);
    const auto op = unit_operator(199);
    const auto& eig = op.principal_eigenpair();
    const auto pair = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(0.1, 1e-4);
    const double kappa = 15.0 - eig.lambda;

    const auto margin_for = [&](Scheme scheme) {
        auto problem = pde(pair, grid, op, Nonlinearity::linear(15.0), Field::Constant(op.mesh().size(), 0.01));
        problem.scheme = scheme;
        problem.kaplan_weight = eig.psi;
        problem.snapshot_stride = grid.steps;
        auto result = run(problem);
        const auto& W = result.trajectory.kaplan;
        return std::make_pair(instability_lowerbound_check(W, W.front(), kappa, pair, grid), std::move(result));
    };
    const auto [margin, result] = margin_for(Scheme::KForm);
    const double lform_margin = margin_for(Scheme::LForm).first;
    const auto& W = result.trajectory.kaplan;

    r.passed = result.report.status == RunStatus::CompletedHorizon && margin >= -1e-4;
    r.expected = "W_n >= W0 exp(kappa L(t_n)) on (0;0.1]; kappa = 15 - lambda* = " + num(kappa);
    r.got = "margin " + num(margin) + "; W(0.1)/W0 " + num(W.back() / W.front());
    r.tolerance = "-1e-4";
    r.detail = "l-form margin " + num(lform_margin);
    CsvTable table{{"t", "W", "bound"}, {}};
    for (std::size_t n = 0; n < W.size(); n += 10) {
        const double t = grid.time(static_cast<int>(n));
        table.rows.push_back(Row{t, W[n], W.front() * std::exp(kappa * pair.cumulative_l(t))});
    }
    r.artifacts.push_back({"instability", std::move(table)});
    return r;
}

CriterionResult ode_blowup_bound() {
    auto r = make(11);
    const auto pair = KernelPair::fractional(0.5);
    CsvTable table{{"u0", "status", "t_low", "t_high", "bound"}, {}};
    bool ok = true;
    double worst = 0.0;
    for (double u0 : {1.0, 2.0, 5.0}) {
        const double bound = std::pow(special::gamma(1.5) / u0, 2.0);
        const double horizon = 2.0 * blowup_time_bound(Nonlinearity::quadratic(), pair, u0, 1.0);
        const auto result = run(ode(pair, TimeGrid{horizon / 2000.0, 2000}, Nonlinearity::quadratic(), u0));
        const auto& rep = result.report;
        ok = ok && rep.status == RunStatus::Blowup && rep.t_high <= 1.02 * bound;
        worst = std::max(worst, rep.t_high / bound);
        table.rows.push_back(Row{u0, status_name(rep.status), rep.t_low, rep.t_high, bound});
    }
    r.passed = ok;
    r.expected = "blowup with t_high <= (Gamma(1.5)/u0)^2 * 1.02";
    r.got = "max t_high/bound " + num(worst);
    r.tolerance = "2% of the bound";
    r.artifacts.push_back({"ode_blowup", std::move(table)});
    return r;
}

CriterionResult dichotomy() {
    auto r = make(12);
    const auto pair = KernelPair::fractional_exp(0.5, 1.0);
    const auto grid = TimeGrid::from_horizon(20.0, 1e-2);
    const double small = 0.05;
    const double large = 1.0;
    const auto a = run(ode(pair, grid, Nonlinearity::quadratic(), small));
    const auto b = run(ode(pair, grid, Nonlinearity::quadratic(), large));
    const double bound_small = blowup_time_bound(Nonlinearity::quadratic(), pair, small, 1.0);
    const double bound_large = blowup_time_bound(Nonlinearity::quadratic(), pair, large, 1.0);

    r.passed = a.report.status == RunStatus::CompletedHorizon && b.report.status == RunStatus::Blowup;
    r.expected = "u0 = 0.05 completes T = 20; u0 = 1 blows up";
    r.got = "u0 = 0.05: " + status_name(a.report.status) + " at t " + num(a.report.t_high) + " (bound " +
            num(bound_small) + "); u0 = 1: " + status_name(b.report.status) + " at t " + num(b.report.t_high) +
            " (bound " + num(bound_large) + ")";
    r.tolerance = "exact status";
    r.detail = "L(20) = " + num(pair.cumulative_l(20.0)) + " exceeds F(inf;0.05) = 20";
    CsvTable table{{"u0", "status", "t_low", "t_high", "bound"}, {}};
    table.rows.push_back(Row{small, status_name(a.report.status), a.report.t_low, a.report.t_high, bound_small});
    table.rows.push_back(Row{large, status_name(b.report.status), b.report.t_low, b.report.t_high, bound_large});
    r.artifacts.push_back({"dichotomy", std::move(table)});
    return r;
}

CriterionResult kaplan_blowup() {
    auto r = make(13);
    const auto op = unit_operator(199);
    const auto& eig = op.principal_eigenpair();
    const auto pair = KernelPair::fractional(0.5);
    const auto grid = TimeGrid::from_horizon(0.01, 1e-6);

    auto problem = pde(pair, grid, op, Nonlinearity::quadratic(), Field::Constant(op.mesh().size(), 25.0));
    problem.kaplan_weight = eig.psi;
    problem.snapshot_stride = grid.steps;
    const auto result = run(problem);
    const auto& traj = result.trajectory;
    const double W0 = traj.kaplan.front();
    const auto lower = run(ode(pair, grid, Nonlinearity::quadratic().scaled(0.5), W0));
    const auto& v = lower.trajectory;

    const std::size_t common = std::min(traj.times.size(), v.times.size());
    std::size_t compared = 0;
    double worst = kInf;
    CsvTable table{{"t", "W", "V"}, {}};
    for (std::size_t n = 0; n < common && traj.times[n] == v.times[n]; ++n) {
        const double gap = traj.kaplan[n] - v.supnorm[n];
        worst = std::min(worst, gap + 1e-10 * std::max(1.0, std::abs(v.supnorm[n])));
        table.rows.push_back(Row{traj.times[n], traj.kaplan[n], v.supnorm[n]});
        ++compared;
    }
    const auto& rep = result.report;
    r.passed = W0 >= 2.0 * eig.lambda && rep.status == RunStatus::Blowup && rep.t_high <= 0.01 && compared > 1 &&
               worst >= 0.0;
    r.expected = "blowup with t_high <= 0.01; W_n >= V_n (half-rate ODE) until detection";
    r.got = status_name(rep.status) + " t_high " + num(rep.t_high) + "; min(W-V) " + num(worst) + " over " +
            std::to_string(compared) + " steps";
    r.tolerance = "t_high 0.01; W-V >= -1e-10 relative";
    r.artifacts.push_back({"kaplan", std::move(table)});
    return r;
}

CriterionResult scheme_cross_validation() {
    auto r = make(14);
    const auto op = unit_operator(199);
    const Mesh& mesh = op.mesh();
    const Field u0 = mesh.sample([](double x, double) { return std::sin(kPi * x); });
    auto problem = pde(KernelPair::fractional(0.5), TimeGrid::from_horizon(1.0, 1e-3), op, Nonlinearity::linear(5.0), u0);
    const auto k = run(problem);
    problem.scheme = Scheme::LForm;
    const auto l = run(problem);
    double gap = 0.0;
    double late_gap = 0.0;
    CsvTable table{{"t", "gap"}, {}};
    for (std::size_t n = 0; n < k.trajectory.snapshots.size(); ++n) {
        const double d = (k.trajectory.snapshots[n] - l.trajectory.snapshots[n]).lpNorm<Eigen::Infinity>();
        const double t = k.trajectory.times[k.trajectory.snapshot_steps[n]];
        gap = std::max(gap, d);
        if (t >= 0.1) late_gap = std::max(late_gap, d);
        if (n % 10 == 0) table.rows.push_back(Row{t, d});
    }
    r.passed = gap <= 5e-3;
    r.expected = "max_n |u_kform - u_lform|_inf <= 5e-3 on [0;1]";
    r.got = "max gap " + num(gap);
    r.tolerance = "5e-3";
    r.detail = "max gap on [0.1;1] " + num(late_gap);
    r.artifacts.push_back({"scheme_gap", std::move(table)});
    return r;
}

CriterionResult convexity() {
    auto r = make(15);
    const auto grid = TimeGrid::from_horizon(1.0, 1e-3);
    const auto family = relaxation_family(KernelPair::fractional(0.5), 2.0, grid);
    const std::span<const double> kernel(family.k_gamma.data(), static_cast<std::size_t>(grid.steps));
    std::vector<double> sine(grid.steps + 1);
    std::vector<double> ramp(grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) {
        sine[n] = std::sin(grid.time(n));
        ramp[n] = 1.0 + grid.time(n);
    }
    const ConvexFunction identity{[](double y) { return y; }, [](double) { return 1.0; }};
    const ConvexFunction square{[](double y) { return y * y; }, [](double y) { return 2.0 * y; }};
    const ConvexFunction neglog{[](double y) { return -std::log(y); }, [](double y) { return -1.0 / y; }};
    const double a = check_convexity_inequality(kernel, identity, sine, 0.0);
    const double b = check_convexity_inequality(kernel, square, sine, 0.0);
    const double c = check_convexity_inequality(kernel, neglog, ramp, 1.0);
    const double worst = std::min({a, b, c});
    r.passed = worst >= -1e-2;
    r.expected = "min residual >= -1e-2 for H = y; y^2; -log y";
    r.got = "residuals " + num(a) + "; " + num(b) + "; " + num(c);
    r.tolerance = "1e-2";
    CsvTable table{{"case", "min_residual"}, {}};
    table.rows.push_back(Row{std::string("linear_sine"), a});
    table.rows.push_back(Row{std::string("square_sine"), b});
    table.rows.push_back(Row{std::string("neglog_ramp"), c});
    r.artifacts.push_back({"convexity", std::move(table)});
    return r;
}

CriterionResult run_one(int id, const SuiteOptions& options) {
    switch (id) {
    case 1: return kernel_identity();
    case 2: return mittag_leffler_sandwich();
    case 3: return relaxation_oracle();
    case 4: return ultraslow_decay();
    case 5: return maximum_principle(options);
    case 6: return comparison_principle(options);
    case 7: return positivity(options);
    case 8: return linear_decay();
    case 9: return stability_envelope();
    case 10: return instability_bound();
    case 11: return ode_blowup_bound();
    case 12: return dichotomy();
    case 13: return kaplan_blowup();
    case 14: return scheme_cross_validation();
    case 15: return convexity();
    default: throw DomainError("no criterion " + std::to_string(id));
    }
}

// Criteria that throw are failures, not crashes.
CriterionResult guarded(int id, const SuiteOptions& options) {
    try {
        return run_one(id, options);
    } catch (const std::exception& e) {
        auto r = make(id);
        r.passed = false;
        r.expected = "criterion runs to completion";
        r.got = std::string("exception: ") + e.what();
        r.tolerance = "none";
        return r;
    }
}

std::vector<std::string> rendered(const std::vector<CriterionResult>& results) {
    std::vector<std::string> out;
    for (const auto& r : results) {
        for (const auto& a : r.artifacts) out.push_back(a.name + "\n" + render_csv(a.table));
    }
    return out;
}

CriterionResult determinism(const std::vector<CriterionResult>& first, const SuiteOptions& options) {
    auto r = make(16);
    std::vector<CriterionResult> second;
    for (int id = 1; id < kCriterionCount; ++id) second.push_back(guarded(id, options));
    const auto a = rendered(first);
    const auto b = rendered(second);
    std::size_t differing = a.size() == b.size() ? 0 : std::max(a.size(), b.size());
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        bytes += a[i].size();
        if (a[i] != b[i]) ++differing;
    }
    r.passed = differing == 0 && !a.empty();
    r.expected = "identical CSV bytes across two runs";
    r.got = std::to_string(differing) + " of " + std::to_string(a.size()) + " artifacts differ (" +
            std::to_string(bytes) + " bytes compared)";
    r.tolerance = "0 bytes";
    return r;
}

} // namespace

std::string_view criterion_title(int id) {
    static constexpr std::string_view titles[] = {
        "",
        "kernel identity",
        "Mittag-Leffler sandwich",
        "relaxation oracle",
        "ultraslow decay",
        "discrete maximum principle",
        "comparison principle",
        "positivity",
        "linear decay exact solution",
        "stability envelope",
        "instability bound",
        "ODE blowup bound",
        "dichotomy of l",
        "PDE Kaplan blowup",
        "scheme cross-validation",
        "convexity inequality",
        "determinism",
    };
    if (id < 1 || id > kCriterionCount) return "unknown";
    return titles[id];
}

CriterionResult run_criterion(int id, const SuiteOptions& options) {
    if (id == kCriterionCount) {
        std::vector<CriterionResult> first;
        for (int i = 1; i < kCriterionCount; ++i) first.push_back(guarded(i, options));
        return determinism(first, options);
    }
    if (id < 1 || id > kCriterionCount) throw DomainError("no criterion " + std::to_string(id));
    return guarded(id, options);
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> results;
    for (int id = 1; id < kCriterionCount; ++id) {
        results.push_back(guarded(id, options));
        if (on_result) on_result(results.back());
    }
    results.push_back(determinism(results, options));
    if (on_result) on_result(results.back());
    return results;
}

FailureRecord failure_record(const CriterionResult& result) {
    return {"criterion." + std::to_string(result.id), result.expected, result.got, result.tolerance};
}

CsvTable criteria_table(const std::vector<CriterionResult>& results) {
    // free text may carry separators from exception messages
    const auto clean = [](std::string s) {
        std::replace(s.begin(), s.end(), ',', ';');
        std::replace(s.begin(), s.end(), '"', '\'');
        std::replace(s.begin(), s.end(), '\n', ' ');
        std::replace(s.begin(), s.end(), '\r', ' ');
        return s;
    };
    CsvTable table{{"id", "title", "passed", "expected", "got", "tolerance"}, {}};
    for (const auto& r : results) {
        table.rows.push_back(Row{static_cast<std::int64_t>(r.id), clean(r.title), std::string(r.passed ? "pass" : "fail"),
                                 clean(r.expected), clean(r.got), clean(r.tolerance)});
    }
    return table;
}

} // namespace subdiff

#include "subdiff/experiments.hpp"

#include "subdiff/diagnostics.hpp"
#include "subdiff/special_functions.hpp"
#include "subdiff/verification.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace subdiff {

namespace {

using Row = std::vector<CsvCell>;

std::string kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return key + "=" + buf;
}

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value; }

std::string status_name(RunStatus s) { return s == RunStatus::Blowup ? "blowup" : "completed"; }

Problem make_problem(const ExperimentConfig& cfg, std::optional<EllipticOperator> op, Nonlinearity f, Field u0) {
    Problem p{cfg.kernel.make(), cfg.grid.make(), std::move(op), std::move(f), std::move(u0)};
    p.scheme = cfg.run.scheme;
    p.mode = cfg.run.mode;
    p.blowup_threshold = cfg.run.threshold;
    p.snapshot_stride = cfg.run.stride;
    return p;
}

void report_lines(CommandResult& out, const BlowupReport& rep) {
    out.summary.push_back(kv("status", status_name(rep.status)));
    out.summary.push_back(kv("t_low", rep.t_low));
    out.summary.push_back(kv("t_high", rep.t_high));
    if (!rep.reason.empty()) out.summary.push_back(kv("reason", rep.reason));
}

// F(inf; u0) bound, or nullopt when the nonlinearity admits none from u0
std::optional<double> try_bound(const Nonlinearity& f, const KernelPair& pair, double u0, double factor) {
    try {
        return blowup_time_bound(f, pair, u0, factor);
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

CommandResult relax(const ExperimentConfig& cfg) {
    const auto pair = cfg.kernel.make();
    const auto grid = cfg.grid.make();
    const auto family = relaxation_family(pair, cfg.run.gamma, grid);
    CommandResult out;
    CsvTable table{{"t", "s", "k_gamma", "h", "r"}, {}};
    for (int n = 0; n <= grid.steps; ++n) {
        Row row{grid.time(n), family.s[n], family.k_gamma[n]};
        if (n < grid.steps) {
            row.emplace_back(family.h[n]);
            row.emplace_back(family.r[n]);
        } else {
            row.emplace_back(std::string());
            row.emplace_back(std::string());
        }
        table.rows.push_back(std::move(row));
    }
    out.tables.push_back({"relaxation", std::move(table)});
    out.summary.push_back(kv("kernel", pair.name()));
    out.summary.push_back(kv("gamma", cfg.run.gamma));
    out.summary.push_back(kv("s_final", family.s.back()));
    out.summary.push_back(kv("lform_deviation", relaxation_cross_check(pair, cfg.run.gamma, grid)));
    return out;
}

CommandResult mlcheck(const ExperimentConfig& cfg) {
    CommandResult out;
    CsvTable table{{"alpha", "x", "lower", "ml", "upper"}, {}};
    const auto& s = cfg.scan;
    double worst = -std::numeric_limits<double>::infinity();
    for (double alpha : s.alphas) {
        const double g1 = special::gamma(1.0 - alpha);
        const double g2 = special::gamma(1.0 + alpha);
        double previous = 2.0;
        for (int i = 0; i < s.points; ++i) {
            const double x = s.x_min * std::pow(s.x_max / s.x_min, static_cast<double>(i) / (s.points - 1));
            const double e = special::mittag_leffler_neg(alpha, x);
            const double lower = 1.0 / (1.0 + g1 * x);
            const double upper = 1.0 / (1.0 + x / g2);
            const double violation = std::max(lower - e, e - upper);
            worst = std::max(worst, violation);
            if (violation > 1e-9) {
                out.failures.push_back({"mlcheck.sandwich", "lower <= E <= upper at alpha " + std::to_string(alpha) +
                                                                " x " + std::to_string(x),
                                        "violation " + std::to_string(violation), "1e-9"});
            }
            if (!(e < previous)) {
                out.failures.push_back({"mlcheck.monotone", "E decreasing in x", "E(" + std::to_string(x) + ") = " +
                                                                                     std::to_string(e),
                                        "strict"});
            }
            previous = e;
            table.rows.push_back(Row{alpha, x, lower, e, upper});
        }
    }
    out.tables.push_back({"mlcheck", std::move(table)});
    out.summary.push_back(kv("worst_violation", worst));
    out.exit_code = out.failures.empty() ? 0 : 1;
    return out;
}

CommandResult pairverify(const ExperimentConfig& cfg) {
    CommandResult out;
    const auto pair = cfg.kernel.make();
    CsvTable table{{"tau", "deviation", "ratio"}, {}};
    double previous = 0.0;
    for (int level = 0; level < cfg.run.levels; ++level) {
        const double tau = cfg.grid.tau / std::ldexp(1.0, level);
        const double dev = verify_pair(pair, TimeGrid::from_horizon(cfg.grid.horizon, tau), cfg.run.t_min);
        if (level == 0) {
            table.rows.push_back(Row{tau, dev, std::string()});
        } else {
            const double ratio = dev / previous;
            table.rows.push_back(Row{tau, dev, ratio});
            if (!(ratio <= 0.9)) {
                out.failures.push_back({"pairverify.ratio", "deviation(tau/2) <= 0.9 deviation(tau)",
                                        "ratio " + std::to_string(ratio) + " at tau " + std::to_string(tau), "0.9"});
            }
        }
        previous = dev;
    }
    out.tables.push_back({"pairverify", std::move(table)});
    out.summary.push_back(kv("kernel", pair.name()));
    out.summary.push_back(kv("deviation", previous));
    out.exit_code = out.failures.empty() ? 0 : 1;
    return out;
}

CommandResult ode(const ExperimentConfig& cfg) {
    CommandResult out;
    const double u0 = cfg.initial.value;
    const auto f = cfg.nonlinearity.make();
    const auto problem = make_problem(cfg, std::nullopt, f, Field::Constant(1, u0));
    const auto result = run(problem);
    const auto& traj = result.trajectory;
    CsvTable table{{"t", "u"}, {}};
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        table.rows.push_back(Row{traj.times[traj.snapshot_steps[k]], traj.snapshots[k][0]});
    }
    out.tables.push_back({"trajectory", std::move(table)});
    out.summary.push_back(kv("nonlinearity", f.name()));
    report_lines(out, result.report);
    if (const auto bound = try_bound(f, problem.pair, u0, 1.0)) out.summary.push_back(kv("blowup_bound", *bound));
    return out;
}

CommandResult pde(const ExperimentConfig& cfg) {
    CommandResult out;
    const auto op = cfg.space.make();
    const Mesh& mesh = op.mesh();
    const auto& eig = op.principal_eigenpair();
    const auto f = cfg.nonlinearity.make();
    auto problem = make_problem(cfg, op, f, cfg.initial.make(mesh));
    problem.kaplan_weight = eig.psi;
    const auto result = run(problem);
    const auto& traj = result.trajectory;

    CsvTable field{mesh.dim == 1 ? std::vector<std::string>{"step", "t", "x", "u"}
                                 : std::vector<std::string>{"step", "t", "x", "y", "u"},
                   {}};
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const int step = traj.snapshot_steps[k];
        const double t = traj.times[step];
        const auto& u = traj.snapshots[k];
        for (int j = 0; j < (mesh.dim == 1 ? 1 : mesh.n[1]); ++j) {
            for (int i = 0; i < mesh.n[0]; ++i) {
                Row row{static_cast<std::int64_t>(step), t, mesh.coordinate(0, i)};
                if (mesh.dim == 2) row.emplace_back(mesh.coordinate(1, j));
                row.emplace_back(u[mesh.index(i, j)]);
                field.rows.push_back(std::move(row));
            }
        }
    }
    CsvTable diag{{"step", "t", "supnorm", "W"}, {}};
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        diag.rows.push_back(Row{static_cast<std::int64_t>(n), traj.times[n], traj.supnorm[n], traj.kaplan[n]});
    }
    out.tables.push_back({"field", std::move(field)});
    out.tables.push_back({"diagnostics", std::move(diag)});
    out.summary.push_back(kv("nonlinearity", f.name()));
    out.summary.push_back(kv("lambda_star", eig.lambda));
    out.summary.push_back(kv("W0", traj.kaplan.front()));
    report_lines(out, result.report);
    if (traj.kaplan.front() >= 2.0 * eig.lambda) {
        if (const auto bound = try_bound(f, problem.pair, traj.kaplan.front(), 2.0)) {
            out.summary.push_back(kv("kaplan_bound", *bound));
        }
    }
    return out;
}

CommandResult eigen(const ExperimentConfig& cfg) {
    CommandResult out;
    const auto op = cfg.space.make();
    const Mesh& mesh = op.mesh();
    const auto& eig = op.principal_eigenpair();
    CsvTable table{mesh.dim == 1 ? std::vector<std::string>{"x", "psi"} : std::vector<std::string>{"x", "y", "psi"},
                   {}};
    for (int j = 0; j < (mesh.dim == 1 ? 1 : mesh.n[1]); ++j) {
        for (int i = 0; i < mesh.n[0]; ++i) {
            Row row{mesh.coordinate(0, i)};
            if (mesh.dim == 2) row.emplace_back(mesh.coordinate(1, j));
            row.emplace_back(eig.psi[mesh.index(i, j)]);
            table.rows.push_back(std::move(row));
        }
    }
    out.tables.push_back({"eigen", std::move(table)});
    out.summary.push_back(kv("lambda_star", eig.lambda));
    out.summary.push_back(kv("lambda1_h", discrete_laplacian_first_eigenvalue(mesh)));
    out.summary.push_back(kv("rayleigh_lower_bound", rayleigh_lower_bound(op)));
    out.summary.push_back(kv("iterations", static_cast<double>(eig.iterations)));
    return out;
}

CommandResult stability_scan(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
    CommandResult out;
    const auto op = cfg.space.make();
    const double lambda = op.principal_eigenpair().lambda;
    const Field u0 = cfg.initial.make(op.mesh());
    const auto& cs = cfg.scan.c_values;
    std::vector<RunResult> runs(cs.size());
    std::mutex lock;
    parallel_for(static_cast<int>(cs.size()), scan_threads(), [&](int i) {
        auto problem = make_problem(cfg, op, Nonlinearity::linear(cs[i]), u0);
        problem.snapshot_stride = std::max(1, problem.grid.steps);
        runs[i] = run(problem);
        if (progress) {
            std::lock_guard guard(lock);
            progress("c=" + std::to_string(cs[i]) + " done");
        }
    });
    CsvTable table{{"c", "lambda_star", "predicted", "observed", "sup_initial", "sup_final"}, {}};
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto& traj = runs[i].trajectory;
        const double first = traj.supnorm.front();
        const double last = traj.supnorm.back();
        const std::string predicted = cs[i] < lambda ? "decay" : cs[i] > lambda ? "growth" : "neutral";
        const std::string observed =
            runs[i].report.status == RunStatus::Blowup || last > first ? "growth" : "decay";
        if (predicted != "neutral" && predicted != observed) {
            out.failures.push_back({"stability-scan.c=" + std::to_string(cs[i]), predicted, observed,
                                    "classification"});
        }
        table.rows.push_back(Row{cs[i], lambda, predicted, observed, first, last});
    }
    out.tables.push_back({"stability", std::move(table)});
    out.summary.push_back(kv("lambda_star", lambda));
    out.exit_code = out.failures.empty() ? 0 : 1;
    return out;
}

CommandResult blowup_scan(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
    CommandResult out;
    const auto f = cfg.nonlinearity.make();
    const auto pair = cfg.kernel.make();
    const auto& us = cfg.scan.u0_values;
    std::vector<RunResult> runs(us.size());
    std::mutex lock;
    parallel_for(static_cast<int>(us.size()), scan_threads(), [&](int i) {
        auto problem = make_problem(cfg, std::nullopt, f, Field::Constant(1, us[i]));
        problem.snapshot_stride = std::max(1, problem.grid.steps);
        runs[i] = run(problem);
        if (progress) {
            std::lock_guard guard(lock);
            progress("u0=" + std::to_string(us[i]) + " done");
        }
    });
    const double horizon = cfg.grid.horizon;
    CsvTable table{{"u0", "status", "t_low", "t_high", "bound"}, {}};
    for (std::size_t i = 0; i < us.size(); ++i) {
        const auto& rep = runs[i].report;
        const auto bound = try_bound(f, pair, us[i], 1.0);
        const double b = bound.value_or(std::numeric_limits<double>::infinity());
        const std::string id = "blowup-scan.u0=" + std::to_string(us[i]);
        if (std::isfinite(b) && b < horizon && rep.status != RunStatus::Blowup) {
            out.failures.push_back({id, "blowup before " + std::to_string(b), "completed horizon", "none"});
        }
        if (rep.status == RunStatus::Blowup && std::isfinite(b) && rep.t_high > 1.02 * b) {
            out.failures.push_back({id, "t_high <= " + std::to_string(b), "t_high " + std::to_string(rep.t_high),
                                    "2% of the bound"});
        }
        table.rows.push_back(Row{us[i], status_name(rep.status), rep.t_low, rep.t_high, b});
    }
    out.tables.push_back({"blowup", std::move(table)});
    out.summary.push_back(kv("nonlinearity", f.name()));
    out.exit_code = out.failures.empty() ? 0 : 1;
    return out;
}

CommandResult verify(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
    CommandResult out;
    SuiteOptions options;
    options.seed = cfg.run.seed;
    const auto results = run_suite(options, [&](const CriterionResult& r) {
        if (progress) {
            progress(std::string(r.passed ? "PASS" : "FAIL") + " " + std::to_string(r.id) + " " + r.title + ": " +
                     r.got);
        }
    });
    out.tables.push_back({"criteria", criteria_table(results)});
    for (const auto& r : results) {
        for (const auto& a : r.artifacts) out.tables.push_back(a);
        if (!r.passed) out.failures.push_back(failure_record(r));
    }
    const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    out.summary.push_back("passed=" + std::to_string(passed) + "/" + std::to_string(results.size()));
    out.exit_code = out.failures.empty() ? 0 : 1;
    return out;
}

} // namespace

int scan_threads() {
    if (const char* env = std::getenv("SUBDIFF_THREADS"); env && *env) {
        int value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc() || ptr != end || value < 1) {
            throw ConfigError(std::string("SUBDIFF_THREADS = '") + env + "' is not a positive integer");
        }
        return value;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    const int workers = std::clamp(threads, 1, std::max(count, 1));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    const auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard guard(error_lock);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

CommandResult run_command(const ExperimentConfig& config, const std::function<void(const std::string&)>& progress) {
    switch (config.command) {
    case Command::Relax: return relax(config);
    case Command::MLCheck: return mlcheck(config);
    case Command::PairVerify: return pairverify(config);
    case Command::Ode: return ode(config);
    case Command::Pde: return pde(config);
    case Command::Eigen: return eigen(config);
    case Command::StabilityScan: return stability_scan(config, progress);
    case Command::BlowupScan: return blowup_scan(config, progress);
    case Command::Verify: return verify(config, progress);
    }
    throw DomainError("unknown command");
}

} // namespace subdiff

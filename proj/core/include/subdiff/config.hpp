#pragma once

#include "subdiff/elliptic.hpp"
#include "subdiff/evolution.hpp"
#include "subdiff/kernel.hpp"
#include "subdiff/nonlinearity.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subdiff {

enum class Command { Relax, MLCheck, PairVerify, Ode, Pde, Eigen, StabilityScan, BlowupScan, Verify };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command command);

enum class KernelKind { Fractional, FractionalExp, Distributed };

struct KernelSpec {
    KernelKind kind = KernelKind::Fractional;
    double alpha = 0.5;
    double gamma0 = 1.0;
    int quad_depth = KernelPair::kDefaultQuadDepth;

    KernelPair make() const;
};

struct GridSpec {
    double tau = 1e-3;
    double horizon = 1.0;

    TimeGrid make() const { return TimeGrid::from_horizon(horizon, tau); }
};

/// Piecewise-constant profile: value v_k on (x_{k-1}, x_k], x_0 = 0.
using PiecewiseTable = std::vector<std::pair<double, double>>;

struct SpaceSpec {
    int dim = 1;
    double extent = 1.0;
    double extent_y = 1.0;
    int n = 199;
    int n_y = 199;
    double coefficient = 1.0;
    /// Coefficient as a function of x, when set; otherwise the constant above.
    PiecewiseTable coefficient_table;

    Mesh mesh() const;
    EllipticOperator make() const;
};

enum class NonlinearityKind { Zero, Linear, Power, Quadratic, Nsy, Polynomial };

struct NonlinearitySpec {
    NonlinearityKind kind = NonlinearityKind::Zero;
    double c = 1.0;
    double p = 2.0;
    bool odd_extension = true;
    std::vector<double> coefficients;

    Nonlinearity make() const;
};

enum class InitialKind { Constant, Sine, Table };

struct InitialSpec {
    InitialKind kind = InitialKind::Sine;
    /// Constant value, or the amplitude of the sine mode.
    double value = 1.0;
    int mode = 1;
    /// Profile in x for InitialKind::Table.
    PiecewiseTable table;

    Field make(const Mesh& mesh) const;
};

struct RunSpec {
    Scheme scheme = Scheme::KForm;
    NonlinearMode mode = NonlinearMode::Newton;
    double threshold = 1e8;
    int stride = 1;
    double gamma = 1.0;
    double t_min = 0.1;
    int levels = 2;
    std::uint64_t seed = 42;
};

struct ScanSpec {
    std::vector<double> c_values{5.0, 15.0};
    std::vector<double> u0_values{1.0, 2.0, 5.0};
    std::vector<double> alphas{0.3, 0.5, 0.7};
    int points = 40;
    double x_min = 1e-3;
    double x_max = 1e3;
};

struct ExperimentConfig {
    Command command = Command::Relax;
    KernelSpec kernel;
    GridSpec grid;
    SpaceSpec space;
    NonlinearitySpec nonlinearity;
    InitialSpec initial;
    RunSpec run;
    ScanSpec scan;
};

/**
 * Parses the line-oriented `key = value` format. Sections ([kernel], [grid],
 * [space], [nonlinearity], [initial], [run], [scan]) are optional; a key
 * inside a section must belong to it. '#' starts a comment.
 *
 * Every error is a ConfigError whose message starts with "line N:" when it
 * can be tied to a line. Unknown keys, duplicate keys, keys that do not
 * apply to the chosen variant or command, and out-of-range values are
 * all errors.
 */
ExperimentConfig parse_config(std::string_view text, Command command);

} // namespace subdiff

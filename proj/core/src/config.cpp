#include "subdiff/config.hpp"

#include "subdiff/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace subdiff {

namespace {

constexpr unsigned bit(Command c) { return 1u << static_cast<unsigned>(c); }

constexpr unsigned kTimeCommands = bit(Command::Relax) | bit(Command::PairVerify) | bit(Command::Ode) |
                                   bit(Command::Pde) | bit(Command::StabilityScan) | bit(Command::BlowupScan);
constexpr unsigned kSpaceCommands = bit(Command::Pde) | bit(Command::Eigen) | bit(Command::StabilityScan);
constexpr unsigned kReactionCommands = bit(Command::Ode) | bit(Command::Pde) | bit(Command::BlowupScan);
constexpr unsigned kInitialCommands = bit(Command::Ode) | bit(Command::Pde) | bit(Command::StabilityScan);
constexpr unsigned kRunCommands =
    bit(Command::Ode) | bit(Command::Pde) | bit(Command::StabilityScan) | bit(Command::BlowupScan);
constexpr unsigned kAllCommands = ~0u;

struct KeyInfo {
    std::string_view section;
    std::string_view name;
    unsigned commands;
};

constexpr KeyInfo kKeys[] = {
    {"kernel", "kernel", kTimeCommands},
    {"kernel", "alpha", kTimeCommands},
    {"kernel", "gamma0", kTimeCommands},
    {"kernel", "quad_depth", kTimeCommands},
    {"grid", "tau", kTimeCommands},
    {"grid", "T", kTimeCommands},
    {"space", "dim", kSpaceCommands},
    {"space", "extent", kSpaceCommands},
    {"space", "extent_y", kSpaceCommands},
    {"space", "n", kSpaceCommands},
    {"space", "n_y", kSpaceCommands},
    {"space", "coefficient", kSpaceCommands},
    {"space", "coefficient_table", kSpaceCommands},
    {"nonlinearity", "f", kReactionCommands},
    {"nonlinearity", "c", kReactionCommands},
    {"nonlinearity", "p", kReactionCommands},
    {"nonlinearity", "extension", kReactionCommands},
    {"nonlinearity", "coefficients", kReactionCommands},
    {"initial", "u0", kInitialCommands},
    {"initial", "value", kInitialCommands},
    {"initial", "mode", kInitialCommands},
    {"initial", "table", kInitialCommands},
    {"run", "gamma", bit(Command::Relax)},
    {"run", "scheme", kRunCommands},
    {"run", "nonlinear_mode", kRunCommands},
    {"run", "threshold", kRunCommands},
    {"run", "stride", bit(Command::Ode) | bit(Command::Pde)},
    {"run", "t_min", bit(Command::PairVerify)},
    {"run", "levels", bit(Command::PairVerify)},
    {"run", "seed", kAllCommands},
    {"scan", "c_values", bit(Command::StabilityScan)},
    {"scan", "u0_values", bit(Command::BlowupScan)},
    {"scan", "alphas", bit(Command::MLCheck)},
    {"scan", "points", bit(Command::MLCheck)},
    {"scan", "x_min", bit(Command::MLCheck)},
    {"scan", "x_max", bit(Command::MLCheck)},
};

struct Entry {
    std::string value;
    int line;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(int line, const std::string& message) {
    if (line > 0) throw ConfigError("line " + std::to_string(line) + ": " + message);
    throw ConfigError(message);
}

std::string show(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, Command command)
        : entries_(std::move(entries)), command_(command) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    const std::string* raw(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second.value;
    }

    double number(const std::string& key, double fallback) const {
        const auto* v = raw(key);
        return v ? parse_number(*v, line(key), key) : fallback;
    }

    long long integer(const std::string& key, long long fallback) const {
        const auto* v = raw(key);
        if (!v) return fallback;
        long long out = 0;
        const auto* end = v->data() + v->size();
        const auto [ptr, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc() || ptr != end) fail(line(key), key + " = " + *v + " is not an integer");
        return out;
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
        const auto* v = raw(key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), line(key), key));
        if (out.empty()) fail(line(key), key + " must list at least one value");
        return out;
    }

    PiecewiseTable table(const std::string& key) const {
        const auto* v = raw(key);
        PiecewiseTable out;
        if (!v) return out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) fail(line(key), key + ": expected x:value pairs, got '" + trim(item) + "'");
            const double x = parse_number(trim(item.substr(0, colon)), line(key), key);
            const double value = parse_number(trim(item.substr(colon + 1)), line(key), key);
            if (!out.empty() && !(x > out.back().first)) {
                fail(line(key), key + ": breakpoints must be strictly increasing");
            }
            if (!(x > 0.0)) fail(line(key), key + ": breakpoints must be positive");
            out.emplace_back(x, value);
        }
        if (out.empty()) fail(line(key), key + " must list at least one x:value pair");
        return out;
    }

    std::string word(const std::string& key, const std::string& fallback) const {
        const auto* v = raw(key);
        return v ? *v : fallback;
    }

    /// Rejects a key that is present although the chosen variant has no use for it.
    void reject(const std::string& key, const std::string& why) const {
        if (has(key)) fail(line(key), "key '" + key + "' does not apply to " + why);
    }

    Command command() const { return command_; }

private:
    static double parse_number(const std::string& text, int line, const std::string& key) {
        double out = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, out);
        if (ec != std::errc() || ptr != end || text.empty()) {
            fail(line, key + " = '" + text + "' is not a number");
        }
        if (!std::isfinite(out)) fail(line, key + " must be finite");
        return out;
    }

    std::map<std::string, Entry> entries_;
    Command command_;
};

void require(bool ok, const Reader& in, const std::string& key, double value, const std::string& bound) {
    if (!ok) fail(in.line(key), key + " = " + show(value) + " is outside " + bound);
}

void read_kernel(const Reader& in, KernelSpec& spec) {
    const std::string kind = in.word("kernel", "fractional");
    if (kind == "fractional") {
        spec.kind = KernelKind::Fractional;
    } else if (kind == "fractional_exp") {
        spec.kind = KernelKind::FractionalExp;
    } else if (kind == "distributed") {
        spec.kind = KernelKind::Distributed;
    } else {
        fail(in.line("kernel"), "kernel = " + kind + " is not one of fractional, fractional_exp, distributed");
    }
    if (spec.kind == KernelKind::Distributed) {
        in.reject("alpha", "kernel = distributed");
        in.reject("gamma0", "kernel = distributed");
    } else {
        in.reject("quad_depth", "kernel = " + kind);
        if (spec.kind == KernelKind::Fractional) in.reject("gamma0", "kernel = fractional");
    }
    spec.alpha = in.number("alpha", spec.alpha);
    require(spec.alpha > KernelPair::kMinOrder && spec.alpha < KernelPair::kMaxOrder, in, "alpha", spec.alpha,
            "(0.05, 0.95)");
    spec.gamma0 = in.number("gamma0", spec.gamma0);
    require(spec.gamma0 > 0.0, in, "gamma0", spec.gamma0, "(0, inf)");
    const long long depth = in.integer("quad_depth", spec.quad_depth);
    require(depth >= 4 && depth <= 512, in, "quad_depth", static_cast<double>(depth), "[4, 512]");
    spec.quad_depth = static_cast<int>(depth);
}

void read_grid(const Reader& in, GridSpec& spec) {
    spec.tau = in.number("tau", spec.tau);
    require(spec.tau > 0.0, in, "tau", spec.tau, "(0, inf)");
    spec.horizon = in.number("T", spec.horizon);
    require(spec.horizon > 0.0, in, "T", spec.horizon, "(0, inf)");
    const double steps = spec.horizon / spec.tau;
    if (steps > 1e7) fail(in.line("T"), "T / tau = " + show(steps) + " exceeds the 1e7 step limit");
    try {
        (void)spec.make();
    } catch (const DomainError& e) {
        fail(in.has("T") ? in.line("T") : in.line("tau"), e.what());
    }
}

void read_space(const Reader& in, SpaceSpec& spec) {
    const long long dim = in.integer("dim", spec.dim);
    if (dim != 1 && dim != 2) fail(in.line("dim"), "dim = " + std::to_string(dim) + " is not 1 or 2");
    spec.dim = static_cast<int>(dim);
    if (spec.dim == 1) {
        in.reject("extent_y", "dim = 1");
        in.reject("n_y", "dim = 1");
    }
    if (in.has("coefficient") && in.has("coefficient_table")) {
        fail(in.line("coefficient_table"), "coefficient and coefficient_table are mutually exclusive");
    }
    spec.extent = in.number("extent", spec.extent);
    require(spec.extent > 0.0, in, "extent", spec.extent, "(0, inf)");
    spec.extent_y = in.number("extent_y", spec.extent);
    require(spec.extent_y > 0.0, in, "extent_y", spec.extent_y, "(0, inf)");
    const long long n = in.integer("n", spec.n);
    require(n >= 3 && n <= 1000000, in, "n", static_cast<double>(n), "[3, 1000000]");
    spec.n = static_cast<int>(n);
    const long long ny = in.integer("n_y", spec.n);
    require(ny >= 3 && ny <= 1000000, in, "n_y", static_cast<double>(ny), "[3, 1000000]");
    spec.n_y = static_cast<int>(ny);
    if (spec.dim == 2 && static_cast<double>(spec.n) * spec.n_y > 4e6) {
        fail(in.line("n"), "2D mesh larger than 4e6 nodes");
    }
    spec.coefficient = in.number("coefficient", spec.coefficient);
    require(spec.coefficient > 0.0, in, "coefficient", spec.coefficient, "(0, inf)");
    spec.coefficient_table = in.table("coefficient_table");
    for (const auto& [x, a] : spec.coefficient_table) {
        if (!(a > 0.0)) fail(in.line("coefficient_table"), "coefficient_table value " + show(a) + " is outside (0, inf)");
    }
    if (!spec.coefficient_table.empty() && spec.coefficient_table.back().first < spec.extent) {
        fail(in.line("coefficient_table"), "coefficient_table must cover (0, extent]");
    }
}

void read_nonlinearity(const Reader& in, NonlinearitySpec& spec) {
    static const std::map<std::string, NonlinearityKind> kinds{
        {"zero", NonlinearityKind::Zero},      {"linear", NonlinearityKind::Linear},
        {"power", NonlinearityKind::Power},    {"quadratic", NonlinearityKind::Quadratic},
        {"nsy", NonlinearityKind::Nsy},        {"polynomial", NonlinearityKind::Polynomial},
    };
    if (in.has("f")) {
        const std::string name = in.word("f", "");
        const auto it = kinds.find(name);
        if (it == kinds.end()) {
            fail(in.line("f"), "f = " + name + " is not one of zero, linear, power, quadratic, nsy, polynomial");
        }
        spec.kind = it->second;
    }
    const std::string label = "f = " + std::string([&] {
        for (const auto& [name, kind] : kinds) {
            if (kind == spec.kind) return name;
        }
        return std::string();
    }());
    if (spec.kind != NonlinearityKind::Linear) in.reject("c", label);
    if (spec.kind != NonlinearityKind::Power) {
        in.reject("p", label);
        in.reject("extension", label);
    }
    if (spec.kind != NonlinearityKind::Polynomial) in.reject("coefficients", label);

    spec.c = in.number("c", spec.c);
    spec.p = in.number("p", spec.p);
    require(spec.p >= 1.0, in, "p", spec.p, "[1, inf)");
    const std::string extension = in.word("extension", spec.odd_extension ? "odd" : "zero");
    if (extension != "odd" && extension != "zero") {
        fail(in.line("extension"), "extension = " + extension + " is not odd or zero");
    }
    spec.odd_extension = extension == "odd";
    spec.coefficients = in.list("coefficients", spec.coefficients);
}

void read_initial(const Reader& in, InitialSpec& spec) {
    if (in.has("u0")) {
        const std::string kind = in.word("u0", "");
        if (kind == "constant") {
            spec.kind = InitialKind::Constant;
        } else if (kind == "sine") {
            spec.kind = InitialKind::Sine;
        } else if (kind == "table") {
            spec.kind = InitialKind::Table;
        } else {
            fail(in.line("u0"), "u0 = " + kind + " is not one of constant, sine, table");
        }
    }
    if (in.command() == Command::Ode && spec.kind != InitialKind::Constant) {
        fail(in.line("u0"), "the scalar problem needs u0 = constant");
    }
    const std::string label = spec.kind == InitialKind::Constant ? "u0 = constant"
                              : spec.kind == InitialKind::Sine   ? "u0 = sine"
                                                                 : "u0 = table";
    if (spec.kind != InitialKind::Sine) in.reject("mode", label);
    if (spec.kind == InitialKind::Table) in.reject("value", label);
    if (spec.kind != InitialKind::Table) in.reject("table", label);
    if (spec.kind == InitialKind::Table && !in.has("table")) fail(in.line("u0"), "u0 = table needs a table key");

    spec.value = in.number("value", spec.value);
    const long long mode = in.integer("mode", spec.mode);
    require(mode >= 1 && mode <= 1000000, in, "mode", static_cast<double>(mode), "[1, 1000000]");
    spec.mode = static_cast<int>(mode);
    spec.table = in.table("table");
}

void read_run(const Reader& in, RunSpec& spec, double horizon) {
    spec.gamma = in.number("gamma", spec.gamma);
    const std::string scheme = in.word("scheme", spec.scheme == Scheme::KForm ? "kform" : "lform");
    if (scheme != "kform" && scheme != "lform") fail(in.line("scheme"), "scheme = " + scheme + " is not kform or lform");
    spec.scheme = scheme == "kform" ? Scheme::KForm : Scheme::LForm;
    const std::string mode = in.word("nonlinear_mode", spec.mode == NonlinearMode::Newton ? "newton" : "imex");
    if (mode != "newton" && mode != "imex") {
        fail(in.line("nonlinear_mode"), "nonlinear_mode = " + mode + " is not newton or imex");
    }
    spec.mode = mode == "newton" ? NonlinearMode::Newton : NonlinearMode::IMEX;
    spec.threshold = in.number("threshold", spec.threshold);
    require(spec.threshold > 0.0, in, "threshold", spec.threshold, "(0, inf)");
    const long long stride = in.integer("stride", spec.stride);
    require(stride >= 1 && stride <= 1000000000, in, "stride", static_cast<double>(stride), "[1, 1e9]");
    spec.stride = static_cast<int>(stride);
    spec.t_min = in.number("t_min", spec.t_min);
    if (in.command() == Command::PairVerify) {
        require(spec.t_min > 0.0 && spec.t_min < horizon, in, "t_min", spec.t_min, "(0, T)");
    }
    const long long levels = in.integer("levels", spec.levels);
    require(levels >= 2 && levels <= 8, in, "levels", static_cast<double>(levels), "[2, 8]");
    spec.levels = static_cast<int>(levels);
    const long long seed = in.integer("seed", static_cast<long long>(spec.seed));
    require(seed >= 0, in, "seed", static_cast<double>(seed), "[0, inf)");
    spec.seed = static_cast<std::uint64_t>(seed);
}

void read_scan(const Reader& in, ScanSpec& spec) {
    spec.c_values = in.list("c_values", spec.c_values);
    spec.u0_values = in.list("u0_values", spec.u0_values);
    for (double u : spec.u0_values) require(u > 0.0, in, "u0_values", u, "(0, inf)");
    spec.alphas = in.list("alphas", spec.alphas);
    for (double a : spec.alphas) {
        require(a > KernelPair::kMinOrder && a < KernelPair::kMaxOrder, in, "alphas", a, "(0.05, 0.95)");
    }
    const long long points = in.integer("points", spec.points);
    require(points >= 2 && points <= 100000, in, "points", static_cast<double>(points), "[2, 100000]");
    spec.points = static_cast<int>(points);
    spec.x_min = in.number("x_min", spec.x_min);
    require(spec.x_min > 0.0, in, "x_min", spec.x_min, "(0, inf)");
    spec.x_max = in.number("x_max", spec.x_max);
    require(spec.x_max > spec.x_min && spec.x_max <= 1e6, in, "x_max", spec.x_max, "(x_min, 1e6]");
}

double table_value(const PiecewiseTable& table, double x) {
    for (const auto& [edge, value] : table) {
        if (x <= edge) return value;
    }
    return table.back().second;
}

} // namespace

std::optional<Command> parse_command(std::string_view name) {
    static const std::pair<std::string_view, Command> names[] = {
        {"relax", Command::Relax},
        {"mlcheck", Command::MLCheck},
        {"pairverify", Command::PairVerify},
        {"ode", Command::Ode},
        {"pde", Command::Pde},
        {"eigen", Command::Eigen},
        {"stability-scan", Command::StabilityScan},
        {"blowup-scan", Command::BlowupScan},
        {"verify", Command::Verify},
    };
    for (const auto& [n, c] : names) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::string_view command_name(Command command) {
    switch (command) {
    case Command::Relax: return "relax";
    case Command::MLCheck: return "mlcheck";
    case Command::PairVerify: return "pairverify";
    case Command::Ode: return "ode";
    case Command::Pde: return "pde";
    case Command::Eigen: return "eigen";
    case Command::StabilityScan: return "stability-scan";
    case Command::BlowupScan: return "blowup-scan";
    case Command::Verify: return "verify";
    }
    return "?";
}

KernelPair KernelSpec::make() const {
    switch (kind) {
    case KernelKind::Fractional: return KernelPair::fractional(alpha);
    case KernelKind::FractionalExp: return KernelPair::fractional_exp(alpha, gamma0);
    case KernelKind::Distributed: return KernelPair::distributed_order(quad_depth);
    }
    throw DomainError("kernel: unknown variant");
}

Mesh SpaceSpec::mesh() const {
    return dim == 1 ? Mesh::interval(extent, n) : Mesh::rectangle(extent, extent_y, n, n_y);
}

EllipticOperator SpaceSpec::make() const {
    const Mesh m = mesh();
    if (coefficient_table.empty()) return assemble(m, CoefficientField::constant(m, coefficient));
    const PiecewiseTable table = coefficient_table;
    return assemble(m, CoefficientField::from_function(m, [table](double x, double) { return table_value(table, x); }));
}

Nonlinearity NonlinearitySpec::make() const {
    switch (kind) {
    case NonlinearityKind::Zero: return Nonlinearity::zero();
    case NonlinearityKind::Linear: return Nonlinearity::linear(c);
    case NonlinearityKind::Power: return Nonlinearity::power(p, odd_extension);
    case NonlinearityKind::Quadratic: return Nonlinearity::quadratic();
    case NonlinearityKind::Nsy: return Nonlinearity::nsy();
    case NonlinearityKind::Polynomial: return Nonlinearity::polynomial(coefficients);
    }
    throw DomainError("nonlinearity: unknown variant");
}

Field InitialSpec::make(const Mesh& mesh) const {
    switch (kind) {
    case InitialKind::Constant: return Field::Constant(mesh.size(), value);
    case InitialKind::Sine: {
        const double kx = mode * std::numbers::pi / mesh.extent[0];
        const double ky = std::numbers::pi / mesh.extent[1];
        const bool two_d = mesh.dim == 2;
        const double amplitude = value;
        return mesh.sample([=](double x, double y) {
            return amplitude * std::sin(kx * x) * (two_d ? std::sin(ky * y) : 1.0);
        });
    }
    case InitialKind::Table: {
        const PiecewiseTable t = table;
        return mesh.sample([t](double x, double) { return table_value(t, x); });
    }
    }
    throw DomainError("initial datum: unknown variant");
}

ExperimentConfig parse_config(std::string_view text, Command command) {
    std::map<std::string, Entry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view raw_line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        std::string line = trim(raw_line.substr(0, raw_line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header '" + line + "'");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                           [&](const KeyInfo& k) { return k.section == section; });
            if (!known) fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) fail(line_no, "missing key before '='");
        if (value.empty()) fail(line_no, "missing value for key '" + key + "'");

        const auto* info = std::find_if(std::begin(kKeys), std::end(kKeys), [&](const KeyInfo& k) { return k.name == key; });
        if (info == std::end(kKeys)) fail(line_no, "unknown key '" + key + "'");
        if (!section.empty() && info->section != section) {
            fail(line_no, "key '" + key + "' belongs to [" + std::string(info->section) + "], not [" + section + "]");
        }
        if (!(info->commands & bit(command))) {
            fail(line_no, "key '" + key + "' does not apply to command " + std::string(command_name(command)));
        }
        if (const auto it = entries.find(key); it != entries.end()) {
            fail(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
        }
        entries.emplace(key, Entry{value, line_no});
    }

    ExperimentConfig config;
    config.command = command;
    switch (command) {
    case Command::Ode:
        config.nonlinearity.kind = NonlinearityKind::Linear;
        config.nonlinearity.c = -1.0;
        config.initial.kind = InitialKind::Constant;
        break;
    case Command::Pde:
        config.nonlinearity.kind = NonlinearityKind::Linear;
        config.nonlinearity.c = 5.0;
        break;
    case Command::BlowupScan: config.nonlinearity.kind = NonlinearityKind::Quadratic; break;
    default: break;
    }

    const Reader in(std::move(entries), command);
    read_kernel(in, config.kernel);
    read_grid(in, config.grid);
    read_space(in, config.space);
    read_nonlinearity(in, config.nonlinearity);
    read_initial(in, config.initial);
    read_run(in, config.run, config.grid.horizon);
    read_scan(in, config.scan);
    return config;
}

} // namespace subdiff

// subdiff <command> --config <path> [--out <path>]
//
// Exit codes: 0 success, 1 a verification check failed, 2 bad config or
// command line, 3 runtime or solver error. Every failure also prints one
// JSON record per line on stderr.

#include "subdiff/config.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kVerificationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

void emit(const subdiff::FailureRecord& r) {
    const nlohmann::json j{{"test_id", r.test_id}, {"expected", r.expected}, {"got", r.got}, {"tolerance", r.tolerance}};
    std::cerr << j.dump() << '\n';
}

int fail(int code, const std::string& test_id, const std::string& expected, const std::string& got) {
    emit({test_id, expected, got, "none"});
    return code;
}

// run.csv + "diagnostics" -> run.diagnostics.csv
fs::path companion(const fs::path& out, const std::string& name) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + "." + name + ".csv");
    return p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal-in-time subdiffusion laboratory"};
    std::string command;
    std::string config_path;
    std::string out_path;
    app.add_option("command", command,
                   "relax | mlcheck | pairverify | ode | pde | eigen | stability-scan | blowup-scan | verify")
        ->required();
    app.add_option("--config", config_path, "key = value config file (defaults apply when omitted)");
    app.add_option("--out", out_path, "primary CSV output; companions are written next to it");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kConfigError, "cli", "valid command line", e.what());
    }

    const auto cmd = subdiff::parse_command(command);
    if (!cmd) return fail(kConfigError, "cli", "a known command", command);

    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) return fail(kConfigError, "config", "readable config file", config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    try {
        const auto config = subdiff::parse_config(text, *cmd);
        const auto result = subdiff::run_command(config, [](const std::string& line) { std::cerr << line << '\n'; });

        std::ostream& summary = out_path.empty() ? std::cerr : std::cout;
        for (const auto& line : result.summary) summary << line << '\n';
        if (out_path.empty()) {
            std::cout << subdiff::render_csv(result.tables.front().table);
        } else {
            subdiff::write_csv(out_path, result.tables.front().table);
            for (std::size_t i = 1; i < result.tables.size(); ++i) {
                subdiff::write_csv(companion(out_path, result.tables[i].name), result.tables[i].table);
            }
        }
        for (const auto& r : result.failures) emit(r);
        return result.exit_code == 0 ? 0 : kVerificationFailure;
    } catch (const subdiff::ConfigError& e) {
        return fail(kConfigError, "config", "valid config", e.what());
    } catch (const subdiff::RecordedFailure& e) {
        emit(e.record());
        return kRuntimeError;
    } catch (const std::exception& e) {
        return fail(kRuntimeError, "runtime", "successful run", e.what());
    }
}

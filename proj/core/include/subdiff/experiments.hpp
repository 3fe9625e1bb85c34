#pragma once

#include "subdiff/config.hpp"
#include "subdiff/csv.hpp"
#include "subdiff/errors.hpp"

#include <functional>
#include <string>
#include <vector>

namespace subdiff {

struct CommandResult {
    /// 0 success, 1 a check inside the command failed.
    int exit_code = 0;
    /// tables.front() is the primary output; the rest are companions.
    std::vector<NamedTable> tables;
    /// key=value lines for the console.
    std::vector<std::string> summary;
    std::vector<FailureRecord> failures;
};

/// Worker count for scans: SUBDIFF_THREADS when set (positive integer),
/// otherwise the hardware concurrency. Throws ConfigError on a malformed value.
int scan_threads();

/// Calls fn(0..count-1) on up to `threads` workers; results keep index order.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/**
 * Runs one command. Config, domain and solver errors propagate as
 * exceptions; failed checks are reported through exit_code and failures.
 * progress, when set, receives one line per finished unit of work.
 */
CommandResult run_command(const ExperimentConfig& config,
                          const std::function<void(const std::string&)>& progress = {});

} // namespace subdiff

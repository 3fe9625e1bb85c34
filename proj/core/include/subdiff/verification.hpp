#pragma once

#include "subdiff/csv.hpp"
#include "subdiff/errors.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace subdiff {

inline constexpr int kCriterionCount = 16;

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string expected;
    std::string got;
    std::string tolerance;
    /// Free-form context, e.g. numbers from a comparison scheme.
    std::string detail;
    std::vector<NamedTable> artifacts;
};

struct SuiteOptions {
    /// Seed for every randomly generated field in the suite.
    std::uint64_t seed = 42;
};

std::string_view criterion_title(int id);

/// Runs one acceptance criterion, 1..kCriterionCount. Criterion 16 runs
/// criteria 1..15 twice and compares their rendered CSV bytes.
CriterionResult run_criterion(int id, const SuiteOptions& options = {});

/**
 * Runs every criterion in order. The determinism criterion reuses the
 * artifacts of the first pass, so the suite costs two passes, not three.
 * on_result is called as each criterion finishes.
 */
std::vector<CriterionResult> run_suite(const SuiteOptions& options = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

FailureRecord failure_record(const CriterionResult& result);

/// One row per criterion: id,title,passed,expected,got,tolerance.
CsvTable criteria_table(const std::vector<CriterionResult>& results);

} // namespace subdiff

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace subdiff {

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;
};

/// A table with a short file-name-safe label.
struct NamedTable {
    std::string name;
    CsvTable table;
};

/**
 * The one float formatter used for every artifact: scientific notation with
 * 17 significant digits ("%.16e"), so 0.5 is written 5.0000000000000000e-01.
 * Infinities are written inf / -inf. NaN is refused.
 */
std::string format_double(double value);

/// Renders header and rows with '\n' line endings. Throws RecordedFailure on
/// NaN or ragged rows, std::invalid_argument on cells that would need quoting.
std::string render_csv(const CsvTable& table);

/// render_csv to a file; I/O errors surface as std::runtime_error with the OS message.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

} // namespace subdiff

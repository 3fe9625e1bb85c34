#include "subdiff/csv.hpp"

#include "subdiff/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace subdiff {

namespace {

void check_text(const std::string& text) {
    if (text.find_first_of(",\"\n\r") != std::string::npos) {
        throw std::invalid_argument("csv: cell needs quoting: " + text);
    }
}

} // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        throw RecordedFailure({"csv.nan", "finite value", "nan", "0"});
    }
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        check_text(table.header[i]);
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size()) {
            throw RecordedFailure({"csv.shape", std::to_string(table.header.size()) + " columns",
                                   std::to_string(row.size()) + " columns in row " + std::to_string(r), "0"});
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            if (const auto* d = std::get_if<double>(&row[c])) {
                if (std::isnan(*d)) {
                    throw RecordedFailure({"csv.nan", "finite value",
                                           "nan at row " + std::to_string(r) + " column " + table.header[c],
                                           "0"});
                }
                out += format_double(*d);
            } else if (const auto* i = std::get_if<std::int64_t>(&row[c])) {
                out += std::to_string(*i);
            } else {
                const auto& s = std::get<std::string>(row[c]);
                check_text(s);
                out += s;
            }
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    const std::string text = render_csv(table);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.close();
    if (!os) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
}

} // namespace subdiff

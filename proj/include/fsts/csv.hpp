#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fsts/errors.hpp"
#include "fsts/text.hpp"
#include "fsts/time_series.hpp"
#include "fsts/timestamp.hpp"

namespace fsts {
namespace detail {

inline bool is_missing_cell(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return true;
    if (cell.size() == 3) {
        auto lower = [](char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c); };
        return lower(cell[0]) == 'n' && lower(cell[1]) == 'a' && lower(cell[2]) == 'n';
    }
    return false;
}

inline std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && s[0] == '\xEF' && s[1] == '\xBB' && s[2] == '\xBF') return s.substr(3);
    return s;
}

} // namespace detail

/// Reads a time-series table: UTF-8, header row, first column `timestamp`
/// (ISO 8601), one series per remaining column. Empty cells and the literal
/// `NaN` mark missing values. Rows must be strictly increasing in time; the
/// step is inferred as the modal inter-row spacing and absent rows inside
/// [first, last] become masked entries.
inline std::vector<time_series> parse_csv(std::istream& in,
                                          std::string_view source = "<stream>") {
    std::string src(source);
    std::string line;
    if (!std::getline(in, line))
        throw malformed_input(src + ": empty file");

    std::string_view header = detail::strip_bom(line);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    auto columns = split(header, ',');
    if (trim(columns[0]) != "timestamp")
        throw malformed_input(src + ": first column must be named 'timestamp'");
    if (columns.size() < 2)
        throw malformed_input(src + ": no data columns");

    std::vector<std::string> ids;
    ids.reserve(columns.size() - 1);
    for (std::size_t c = 1; c < columns.size(); ++c) {
        std::string id(trim(columns[c]));
        if (id.empty()) throw malformed_input(src + ": empty column name");
        if (std::find(ids.begin(), ids.end(), id) != ids.end())
            throw malformed_input(src + ": duplicate column name '" + id + "'");
        ids.push_back(std::move(id));
    }
    const std::size_t ncols = ids.size();

    std::vector<std::int64_t> times;
    std::vector<std::vector<double>> cells(ncols); // NaN = missing
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row(line);
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        if (trim(row).empty()) continue;
        auto fields = split(row, ',');
        if (fields.size() != ncols + 1)
            throw malformed_input(src + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(ncols + 1) + " fields, got " +
                                  std::to_string(fields.size()));
        std::int64_t t = parse_iso8601(fields[0]);
        if (!times.empty() && t <= times.back())
            throw malformed_input(src + ":" + std::to_string(line_no) +
                                  ": timestamps not strictly increasing");
        times.push_back(t);
        for (std::size_t c = 0; c < ncols; ++c) {
            if (detail::is_missing_cell(fields[c + 1])) {
                cells[c].push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                double v;
                if (!parse_double(fields[c + 1], v))
                    throw malformed_input(src + ":" + std::to_string(line_no) +
                                          ": cannot parse value '" +
                                          std::string(trim(fields[c + 1])) + "'");
                cells[c].push_back(v);
            }
        }
    }

    if (times.size() < 2)
        throw malformed_input(src + ": need at least two data rows");

    // Modal inter-row spacing; ties break to the smaller spacing.
    std::map<std::int64_t, std::size_t> spacing_counts;
    for (std::size_t i = 1; i < times.size(); ++i)
        ++spacing_counts[times[i] - times[i - 1]];
    std::int64_t step = 0;
    std::size_t best = 0;
    for (const auto& [spacing, count] : spacing_counts) {
        if (count > best) {
            best = count;
            step = spacing;
        }
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        const std::int64_t d = times[i] - times[i - 1];
        if (d % step != 0)
            throw irregular_sampling(src + ": spacing " + std::to_string(d) +
                                     "s at row " + std::to_string(i + 1) +
                                     " is not a multiple of the modal step " +
                                     std::to_string(step) + "s");
    }

    const std::size_t n = static_cast<std::size_t>((times.back() - times.front()) / step) + 1;
    std::vector<time_series> out;
    out.reserve(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
        time_series ts;
        ts.id = ids[c];
        ts.origin = times.front();
        ts.step = step;
        ts.values.assign(n, std::numeric_limits<double>::quiet_NaN());
        ts.missing.assign(n, 1);
        for (std::size_t r = 0; r < times.size(); ++r) {
            const auto idx = static_cast<std::size_t>((times[r] - times.front()) / step);
            if (!std::isnan(cells[c][r])) {
                ts.values[idx] = cells[c][r];
                ts.missing[idx] = 0;
            }
        }
        out.push_back(std::move(ts));
    }
    return out;
}

inline std::vector<time_series> parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw malformed_input("cannot open '" + path.string() + "'");
    return parse_csv(in, path.string());
}

/// Writes series sharing one time grid as a CSV table. Masked entries become
/// empty cells; values use the shortest round-trip decimal form, so
/// parse_csv(write_csv(x)) == x.
inline void write_csv(std::ostream& out, std::span<const time_series> series) {
    if (series.empty()) throw malformed_input("write_csv: no series");
    const auto& first = series.front();
    first.check();
    for (const auto& ts : series) {
        ts.check();
        if (ts.origin != first.origin || ts.step != first.step || ts.size() != first.size())
            throw length_mismatch("write_csv: series '" + ts.id + "' is not on the common grid");
    }
    out << "timestamp";
    for (const auto& ts : series) out << ',' << ts.id;
    out << '\n';
    for (std::size_t i = 0; i < first.size(); ++i) {
        out << format_iso8601(first.timestamp_at(i));
        for (const auto& ts : series) {
            out << ',';
            if (!ts.missing[i]) out << double_to_string(ts.values[i]);
        }
        out << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, std::span<const time_series> series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw malformed_input("cannot write '" + path.string() + "'");
    write_csv(out, series);
}

} // namespace fsts

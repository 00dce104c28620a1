#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "fsts/errors.hpp"
#include "fsts/text.hpp"

namespace fsts {
namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct civil_date {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

inline civil_date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

inline bool is_leap_year(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return table[m - 1];
}

inline bool parse_fixed_digits(std::string_view s, std::size_t& pos, int count, long long& out) {
    if (pos + count > s.size()) return false;
    long long v = 0;
    for (int i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += count;
    out = v;
    return true;
}

} // namespace detail

/// Parses an ISO 8601 timestamp to Unix epoch seconds (UTC).
///
/// Accepted forms: `YYYY-MM-DD`, `YYYY-MM-DD[T ]HH:MM`, `YYYY-MM-DD[T ]HH:MM:SS`,
/// each optionally followed by `Z`, `+HH:MM`, `-HH:MM`, `+HHMM` or `+HH`.
/// A missing zone designator is read as UTC. Throws malformed_input.
inline std::int64_t parse_iso8601(std::string_view text) {
    std::string_view s = trim(text);
    auto fail = [&]() -> std::int64_t {
        throw malformed_input("invalid ISO 8601 timestamp: '" + std::string(text) + "'");
    };

    std::size_t pos = 0;
    long long year, month, day;
    if (!detail::parse_fixed_digits(s, pos, 4, year)) return fail();
    if (pos >= s.size() || s[pos] != '-') return fail();
    ++pos;
    if (!detail::parse_fixed_digits(s, pos, 2, month)) return fail();
    if (pos >= s.size() || s[pos] != '-') return fail();
    ++pos;
    if (!detail::parse_fixed_digits(s, pos, 2, day)) return fail();
    if (month < 1 || month > 12) return fail();
    if (day < 1 || day > detail::days_in_month(year, static_cast<unsigned>(month))) return fail();

    long long hh = 0, mm = 0, ss = 0;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        ++pos;
        if (!detail::parse_fixed_digits(s, pos, 2, hh)) return fail();
        if (pos >= s.size() || s[pos] != ':') return fail();
        ++pos;
        if (!detail::parse_fixed_digits(s, pos, 2, mm)) return fail();
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!detail::parse_fixed_digits(s, pos, 2, ss)) return fail();
        }
        if (hh > 23 || mm > 59 || ss > 59) return fail();
    }

    std::int64_t offset = 0;
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            long long oh = 0, om = 0;
            if (!detail::parse_fixed_digits(s, pos, 2, oh)) return fail();
            if (pos < s.size() && s[pos] == ':') {
                ++pos;
                if (!detail::parse_fixed_digits(s, pos, 2, om)) return fail();
            } else if (pos + 2 <= s.size()) {
                if (!detail::parse_fixed_digits(s, pos, 2, om)) return fail();
            }
            if (oh > 23 || om > 59) return fail();
            offset = (oh * 3600 + om * 60) * (c == '+' ? 1 : -1);
        } else {
            return fail();
        }
    }
    if (pos != s.size()) return fail();

    std::int64_t days = detail::days_from_civil(year, static_cast<unsigned>(month),
                                                static_cast<unsigned>(day));
    return days * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

/// Formats Unix epoch seconds as `YYYY-MM-DDTHH:MM:SSZ`.
inline std::string format_iso8601(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    auto date = detail::civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(date.year), date.month, date.day,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

} // namespace fsts

#include "volstat/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "volstat/errors.hpp"

namespace volstat {

namespace {

bool is_leap(int year) noexcept {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) noexcept {
    static constexpr std::array<int, 13> kDays = {0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[static_cast<std::size_t>(month)];
}

bool parse_int_field(std::string_view text, int& out) noexcept {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

bool is_valid_date(int year, int month, int day) noexcept {
    if (year < 1800 || year > 3000) return false;
    if (month < 1 || month > 12) return false;
    if (day < 1 || day > days_in_month(year, month)) return false;
    return true;
}

TradingDate::TradingDate(int y, int m, int d)
    : year(static_cast<std::int16_t>(y)), month(static_cast<std::int8_t>(m)), day(static_cast<std::int8_t>(d)) {
    if (!is_valid_date(y, m, d)) {
        throw Error(errc::malformed_row,
                    "invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) + "-" + std::to_string(d));
    }
}

std::string TradingDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(year), static_cast<int>(month),
                  static_cast<int>(day));
    return buf;
}

std::optional<TradingDate> parse_date(std::string_view text, DateFormat format) noexcept {
    int y = 0;
    int m = 0;
    int d = 0;
    const char sep = format == DateFormat::iso ? '-' : '/';
    const auto p1 = text.find(sep);
    if (p1 == std::string_view::npos) return std::nullopt;
    const auto p2 = text.find(sep, p1 + 1);
    if (p2 == std::string_view::npos || text.find(sep, p2 + 1) != std::string_view::npos) return std::nullopt;

    const std::string_view a = text.substr(0, p1);
    const std::string_view b = text.substr(p1 + 1, p2 - p1 - 1);
    const std::string_view c = text.substr(p2 + 1);

    if (format == DateFormat::iso) {
        if (!parse_int_field(a, y) || !parse_int_field(b, m) || !parse_int_field(c, d)) return std::nullopt;
    } else {
        if (!parse_int_field(a, m) || !parse_int_field(b, d) || !parse_int_field(c, y)) return std::nullopt;
    }
    if (!is_valid_date(y, m, d)) return std::nullopt;
    TradingDate result;
    result.year = static_cast<std::int16_t>(y);
    result.month = static_cast<std::int8_t>(m);
    result.day = static_cast<std::int8_t>(d);
    return result;
}

} // namespace volstat

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace volstat {

// Calendar date of a trading-day observation. Validated on construction,
// totally ordered by calendar order.
struct TradingDate {
    std::int16_t year = 1970;
    std::int8_t month = 1; // 1-12
    std::int8_t day = 1;   // 1-31, valid for the month

    TradingDate() = default;
    TradingDate(int y, int m, int d);

    auto operator<=>(const TradingDate&) const = default;

    std::string to_string() const; // YYYY-MM-DD
};

bool is_valid_date(int year, int month, int day) noexcept;

enum class DateFormat {
    iso, // YYYY-MM-DD
    us,  // M/D/YYYY
};

// Returns nullopt on any syntactic or calendar violation.
std::optional<TradingDate> parse_date(std::string_view text, DateFormat format) noexcept;

} // namespace volstat

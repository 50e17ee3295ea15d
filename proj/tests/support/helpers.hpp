#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "volstat/dates.hpp"
#include "volstat/market_data.hpp"

namespace testutil {

// Directory holding the public historic CSVs, when present. Tests that need
// them skip (with a warning) when this returns nullopt.
inline std::optional<std::filesystem::path> historic_data_dir() {
    if (const char* env = std::getenv("VOLSTAT_DATA_DIR")) {
        std::filesystem::path p(env);
        if (std::filesystem::exists(p / "sp500.csv")) return p;
    }
    std::filesystem::path repo = VOLSTAT_SOURCE_DIR;
    if (std::filesystem::exists(repo / "data" / "historic" / "sp500.csv")) return repo / "data" / "historic";
    return std::nullopt;
}

inline volstat::TradingDate day_after(volstat::TradingDate d) {
    // Trading-calendar realism is irrelevant for synthetic tests; just step
    // through valid calendar dates.
    if (volstat::is_valid_date(d.year, d.month, d.day + 1)) return volstat::TradingDate(d.year, d.month, d.day + 1);
    if (d.month < 12) return volstat::TradingDate(d.year, d.month + 1, 1);
    return volstat::TradingDate(d.year + 1, 1, 1);
}

inline std::vector<volstat::TradingDate> consecutive_dates(std::size_t count,
                                                           volstat::TradingDate start = volstat::TradingDate(1990, 1, 2)) {
    std::vector<volstat::TradingDate> dates;
    dates.reserve(count);
    volstat::TradingDate d = start;
    for (std::size_t i = 0; i < count; ++i) {
        dates.push_back(d);
        d = day_after(d);
    }
    return dates;
}

inline volstat::PriceSeries random_walk_prices(std::size_t count, unsigned seed, double daily_vol = 0.01) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, daily_vol);
    std::vector<double> closes;
    closes.reserve(count);
    double level = 100.0;
    for (std::size_t i = 0; i < count; ++i) {
        closes.push_back(level);
        level *= std::exp(normal(rng));
    }
    return volstat::PriceSeries(consecutive_dates(count), std::move(closes));
}

} // namespace testutil

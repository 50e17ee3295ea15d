#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "volstat/market_data.hpp"
#include "volstat/sv_models.hpp"

namespace testutil {

// A coherent synthetic market: prices driven by a mean-reverting stochastic
// variance, and a forward-looking volatility index built from the variance
// the price path will actually realize, times lognormal noise. Gives the
// whole ingestion -> pairing -> fitting pipeline realistic food without any
// real data.
struct SyntheticMarket {
    volstat::PriceSeries prices;
    volstat::IndexSeries index;
};

inline SyntheticMarket make_synthetic_market(std::size_t days, std::uint64_t seed, double index_noise_sd = 0.25) {
    volstat::SVParams params{1.0e-4, 0.041, 0.25, volstat::SVModel::multiplicative};
    const auto path = volstat::simulate(params, params.theta, 1.0, days + 30, seed);

    std::mt19937_64 rng(volstat::derive_seed(seed, 77));
    std::normal_distribution<double> z(0.0, 1.0);

    std::vector<double> closes(days);
    std::vector<double> levels(days);
    double level = 100.0;
    const double annualize = 1e4 * 365.0 / 30.0; // index-style percent^2 per annum
    for (std::size_t i = 0; i < days; ++i) {
        closes[i] = level;
        level *= std::exp(std::sqrt(path.values[i]) * z(rng));
        double expected = 0.0;
        for (std::size_t j = i; j < i + 21; ++j) expected += path.values[j];
        expected /= 21.0 / (30.0 / 21.0); // calendar-day flavoured horizon
        levels[i] = std::sqrt(annualize * expected / 21.0 * std::exp(index_noise_sd * z(rng)));
    }
    const auto dates = consecutive_dates(days);
    return {volstat::PriceSeries(dates, std::move(closes)),
            volstat::IndexSeries(dates, std::move(levels), volstat::IndexKind::vix)};
}

inline void write_price_csv(const std::filesystem::path& file, const volstat::PriceSeries& prices) {
    std::ofstream out(file);
    volstat::serialize_price_csv(prices, out);
}

inline void write_index_csv(const std::filesystem::path& file, const volstat::IndexSeries& index) {
    std::ofstream out(file);
    out << "date,close\n";
    char buf[32];
    for (std::size_t i = 0; i < index.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10f", index.levels()[i]);
        out << index.dates()[i].to_string() << ',' << buf << '\n';
    }
}

inline std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testutil

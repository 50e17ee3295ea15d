#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "volstat/dates.hpp"
#include "volstat/market_data.hpp"

namespace volstat {

// Daily log returns, dated by the later of the two price days.
class ReturnSeries {
public:
    ReturnSeries() = default;
    ReturnSeries(std::vector<TradingDate> dates, std::vector<double> returns);

    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<TradingDate> dates_;
    std::vector<double> values_;
};

// Annualized variance observations in (index points)^2, i.e. percent^2 per
// annum. window_n = 0 marks a series that was not produced by windowed
// returns (squared index levels, daily proxies). `annualization` records the
// periods-per-year factor the producer applied (1 when the input was already
// annual or the values are deliberately left raw).
class VarianceSeries {
public:
    VarianceSeries() = default;
    VarianceSeries(std::vector<TradingDate> dates, std::vector<double> values, int window_n, double annualization);

    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    const std::vector<double>& values() const noexcept { return values_; }
    int window_n() const noexcept { return window_n_; }
    bool windowed() const noexcept { return window_n_ > 0; }
    double annualization() const noexcept { return annualization_; }

private:
    std::vector<TradingDate> dates_;
    std::vector<double> values_;
    int window_n_ = 0;
    double annualization_ = 1.0;
};

struct ScalingReport {
    double numerator_mean = 0.0;
    double denominator_mean = 0.0;
    double ratio = 0.0;
    TradingDate period_start;
    TradingDate period_end;
    std::size_t observations = 0;
};

struct DateRange {
    TradingDate start;
    TradingDate end;

    bool contains(const TradingDate& d) const noexcept { return start <= d && d <= end; }
};

// r_i = ln(S_i / S_{i-1}); needs at least two prices.
ReturnSeries log_returns(const PriceSeries& prices);

// Annualized realized variance over consecutive non-overlapping n-return
// windows: 100^2 * (days_per_year / n) * sum of squared returns, dated by
// each window's last day.
VarianceSeries realized_variance(const ReturnSeries& returns, int n, double trading_days_per_year = 252.0);

// Element-wise square of index levels (already annual, window-free).
VarianceSeries squared_index(const IndexSeries& index);

// Ratio of arithmetic means over the date intersection restricted to the
// period. Errors: EmptyOverlap, ZeroDenominatorMean.
ScalingReport mean_ratio(const VarianceSeries& numer, const VarianceSeries& denom, const DateRange& period);
ScalingReport mean_ratio(const VarianceSeries& numer, const VarianceSeries& denom);

VarianceSeries scale_series(const VarianceSeries& series, double ratio);

// Per-window mean squared return (1/n) * sum r_i^2 over non-overlapping
// consecutive windows; raw, not annualized.
std::vector<double> mean_squared_return_samples(const ReturnSeries& returns, int n);

struct VarianceVsN {
    std::vector<int> n_values;
    std::vector<double> variances; // unbiased sample variance per n
    double slope = 0.0;            // OLS slope of ln(variance) vs ln(n)
    std::vector<int> excluded;     // n values dropped from the fit (zero variance)
};

VarianceVsN variance_vs_n(const ReturnSeries& returns, const std::vector<int>& n_values);

enum class Alignment { concurrent, preceding };

const char* alignment_name(Alignment a) noexcept;

// One index observation paired with one realized-variance window. The index
// is sampled on the trading day immediately before a window starts;
// `concurrent` pairs it with the window it precedes (what the index
// forecasts), `preceding` with the window that just ended.
struct WindowPairs {
    std::vector<TradingDate> dates; // index observation dates
    std::vector<double> index_sq;
    std::vector<double> rv;
    int window_n = 0;
    Alignment alignment = Alignment::concurrent;

    std::size_t size() const noexcept { return dates.size(); }
};

// `panel` must contain a close column and an index-level column on a common
// date grid; returns are computed between consecutive panel dates.
WindowPairs pair_windows(const AlignedPanel& panel, const std::string& close_column,
                         const std::string& level_column, int n, Alignment alignment,
                         double trading_days_per_year = 252.0);

// rv / index^2 (realized over implied) or its inverse, per pair.
std::vector<double> ratio_sample(const WindowPairs& pairs, bool implied_over_realized);

} // namespace volstat

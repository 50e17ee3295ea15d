#include "volstat/realized_vol.hpp"

#include <algorithm>
#include <cmath>

#include "volstat/stats_util.hpp"

namespace volstat {

namespace {

void check_finite(const std::vector<double>& values, errc code, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(code, std::string(what) + " not finite");
    }
}

} // namespace

ReturnSeries::ReturnSeries(std::vector<TradingDate> dates, std::vector<double> returns)
    : dates_(std::move(dates)), values_(std::move(returns)) {
    if (dates_.size() != values_.size()) throw Error(errc::bad_config, "dates/returns length mismatch");
    check_finite(values_, errc::bad_config, "return");
}

VarianceSeries::VarianceSeries(std::vector<TradingDate> dates, std::vector<double> values, int window_n,
                               double annualization)
    : dates_(std::move(dates)), values_(std::move(values)), window_n_(window_n), annualization_(annualization) {
    if (dates_.size() != values_.size()) throw Error(errc::bad_config, "dates/values length mismatch");
    if (window_n_ < 0) throw Error(errc::bad_config, "window_n must be >= 0");
    if (!(annualization_ > 0.0)) throw Error(errc::bad_config, "annualization must be positive");
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(errc::bad_config, "variance values must be finite and >= 0");
    }
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) throw Error(errc::too_short, "log returns need at least two prices");
    std::vector<TradingDate> dates(prices.dates().begin() + 1, prices.dates().end());
    std::vector<double> values(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        values[i - 1] = std::log(prices.closes()[i] / prices.closes()[i - 1]);
    }
    return ReturnSeries(std::move(dates), std::move(values));
}

VarianceSeries realized_variance(const ReturnSeries& returns, int n, double trading_days_per_year) {
    if (n < 1) throw Error(errc::bad_config, "window length must be >= 1");
    if (returns.size() < static_cast<std::size_t>(n)) {
        throw Error(errc::too_short, "need at least " + std::to_string(n) + " returns");
    }
    const std::size_t windows = returns.size() / static_cast<std::size_t>(n);
    std::vector<TradingDate> dates;
    std::vector<double> values;
    dates.reserve(windows);
    values.reserve(windows);
    const double factor = 1e4 * trading_days_per_year / static_cast<double>(n);
    for (std::size_t w = 0; w < windows; ++w) {
        const std::size_t begin = w * static_cast<std::size_t>(n);
        double acc = 0.0;
        for (std::size_t i = begin; i < begin + static_cast<std::size_t>(n); ++i) {
            acc += returns.values()[i] * returns.values()[i];
        }
        dates.push_back(returns.dates()[begin + static_cast<std::size_t>(n) - 1]);
        values.push_back(factor * acc);
    }
    return VarianceSeries(std::move(dates), std::move(values), n, trading_days_per_year);
}

VarianceSeries squared_index(const IndexSeries& index) {
    std::vector<double> values(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) values[i] = index.levels()[i] * index.levels()[i];
    return VarianceSeries(index.dates(), std::move(values), 0, 1.0);
}

namespace {

ScalingReport mean_ratio_impl(const VarianceSeries& numer, const VarianceSeries& denom, const DateRange* period) {
    std::vector<double> num_values;
    std::vector<double> den_values;
    TradingDate first{};
    TradingDate last{};
    std::size_t j = 0;
    for (std::size_t i = 0; i < numer.size(); ++i) {
        const TradingDate& d = numer.dates()[i];
        if (period && !period->contains(d)) continue;
        while (j < denom.size() && denom.dates()[j] < d) ++j;
        if (j == denom.size()) break;
        if (denom.dates()[j] != d) continue;
        if (num_values.empty()) first = d;
        last = d;
        num_values.push_back(numer.values()[i]);
        den_values.push_back(denom.values()[j]);
    }
    if (num_values.empty()) throw Error(errc::empty_overlap, "no common dates in period");
    const double num_mean = mean(num_values);
    const double den_mean = mean(den_values);
    if (den_mean == 0.0) throw Error(errc::zero_denominator_mean, "denominator mean is zero");
    return {num_mean, den_mean, num_mean / den_mean, first, last, num_values.size()};
}

} // namespace

ScalingReport mean_ratio(const VarianceSeries& numer, const VarianceSeries& denom, const DateRange& period) {
    return mean_ratio_impl(numer, denom, &period);
}

ScalingReport mean_ratio(const VarianceSeries& numer, const VarianceSeries& denom) {
    return mean_ratio_impl(numer, denom, nullptr);
}

VarianceSeries scale_series(const VarianceSeries& series, double ratio) {
    if (!(ratio > 0.0)) throw Error(errc::non_positive_ratio, "scale ratio must be positive");
    std::vector<double> values(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) values[i] = series.values()[i] * ratio;
    return VarianceSeries(series.dates(), std::move(values), series.window_n(), series.annualization());
}

std::vector<double> mean_squared_return_samples(const ReturnSeries& returns, int n) {
    if (n < 1) throw Error(errc::bad_config, "window length must be >= 1");
    if (returns.size() < static_cast<std::size_t>(n)) {
        throw Error(errc::too_short, "need at least " + std::to_string(n) + " returns");
    }
    const std::size_t windows = returns.size() / static_cast<std::size_t>(n);
    std::vector<double> samples;
    samples.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w) {
        const std::size_t begin = w * static_cast<std::size_t>(n);
        double acc = 0.0;
        for (std::size_t i = begin; i < begin + static_cast<std::size_t>(n); ++i) {
            acc += returns.values()[i] * returns.values()[i];
        }
        samples.push_back(acc / static_cast<double>(n));
    }
    return samples;
}

VarianceVsN variance_vs_n(const ReturnSeries& returns, const std::vector<int>& n_values) {
    if (n_values.empty()) throw Error(errc::bad_config, "need at least one window length");
    VarianceVsN result;
    std::vector<double> log_n;
    std::vector<double> log_var;
    for (int n : n_values) {
        const auto samples = mean_squared_return_samples(returns, n);
        if (samples.size() < 2) throw Error(errc::too_short, "fewer than two windows for n=" + std::to_string(n));
        const double var = sample_variance(samples);
        result.n_values.push_back(n);
        result.variances.push_back(var);
        if (var > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_var.push_back(std::log(var));
        } else {
            result.excluded.push_back(n);
        }
    }
    if (log_n.size() < 2) throw Error(errc::slope_undefined, "fewer than two positive-variance points");
    result.slope = ols_fit(log_n, log_var).slope;
    return result;
}

const char* alignment_name(Alignment a) noexcept {
    return a == Alignment::concurrent ? "concurrent" : "preceding";
}

WindowPairs pair_windows(const AlignedPanel& panel, const std::string& close_column, const std::string& level_column,
                         int n, Alignment alignment, double trading_days_per_year) {
    if (n < 1) throw Error(errc::bad_config, "window length must be >= 1");
    const auto& closes = panel.column(close_column);
    const auto& levels = panel.column(level_column);
    const std::size_t m = panel.rows();
    if (m < static_cast<std::size_t>(n) + 1) throw Error(errc::too_short, "panel shorter than one window");

    // Returns r_j live between panel dates j-1 and j. Window b covers returns
    // (b*n, b*n + n]; the index is observed on panel date b*n, the day before
    // the window opens.
    const std::size_t returns_count = m - 1;
    const std::size_t windows = returns_count / static_cast<std::size_t>(n);
    const double factor = 1e4 * trading_days_per_year / static_cast<double>(n);

    std::vector<double> window_rv(windows);
    for (std::size_t b = 0; b < windows; ++b) {
        double acc = 0.0;
        for (std::size_t j = b * static_cast<std::size_t>(n) + 1; j <= (b + 1) * static_cast<std::size_t>(n); ++j) {
            const double r = std::log(closes[j] / closes[j - 1]);
            acc += r * r;
        }
        window_rv[b] = factor * acc;
    }

    WindowPairs pairs;
    pairs.window_n = n;
    pairs.alignment = alignment;
    for (std::size_t b = 0; b < windows; ++b) {
        const std::size_t obs = b * static_cast<std::size_t>(n); // index observation row
        if (alignment == Alignment::concurrent) {
            pairs.dates.push_back(panel.dates()[obs]);
            pairs.index_sq.push_back(levels[obs] * levels[obs]);
            pairs.rv.push_back(window_rv[b]);
        } else if (b >= 1) {
            pairs.dates.push_back(panel.dates()[obs]);
            pairs.index_sq.push_back(levels[obs] * levels[obs]);
            pairs.rv.push_back(window_rv[b - 1]);
        }
    }
    if (pairs.dates.empty()) throw Error(errc::empty_overlap, "no complete windows to pair");
    return pairs;
}

std::vector<double> ratio_sample(const WindowPairs& pairs, bool implied_over_realized) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double num = implied_over_realized ? pairs.index_sq[i] : pairs.rv[i];
        const double den = implied_over_realized ? pairs.rv[i] : pairs.index_sq[i];
        if (den == 0.0) throw Error(errc::zero_denominator_mean, "zero denominator in ratio at " + pairs.dates[i].to_string());
        out.push_back(num / den);
    }
    return out;
}

} // namespace volstat

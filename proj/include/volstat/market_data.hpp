#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "volstat/dates.hpp"
#include "volstat/errors.hpp"

namespace volstat {

// Dated closing prices, strictly increasing dates, strictly positive closes.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::vector<TradingDate> dates, std::vector<double> closes);

    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    const std::vector<double>& closes() const noexcept { return closes_; }

    bool operator==(const PriceSeries&) const = default;

private:
    std::vector<TradingDate> dates_;
    std::vector<double> closes_;
};

enum class IndexKind { vix, vxo, other };

const char* index_kind_name(IndexKind kind) noexcept;

// Dated volatility-index levels (percent vol points), non-negative.
class IndexSeries {
public:
    IndexSeries() = default;
    IndexSeries(std::vector<TradingDate> dates, std::vector<double> levels, IndexKind kind);

    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    IndexKind kind() const noexcept { return kind_; }

private:
    std::vector<TradingDate> dates_;
    std::vector<double> levels_;
    IndexKind kind_ = IndexKind::other;
};

// Inner join of several dated series on their common dates.
class AlignedPanel {
public:
    AlignedPanel() = default;
    AlignedPanel(std::vector<TradingDate> dates, std::vector<std::pair<std::string, std::vector<double>>> columns);

    std::size_t rows() const noexcept { return dates_.size(); }
    const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    const std::vector<std::pair<std::string, std::vector<double>>>& columns() const noexcept { return columns_; }
    const std::vector<double>& column(std::string_view name) const;

    bool operator==(const AlignedPanel&) const = default;

private:
    std::vector<TradingDate> dates_;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

struct NamedSeries {
    std::string name;
    std::vector<TradingDate> dates;
    std::vector<double> values;
};

AlignedPanel align(const std::vector<NamedSeries>& series);

// How to read one delimited file: which columns hold the date and the value,
// how dates are written, and the field delimiter (0 = sniff comma/tab from
// the header line). Header matching is case-insensitive.
struct ColumnMapping {
    std::string date_column = "date";
    std::string value_column = "close";
    DateFormat date_format = DateFormat::iso;
    char delimiter = '\0';
};

// One rejected input row and why.
struct RowError {
    std::size_t line; // 1-based line number in the input
    errc code;
    std::string detail;
};

template <class Series>
struct ParseResult {
    Series series;
    std::vector<RowError> rejects;
    std::size_t data_rows = 0; // rows seen after the header

    bool clean() const noexcept { return rejects.empty(); }
};

// Parsing is total: every data row either lands in the series or in
// `rejects` with a specific error; rows are sorted by date afterwards.
// Throws Error(empty_input) when no row is accepted.
ParseResult<PriceSeries> parse_price_csv(std::istream& input, const ColumnMapping& mapping);
ParseResult<IndexSeries> parse_index_csv(std::istream& input, IndexKind kind, const ColumnMapping& mapping);

ParseResult<PriceSeries> parse_price_file(const std::string& path, const ColumnMapping& mapping);
ParseResult<IndexSeries> parse_index_file(const std::string& path, IndexKind kind, const ColumnMapping& mapping);

// Writes "date,close" rows; values round-trip exactly through parse_price_csv.
void serialize_price_csv(const PriceSeries& series, std::ostream& out);

} // namespace volstat

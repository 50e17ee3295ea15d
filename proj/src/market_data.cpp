#include "volstat/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace volstat {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

bool parse_double_field(std::string_view text, double& out) noexcept {
    text = trim(text);
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

void check_strictly_increasing(const std::vector<TradingDate>& dates) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw Error(errc::duplicate_date, "dates not strictly increasing at " + dates[i].to_string());
        }
    }
}

struct RawRow {
    TradingDate date;
    double value;
    std::size_t line;
};

// Shared scaffolding for the two CSV readers: resolves the header, splits
// rows, applies a per-row validator, sorts by date and rejects duplicates
// (first occurrence in file order wins).
template <class Validate>
std::pair<std::vector<RawRow>, std::vector<RowError>> read_rows(std::istream& input, const ColumnMapping& mapping,
                                                                Validate validate, std::size_t& data_rows) {
    std::string header_line;
    if (!std::getline(input, header_line)) throw Error(errc::empty_input, "no header row");

    char delim = mapping.delimiter;
    if (delim == '\0') delim = header_line.find('\t') != std::string::npos ? '\t' : ',';

    const auto header = split(header_line, delim);
    std::ptrdiff_t date_col = -1;
    std::ptrdiff_t value_col = -1;
    const std::string want_date = to_lower(mapping.date_column);
    const std::string want_value = to_lower(mapping.value_column);
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = to_lower(trim(header[i]));
        if (name == want_date && date_col < 0) date_col = static_cast<std::ptrdiff_t>(i);
        if (name == want_value && value_col < 0) value_col = static_cast<std::ptrdiff_t>(i);
    }
    if (date_col < 0) throw Error(errc::bad_config, "date column '" + mapping.date_column + "' not in header");
    if (value_col < 0) throw Error(errc::bad_config, "value column '" + mapping.value_column + "' not in header");

    std::vector<RawRow> rows;
    std::vector<RowError> rejects;
    std::string line;
    std::size_t line_no = 1;
    data_rows = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++data_rows;
        const auto fields = split(line, delim);
        const auto need = static_cast<std::size_t>(std::max(date_col, value_col));
        if (fields.size() <= need) {
            rejects.push_back({line_no, errc::malformed_row, "expected at least " + std::to_string(need + 1) + " fields"});
            continue;
        }
        const auto date = parse_date(trim(fields[static_cast<std::size_t>(date_col)]), mapping.date_format);
        if (!date) {
            rejects.push_back({line_no, errc::malformed_row,
                               "unparsable date '" + std::string(trim(fields[static_cast<std::size_t>(date_col)])) + "'"});
            continue;
        }
        double value = 0.0;
        if (!parse_double_field(fields[static_cast<std::size_t>(value_col)], value)) {
            rejects.push_back({line_no, errc::malformed_row,
                               "unparsable value '" + std::string(trim(fields[static_cast<std::size_t>(value_col)])) + "'"});
            continue;
        }
        if (auto code = validate(value)) {
            rejects.push_back({line_no, *code, "value " + std::to_string(value) + " on " + date->to_string()});
            continue;
        }
        rows.push_back({*date, value, line_no});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.line < b.line;
    });
    std::vector<RawRow> unique;
    unique.reserve(rows.size());
    for (const auto& row : rows) {
        if (!unique.empty() && unique.back().date == row.date) {
            rejects.push_back({row.line, errc::duplicate_date, row.date.to_string()});
            continue;
        }
        unique.push_back(row);
    }
    std::sort(rejects.begin(), rejects.end(), [](const RowError& a, const RowError& b) { return a.line < b.line; });
    return {std::move(unique), std::move(rejects)};
}

} // namespace

PriceSeries::PriceSeries(std::vector<TradingDate> dates, std::vector<double> closes)
    : dates_(std::move(dates)), closes_(std::move(closes)) {
    if (dates_.size() != closes_.size()) throw Error(errc::bad_config, "dates/closes length mismatch");
    check_strictly_increasing(dates_);
    for (std::size_t i = 0; i < closes_.size(); ++i) {
        if (!(closes_[i] > 0.0) || !std::isfinite(closes_[i])) {
            throw Error(errc::non_positive_price, "close " + std::to_string(closes_[i]) + " on " + dates_[i].to_string());
        }
    }
}

const char* index_kind_name(IndexKind kind) noexcept {
    switch (kind) {
        case IndexKind::vix: return "vix";
        case IndexKind::vxo: return "vxo";
        case IndexKind::other: return "other";
    }
    return "other";
}

IndexSeries::IndexSeries(std::vector<TradingDate> dates, std::vector<double> levels, IndexKind kind)
    : dates_(std::move(dates)), levels_(std::move(levels)), kind_(kind) {
    if (dates_.size() != levels_.size()) throw Error(errc::bad_config, "dates/levels length mismatch");
    check_strictly_increasing(dates_);
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i] < 0.0 || !std::isfinite(levels_[i])) {
            throw Error(errc::negative_level, "level " + std::to_string(levels_[i]) + " on " + dates_[i].to_string());
        }
    }
}

AlignedPanel::AlignedPanel(std::vector<TradingDate> dates,
                           std::vector<std::pair<std::string, std::vector<double>>> columns)
    : dates_(std::move(dates)), columns_(std::move(columns)) {
    check_strictly_increasing(dates_);
    for (const auto& [name, values] : columns_) {
        if (values.size() != dates_.size()) {
            throw Error(errc::bad_config, "column '" + name + "' length mismatch");
        }
    }
}

const std::vector<double>& AlignedPanel::column(std::string_view name) const {
    for (const auto& [col_name, values] : columns_) {
        if (col_name == name) return values;
    }
    throw Error(errc::bad_config, "no column named '" + std::string(name) + "'");
}

AlignedPanel align(const std::vector<NamedSeries>& series) {
    if (series.empty()) throw Error(errc::bad_config, "align needs at least one series");
    for (const auto& s : series) {
        if (s.dates.empty()) throw Error(errc::empty_input, "series '" + s.name + "' is empty");
        if (s.dates.size() != s.values.size()) throw Error(errc::bad_config, "series '" + s.name + "' length mismatch");
    }

    // Intersect on the first series, then filter through the rest.
    std::vector<TradingDate> common = series.front().dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<TradingDate> next;
        std::set_intersection(common.begin(), common.end(), series[k].dates.begin(), series[k].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) throw Error(errc::empty_intersection, "no dates shared by all series");

    std::vector<std::pair<std::string, std::vector<double>>> columns;
    columns.reserve(series.size());
    for (const auto& s : series) {
        std::vector<double> values;
        values.reserve(common.size());
        std::size_t j = 0;
        for (const auto& date : common) {
            while (s.dates[j] < date) ++j;
            values.push_back(s.values[j]);
        }
        columns.emplace_back(s.name, std::move(values));
    }
    return AlignedPanel(std::move(common), std::move(columns));
}

ParseResult<PriceSeries> parse_price_csv(std::istream& input, const ColumnMapping& mapping) {
    std::size_t data_rows = 0;
    auto [rows, rejects] = read_rows(
        input, mapping,
        [](double v) -> std::optional<errc> {
            if (!(v > 0.0)) return errc::non_positive_price;
            return std::nullopt;
        },
        data_rows);
    if (rows.empty()) throw Error(errc::empty_input, "no valid price rows");
    std::vector<TradingDate> dates;
    std::vector<double> closes;
    dates.reserve(rows.size());
    closes.reserve(rows.size());
    for (const auto& row : rows) {
        dates.push_back(row.date);
        closes.push_back(row.value);
    }
    return {PriceSeries(std::move(dates), std::move(closes)), std::move(rejects), data_rows};
}

ParseResult<IndexSeries> parse_index_csv(std::istream& input, IndexKind kind, const ColumnMapping& mapping) {
    std::size_t data_rows = 0;
    auto [rows, rejects] = read_rows(
        input, mapping,
        [](double v) -> std::optional<errc> {
            if (v < 0.0) return errc::negative_level;
            return std::nullopt;
        },
        data_rows);
    if (rows.empty()) throw Error(errc::empty_input, "no valid index rows");
    std::vector<TradingDate> dates;
    std::vector<double> levels;
    dates.reserve(rows.size());
    levels.reserve(rows.size());
    for (const auto& row : rows) {
        dates.push_back(row.date);
        levels.push_back(row.value);
    }
    return {IndexSeries(std::move(dates), std::move(levels), kind), std::move(rejects), data_rows};
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(errc::io_error, "cannot open '" + path + "'");
    return file;
}

} // namespace

ParseResult<PriceSeries> parse_price_file(const std::string& path, const ColumnMapping& mapping) {
    auto file = open_or_throw(path);
    try {
        return parse_price_csv(file, mapping);
    } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " [" + path + "]");
    }
}

ParseResult<IndexSeries> parse_index_file(const std::string& path, IndexKind kind, const ColumnMapping& mapping) {
    auto file = open_or_throw(path);
    try {
        return parse_index_csv(file, kind, mapping);
    } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " [" + path + "]");
    }
}

void serialize_price_csv(const PriceSeries& series, std::ostream& out) {
    out << "date,close\n";
    char buf[32];
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, series.closes()[i]);
        (void)ec;
        out << series.dates()[i].to_string() << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf))
            << '\n';
    }
}

} // namespace volstat

#include "volstat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "volstat/fit.hpp"
#include "volstat/implied_vol.hpp"
#include "volstat/stats_util.hpp"

namespace volstat {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::uint64_t fnv1a64(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(errc::io_error, "cannot open '" + path + "'");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char chunk[4096];
    while (file.read(chunk, sizeof chunk) || file.gcount() > 0) {
        const auto got = static_cast<std::size_t>(file.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!file) break;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

// Accumulates provenance, summary scalars and named tables, then renders the
// whole report as CSV-with-comment-header or versioned JSON.
class ReportWriter {
public:
    ReportWriter(std::string name, OutputFormat format) : name_(std::move(name)), format_(format) {}

    void add_input(const std::string& path) { inputs_.emplace_back(path, hex64(fnv1a64(path))); }
    void add_config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
    void add_note(const std::string& note) { notes_.push_back(note); }
    void add_scalar(const std::string& key, const ordered_json& value) { summary_.emplace_back(key, value); }

    struct Table {
        std::string name;
        std::vector<std::string> columns;
        std::vector<std::vector<ordered_json>> rows;
    };

    Table& table(const std::string& name, std::vector<std::string> columns) {
        tables_.push_back({name, std::move(columns), {}});
        return tables_.back();
    }

    std::string render() const { return format_ == OutputFormat::csv ? render_csv() : render_json(); }

private:
    static std::string cell_text(const ordered_json& cell) {
        if (cell.is_string()) return cell.get<std::string>();
        if (cell.is_number_float()) return fmt(cell.get<double>());
        return cell.dump();
    }

    std::string render_csv() const {
        std::ostringstream out;
        out << "# volstat report=" << name_ << " schema_version=1\n";
        for (const auto& [path, hash] : inputs_) out << "# input: " << path << " fnv1a64=" << hash << "\n";
        for (const auto& [key, value] : config_) out << "# config: " << key << "=" << value << "\n";
        for (const auto& note : notes_) out << "# note: " << note << "\n";
        for (const auto& [key, value] : summary_) out << "# " << key << ": " << cell_text(value) << "\n";
        for (const auto& table : tables_) {
            out << "# table: " << table.name << "\n";
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
            }
            out << "\n";
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    out << cell_text(row[c]) << (c + 1 < row.size() ? "," : "");
                }
                out << "\n";
            }
        }
        return out.str();
    }

    std::string render_json() const {
        ordered_json root;
        root["schema_version"] = 1;
        root["report"] = name_;
        ordered_json prov;
        prov["inputs"] = ordered_json::array();
        for (const auto& [path, hash] : inputs_) prov["inputs"].push_back({{"path", path}, {"fnv1a64", hash}});
        prov["config"] = ordered_json::object();
        for (const auto& [key, value] : config_) prov["config"][key] = value;
        root["provenance"] = prov;
        if (!notes_.empty()) root["notes"] = notes_;
        if (!summary_.empty()) {
            ordered_json summary = ordered_json::object();
            for (const auto& [key, value] : summary_) summary[key] = value;
            root["summary"] = summary;
        }
        ordered_json tables = ordered_json::object();
        for (const auto& table : tables_) {
            ordered_json t;
            t["columns"] = table.columns;
            t["rows"] = ordered_json::array();
            for (const auto& row : table.rows) {
                ordered_json r = ordered_json::array();
                for (const auto& cell : row) r.push_back(cell);
                t["rows"].push_back(r);
            }
            tables[table.name] = t;
        }
        root["tables"] = tables;
        return root.dump(2) + "\n";
    }

    std::string name_;
    OutputFormat format_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::string> notes_;
    std::vector<std::pair<std::string, ordered_json>> summary_;
    std::vector<Table> tables_;
};

std::string resolve_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (path.empty() || fs::exists(path)) return path;
    if (const char* base = std::getenv("VOLSTAT_DATA_DIR")) {
        const fs::path candidate = fs::path(base) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

struct NamedPeriod {
    std::string name;
    DateRange range;
};

// Default sub-period boundaries (methodology change and crisis splits).
std::vector<NamedPeriod> standard_periods() {
    return {
        {"1990-2016", {TradingDate(1990, 1, 2), TradingDate(2016, 12, 30)}},
        {"1990-2003", {TradingDate(1990, 1, 2), TradingDate(2003, 9, 19)}},
        {"2003-2016", {TradingDate(2003, 9, 22), TradingDate(2016, 12, 30)}},
        {"2003-2010", {TradingDate(2003, 9, 22), TradingDate(2010, 8, 30)}},
        {"2010-2016", {TradingDate(2010, 8, 31), TradingDate(2016, 12, 30)}},
    };
}

std::vector<NamedPeriod> periods_for(const RunConfig& config) {
    if (config.from || config.to) {
        const TradingDate lo = config.from.value_or(TradingDate(1800, 1, 1));
        const TradingDate hi = config.to.value_or(TradingDate(3000, 12, 31));
        return {{lo.to_string() + ".." + hi.to_string(), {lo, hi}}};
    }
    return standard_periods();
}

template <class Series>
Series load_checked(ParseResult<Series> parsed, const RunConfig& config, const std::string& path,
                    std::ostream& diagnostics) {
    for (const auto& reject : parsed.rejects) {
        diagnostics << (config.allow_bad_rows ? "warning" : "error") << ": " << path << ":" << reject.line << ": "
                    << errc_name(reject.code) << " (" << reject.detail << ")\n";
    }
    if (!parsed.rejects.empty() && !config.allow_bad_rows) {
        throw Error(parsed.rejects.front().code,
                    path + " has " + std::to_string(parsed.rejects.size()) + " bad rows (--allow-bad-rows to continue)");
    }
    return std::move(parsed.series);
}

PriceSeries load_prices(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    if (config.prices_path.empty()) throw Error(errc::bad_config, "--prices is required for this command");
    const std::string path = resolve_path(config.prices_path);
    writer.add_input(path);
    return load_checked(parse_price_file(path, config.price_mapping), config, path, diagnostics);
}

IndexSeries load_index(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    if (config.index_path.empty()) throw Error(errc::bad_config, "--index is required for this command");
    const std::string path = resolve_path(config.index_path);
    writer.add_input(path);
    return load_checked(parse_index_file(path, config.kind, config.index_mapping), config, path, diagnostics);
}

AlignedPanel price_index_panel(const PriceSeries& prices, const IndexSeries& index) {
    return align({{"close", prices.dates(), prices.closes()}, {"level", index.dates(), index.levels()}});
}

AlignedPanel slice_panel(const AlignedPanel& panel, const DateRange& range) {
    std::vector<TradingDate> dates;
    std::vector<std::vector<double>> values(panel.columns().size());
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        if (!range.contains(panel.dates()[i])) continue;
        dates.push_back(panel.dates()[i]);
        for (std::size_t c = 0; c < panel.columns().size(); ++c) values[c].push_back(panel.columns()[c].second[i]);
    }
    if (dates.empty()) throw Error(errc::empty_overlap, "no panel rows in period");
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    for (std::size_t c = 0; c < panel.columns().size(); ++c) {
        columns.emplace_back(panel.columns()[c].first, std::move(values[c]));
    }
    return AlignedPanel(std::move(dates), std::move(columns));
}

std::vector<Family> families_or_default(const RunConfig& config) {
    if (!config.families.empty()) return config.families;
    return {kCoreFamilies, kCoreFamilies + std::size(kCoreFamilies)};
}

SVParams require_sv_params(const RunConfig& config) {
    if (config.sv) return *config.sv;
    throw Error(errc::bad_config, "model parameters required: --preset or --model with --theta/--gamma/--kappa");
}

double scaling_ratio(const RunConfig& config, const WindowPairs& pairs, ReportWriter& writer) {
    switch (config.scaling) {
        case ScalingMode::theory_365_252:
            return 365.0 / 252.0;
        case ScalingMode::theory_30_21:
            return 30.0 / 21.0;
        case ScalingMode::empirical_mean_ratio: {
            const double ratio = mean(pairs.index_sq) / mean(pairs.rv);
            writer.add_scalar("empirical_mean_ratio", ratio);
            return ratio;
        }
    }
    throw Error(errc::bad_config, "unknown scaling mode");
}

void emit(const RunConfig& config, const ReportWriter& writer) {
    const std::string text = writer.render();
    if (config.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot write '" + config.out_path + "'");
    out << text;
}

void echo_common_config(const RunConfig& config, ReportWriter& writer) {
    writer.add_config("n", std::to_string(config.window_n));
    writer.add_config("alignment", alignment_name(config.alignment));
    writer.add_config("scaling", scaling_mode_name(config.scaling));
    writer.add_config("seed", std::to_string(config.seed));
    writer.add_config("format", config.format == OutputFormat::csv ? "csv" : "json");
    if (config.from) writer.add_config("from", config.from->to_string());
    if (config.to) writer.add_config("to", config.to->to_string());
}

void add_fit_table(ReportWriter& writer, const std::string& name, const FitRanking& ranking) {
    auto& table = writer.table(name, {"family", "label", "p1", "p2", "p3", "ks", "loglik", "n", "moment_matched"});
    for (const auto& fit : ranking.results) {
        std::vector<ordered_json> row;
        row.emplace_back(family_name(fit.family));
        row.emplace_back(family_label(fit.family));
        for (std::size_t i = 0; i < 3; ++i) {
            if (i < fit.params.size()) {
                row.emplace_back(fit.params[i]);
            } else {
                row.emplace_back("");
            }
        }
        row.emplace_back(fit.ks);
        row.emplace_back(fit.log_likelihood);
        row.emplace_back(static_cast<std::int64_t>(fit.n));
        row.emplace_back(fit.moment_matched);
        table.rows.push_back(std::move(row));
    }
    if (!ranking.skipped.empty()) {
        auto& skips = writer.table(name + "-skipped", {"family", "reason"});
        for (const auto& skip : ranking.skipped) {
            skips.rows.push_back({family_name(skip.family), skip.reason});
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

void cmd_rv(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto returns = log_returns(prices);
    auto rv = realized_variance(returns, config.window_n, config.trading_days_per_year);
    auto& table = writer.table("realized-variance", {"date", "rv2"});
    const DateRange range{config.from.value_or(TradingDate(1800, 1, 1)), config.to.value_or(TradingDate(3000, 12, 31))};
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rv.size(); ++i) {
        if (!range.contains(rv.dates()[i])) continue;
        table.rows.push_back({rv.dates()[i].to_string(), rv.values()[i]});
        acc += rv.values()[i];
        ++count;
    }
    if (count == 0) throw Error(errc::empty_overlap, "no realized-variance windows in period");
    writer.add_scalar("windows", static_cast<std::int64_t>(count));
    writer.add_scalar("mean_rv2", acc / static_cast<double>(count));
}

void cmd_ratio(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto index = load_index(config, writer, diagnostics);
    const auto periods = periods_for(config);
    const auto panel = slice_panel(price_index_panel(prices, index), periods.front().range);
    const auto pairs =
        pair_windows(panel, "close", "level", config.window_n, config.alignment, config.trading_days_per_year);

    auto& sample_table = writer.table("ratio-sample", {"date", "rv_over_index", "index_over_rv"});
    const auto rv_over = ratio_sample(pairs, false);
    const auto index_over = ratio_sample(pairs, true);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        sample_table.rows.push_back({pairs.dates[i].to_string(), rv_over[i], index_over[i]});
    }
    writer.add_scalar("pairs", static_cast<std::int64_t>(pairs.size()));

    const auto families = families_or_default(config);
    for (const bool implied_over_realized : {false, true}) {
        const auto& raw = implied_over_realized ? index_over : rv_over;
        const double divisor = mean(raw);
        std::vector<double> normalized(raw);
        for (auto& x : normalized) x /= divisor;
        const std::string direction = implied_over_realized ? "index-over-rv" : "rv-over-index";
        writer.add_scalar("normalized_by_mean_" + direction, divisor);
        try {
            add_fit_table(writer, "fits-" + direction, rank_families(normalized, families));
        } catch (const Error& e) {
            // A constant ratio sample degenerates every family; report and go on.
            writer.add_note("fits-" + direction + " skipped: " + e.what());
        }
    }
}

void cmd_compare(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto index = load_index(config, writer, diagnostics);
    const auto full_panel = price_index_panel(prices, index);
    auto& table = writer.table("ks-two-sample", {"period", "start", "end", "pairs", "scale_ratio", "ks"});
    std::size_t emitted = 0;
    for (const auto& period : periods_for(config)) {
        AlignedPanel panel;
        try {
            panel = slice_panel(full_panel, period.range);
        } catch (const Error&) {
            writer.add_note("period " + period.name + " has no data; skipped");
            continue;
        }
        WindowPairs pairs;
        try {
            pairs = pair_windows(panel, "close", "level", config.window_n, config.alignment,
                                 config.trading_days_per_year);
        } catch (const Error&) {
            writer.add_note("period " + period.name + " shorter than one window; skipped");
            continue;
        }
        const double ratio = scaling_ratio(config, pairs, writer);
        std::vector<double> scaled_rv(pairs.rv);
        for (auto& v : scaled_rv) v *= ratio;
        const double ks = ks_two_sample(scaled_rv, pairs.index_sq);
        table.rows.push_back({period.name, panel.dates().front().to_string(), panel.dates().back().to_string(),
                              static_cast<std::int64_t>(pairs.size()), ratio, ks});
        ++emitted;
    }
    if (emitted == 0) throw Error(errc::empty_overlap, "no period produced a comparison");
}

void cmd_table1(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto index = load_index(config, writer, diagnostics);
    const auto full_panel = price_index_panel(prices, index);
    auto& table = writer.table("mean-ratio", {"period", "start", "end", "pairs", "index_sq_mean", "rv_mean", "ratio"});
    table.rows.push_back({"theory-365/252", "", "", "", "", "", 365.0 / 252.0});
    table.rows.push_back({"theory-30/21", "", "", "", "", "", 30.0 / 21.0});
    std::size_t emitted = 0;
    for (const auto& period : periods_for(config)) {
        AlignedPanel panel;
        WindowPairs pairs;
        try {
            panel = slice_panel(full_panel, period.range);
            pairs = pair_windows(panel, "close", "level", config.window_n, config.alignment,
                                 config.trading_days_per_year);
        } catch (const Error&) {
            writer.add_note("period " + period.name + " has no usable data; skipped");
            continue;
        }
        const double index_mean = mean(pairs.index_sq);
        const double rv_mean = mean(pairs.rv);
        table.rows.push_back({period.name, panel.dates().front().to_string(), panel.dates().back().to_string(),
                              static_cast<std::int64_t>(pairs.size()), index_mean, rv_mean, index_mean / rv_mean});
        ++emitted;
    }
    if (emitted == 0) throw Error(errc::empty_overlap, "no period produced a ratio");
}

void cmd_vix(const RunConfig& config, ReportWriter& writer, std::ostream&) {
    if (config.chain_paths.empty()) throw Error(errc::bad_config, "--chain is required for this command");
    std::vector<OptionChainSnapshot> chains;
    for (const auto& raw_path : config.chain_paths) {
        const std::string path = resolve_path(raw_path);
        writer.add_input(path);
        auto parsed = parse_chain_file(path);
        for (auto& chain : parsed) chains.push_back(std::move(chain));
    }
    std::sort(chains.begin(), chains.end(),
              [](const OptionChainSnapshot& a, const OptionChainSnapshot& b) { return a.expiry_years() < b.expiry_years(); });

    auto& terms = writer.table("terms", {"expiry_days", "forward", "rate", "k0", "strikes_used", "strikes_excluded",
                                         "forward_correction", "variance"});
    std::vector<ImpliedVarianceResult> results;
    for (const auto& chain : chains) {
        auto result = implied_variance(chain);
        terms.rows.push_back({chain.expiry_years() * 365.0, chain.forward(), chain.rate(), result.k0,
                              static_cast<std::int64_t>(result.contributions.size()),
                              static_cast<std::int64_t>(result.excluded.size()), result.forward_correction,
                              result.variance});
        auto& contrib = writer.table("contributions-" + fmt(chain.expiry_years() * 365.0),
                                     {"strike", "delta_k", "quote_mid", "term_value"});
        for (const auto& c : result.contributions) {
            contrib.rows.push_back({c.strike, c.delta_k, c.quote_mid, c.term_value});
        }
        results.push_back(std::move(result));
    }

    double blended = 0.0;
    if (chains.size() == 1) {
        blended = results.front().variance;
        writer.add_note("single term supplied; no 30-day interpolation");
    } else {
        const double target = 30.0 / 365.0;
        std::size_t near = chains.size();
        std::size_t next = chains.size();
        for (std::size_t i = 0; i + 1 < chains.size(); ++i) {
            if (chains[i].expiry_years() <= target && target <= chains[i + 1].expiry_years()) {
                near = i;
                next = i + 1;
                break;
            }
        }
        if (near == chains.size()) {
            throw Error(errc::invalid_bracket, "no pair of expiries brackets the 30-day horizon");
        }
        blended = blend_terms(results[near].variance, chains[near].expiry_years(), results[next].variance,
                              chains[next].expiry_years());
    }
    writer.add_scalar("variance_30d", blended);
    writer.add_scalar("index_level", std::sqrt(blended));
}

void cmd_simulate(const RunConfig& config, ReportWriter& writer, std::ostream&) {
    const auto params = require_sv_params(config);
    writer.add_config("model", sv_model_name(params.model));
    writer.add_config("theta", fmt(params.theta));
    writer.add_config("gamma", fmt(params.gamma));
    writer.add_config("kappa", fmt(params.kappa));
    writer.add_config("dt", fmt(config.dt));
    writer.add_config("steps", std::to_string(config.steps));

    const double v0 = config.sv_v0 > 0.0 ? config.sv_v0 : params.theta;
    const auto path = simulate(params, v0, config.dt, config.steps, config.seed);

    const auto values = std::span<const double>(path.values);
    writer.add_scalar("v0", v0);
    writer.add_scalar("mean_v", mean(values));
    writer.add_scalar("var_v", sample_variance(values));
    writer.add_scalar("feller", params.feller());
    if (params.second_moment_finite()) {
        const auto moments = stationary_moments(params);
        writer.add_scalar("theory_mean", moments.mean);
        writer.add_scalar("theory_var", moments.variance);
    } else {
        writer.add_note("stationary variance diverges (2 gamma <= kappa^2)");
    }

    auto& table = writer.table("path", {"t_days", "v"});
    const std::size_t stride = std::max<std::size_t>(1, path.values.size() / 2000);
    for (std::size_t i = 0; i < path.values.size(); i += stride) {
        table.rows.push_back({static_cast<double>(i) * path.dt, path.values[i]});
    }
}

void cmd_varrv(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto params = require_sv_params(config);
    writer.add_config("model", sv_model_name(params.model));
    writer.add_config("theta", fmt(params.theta));
    writer.add_config("gamma", fmt(params.gamma));
    writer.add_config("kappa", fmt(params.kappa));
    writer.add_config("dt", fmt(config.dt));
    writer.add_config("paths", std::to_string(config.paths));

    const auto moments = stationary_moments(params);
    writer.add_scalar("stationary_variance", moments.variance);

    const char* theory_kind =
        params.model == SVModel::heston ? curve_kind_name(CurveKind::theory_heston) : curve_kind_name(CurveKind::theory_mult);
    auto& curve = writer.table("curve", {"t_days", "gamma_t", "value", "kind"});
    for (int k = 0; k <= 36; ++k) {
        const double gamma_t = 1e-2 * std::pow(10.0, static_cast<double>(k) / 9.0);
        const double t_days = gamma_t / params.gamma;
        curve.rows.push_back({t_days, gamma_t, var_rv_theory(params, t_days), theory_kind});
        curve.rows.push_back({t_days, gamma_t, var_rv_reduced(gamma_t), curve_kind_name(CurveKind::reduced)});
    }

    if (config.paths >= 2) {
        std::vector<int> horizons = config.horizons;
        if (horizons.empty()) horizons = {5, 21, 63};
        auto& mc = writer.table("monte-carlo", {"t_days", "mc_variance", "theory", "relative_error"});
        for (int t : horizons) {
            const auto outcome = monte_carlo_var_rv(params, t, config.dt, config.paths, config.seed);
            const double theory = var_rv_theory(params, t);
            mc.rows.push_back({static_cast<double>(t), outcome.window_mean_variance, theory,
                               outcome.window_mean_variance / theory - 1.0});
        }
    }

    if (!config.prices_path.empty()) {
        const auto prices = load_prices(config, writer, diagnostics);
        const auto returns = log_returns(prices);
        std::vector<int> horizons = config.horizons;
        if (horizons.empty()) horizons = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233};
        const auto empirical = empirical_var_rv(returns, horizons);
        auto& table = writer.table("empirical", {"t_days", "gamma_t", "value", "kind"});
        for (std::size_t i = 0; i < empirical.horizons.size(); ++i) {
            table.rows.push_back({empirical.horizons[i], params.gamma * empirical.horizons[i], empirical.values[i],
                                  curve_kind_name(empirical.kind)});
        }
    }
}

void cmd_fig2(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto returns = log_returns(prices);
    std::vector<int> grid(21);
    std::iota(grid.begin(), grid.end(), 1);
    const auto result = variance_vs_n(returns, grid);
    writer.add_scalar("slope", result.slope);
    auto& table = writer.table("variance-vs-n", {"n", "variance"});
    for (std::size_t i = 0; i < result.n_values.size(); ++i) {
        table.rows.push_back({static_cast<std::int64_t>(result.n_values[i]), result.variances[i]});
    }
    for (int n : result.excluded) writer.add_note("n=" + std::to_string(n) + " excluded from slope (zero variance)");

    if (!config.families.empty()) {
        auto& ks_table = writer.table("ks-by-n", {"n", "family", "ks", "moment_matched"});
        for (int n : grid) {
            const auto samples = mean_squared_return_samples(returns, n);
            for (Family family : config.families) {
                try {
                    const auto fit = fit_mle(samples, family);
                    ks_table.rows.push_back(
                        {static_cast<std::int64_t>(n), family_name(family), fit.ks, fit.moment_matched});
                } catch (const Error& e) {
                    writer.add_note(std::string(family_name(family)) + " at n=" + std::to_string(n) +
                                    " skipped: " + e.what());
                }
            }
        }
    }
}

void cmd_fig13(const RunConfig& config, ReportWriter& writer, std::ostream& diagnostics, bool reduced) {
    const auto prices = load_prices(config, writer, diagnostics);
    const auto returns = log_returns(prices);
    std::vector<int> horizons = config.horizons;
    if (horizons.empty()) horizons = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233};
    const auto empirical = empirical_var_rv(returns, horizons, reduced);

    auto& table = writer.table("curve", {"t_days", "value", "kind", "label"});
    for (std::size_t i = 0; i < empirical.horizons.size(); ++i) {
        table.rows.push_back({empirical.horizons[i], empirical.values[i], curve_kind_name(empirical.kind), "data"});
    }

    if (reduced) {
        const double gamma = config.sv ? config.sv->gamma : sv_preset("heston-sp500")->gamma;
        writer.add_config("gamma", fmt(gamma));
        for (double t : empirical.horizons) {
            table.rows.push_back({t, var_rv_reduced(gamma * t), curve_kind_name(CurveKind::reduced), "theory"});
        }
    } else {
        const std::vector<std::string> preset_names = config.sv
                                                          ? std::vector<std::string>{}
                                                          : std::vector<std::string>{"heston-sp500", "mult-sp500",
                                                                                     "heston-sp500-daily",
                                                                                     "mult-sp500-daily"};
        std::vector<std::pair<std::string, SVParams>> param_sets;
        if (config.sv) {
            param_sets.emplace_back("custom", *config.sv);
        } else {
            for (const auto& name : preset_names) param_sets.emplace_back(name, *sv_preset(name));
        }
        for (const auto& [label, params] : param_sets) {
            const char* kind = params.model == SVModel::heston ? curve_kind_name(CurveKind::theory_heston)
                                                               : curve_kind_name(CurveKind::theory_mult);
            for (double t : empirical.horizons) {
                table.rows.push_back({t, var_rv_theory(params, t), kind, label});
            }
        }
    }

    // Log-log branch slopes of the data curve; branch edges echoed below.
    auto branch_slope = [&](int lo, int hi) -> std::optional<double> {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < empirical.horizons.size(); ++i) {
            const double n = empirical.horizons[i];
            if (n < lo || n > hi || empirical.values[i] <= 0.0) continue;
            xs.push_back(std::log(n));
            ys.push_back(std::log(empirical.values[i]));
        }
        if (xs.size() < 2) return std::nullopt;
        return ols_fit(xs, ys).slope;
    };
    if (const auto small = branch_slope(1, 8)) writer.add_scalar("slope_small_n_1_8", *small);
    if (const auto large = branch_slope(55, 100000)) writer.add_scalar("slope_large_n_55_up", *large);
}

} // namespace

const char* scaling_mode_name(ScalingMode mode) noexcept {
    switch (mode) {
        case ScalingMode::theory_365_252: return "theory-365-252";
        case ScalingMode::theory_30_21: return "theory-30-21";
        case ScalingMode::empirical_mean_ratio: return "empirical";
    }
    return "?";
}

std::optional<ScalingMode> scaling_mode_from_name(std::string_view name) noexcept {
    if (name == "theory-365-252" || name == "theory_365_252") return ScalingMode::theory_365_252;
    if (name == "theory-30-21" || name == "theory_30_21") return ScalingMode::theory_30_21;
    if (name == "empirical" || name == "empirical_mean_ratio") return ScalingMode::empirical_mean_ratio;
    return std::nullopt;
}

int run_command(const RunConfig& config, std::ostream& diagnostics) {
    const std::string name = config.command == "report" ? config.report : config.command;
    ReportWriter writer(name, config.format);
    echo_common_config(config, writer);
    try {
        if (config.command == "rv") {
            cmd_rv(config, writer, diagnostics);
        } else if (config.command == "ratio") {
            cmd_ratio(config, writer, diagnostics);
        } else if (config.command == "compare") {
            cmd_compare(config, writer, diagnostics);
        } else if (config.command == "vix") {
            cmd_vix(config, writer, diagnostics);
        } else if (config.command == "simulate") {
            cmd_simulate(config, writer, diagnostics);
        } else if (config.command == "varrv") {
            cmd_varrv(config, writer, diagnostics);
        } else if (config.command == "report") {
            if (config.report == "table1") {
                cmd_table1(config, writer, diagnostics);
            } else if (config.report == "table2") {
                cmd_compare(config, writer, diagnostics);
            } else if (config.report == "table3-concurrent") {
                RunConfig c = config;
                c.alignment = Alignment::concurrent;
                cmd_ratio(c, writer, diagnostics);
            } else if (config.report == "table-preceding") {
                RunConfig c = config;
                c.alignment = Alignment::preceding;
                cmd_ratio(c, writer, diagnostics);
            } else if (config.report == "fig2-slope") {
                cmd_fig2(config, writer, diagnostics);
            } else if (config.report == "fig13") {
                cmd_fig13(config, writer, diagnostics, false);
            } else if (config.report == "fig14") {
                cmd_fig13(config, writer, diagnostics, true);
            } else {
                throw Error(errc::bad_config, "unknown report '" + config.report + "'");
            }
        } else {
            throw Error(errc::bad_config, "unknown command '" + config.command + "'");
        }
        emit(config, writer);
        return kExitOk;
    } catch (const Error& e) {
        diagnostics << "error: " << e.what() << "\n";
        switch (e.code()) {
            case errc::io_error:
            case errc::bad_config:
            case errc::malformed_row:
            case errc::empty_input:
            case errc::non_positive_price:
            case errc::negative_level:
            case errc::duplicate_date:
                return kExitInputError;
            default:
                return kExitComputeError;
        }
    } catch (const std::exception& e) {
        diagnostics << "error: " << e.what() << "\n";
        return kExitComputeError;
    }
}

} // namespace volstat

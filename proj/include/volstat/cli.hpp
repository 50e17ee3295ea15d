#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "volstat/distributions.hpp"
#include "volstat/market_data.hpp"
#include "volstat/realized_vol.hpp"
#include "volstat/sv_models.hpp"

namespace volstat {

enum class ScalingMode { theory_365_252, theory_30_21, empirical_mean_ratio };
enum class OutputFormat { csv, json };

const char* scaling_mode_name(ScalingMode mode) noexcept;
std::optional<ScalingMode> scaling_mode_from_name(std::string_view name) noexcept;

// Everything a single invocation needs. Paths are resolved against
// VOLSTAT_DATA_DIR when they do not exist as given.
struct RunConfig {
    std::string command;                  // rv | ratio | compare | vix | simulate | varrv | report
    std::string report;                   // table1 | table2 | table3-concurrent | table-preceding |
                                          // fig2-slope | fig13 | fig14
    std::string prices_path;
    std::string index_path;
    std::vector<std::string> chain_paths;
    IndexKind kind = IndexKind::vix;
    std::optional<TradingDate> from;
    std::optional<TradingDate> to;
    int window_n = 21;
    ScalingMode scaling = ScalingMode::empirical_mean_ratio;
    Alignment alignment = Alignment::concurrent;
    std::vector<Family> families;         // empty -> the six core families
    std::optional<SVParams> sv;           // from --preset or --model/--theta/--gamma/--kappa
    std::string preset;
    double sv_v0 = 0.0;                   // 0 -> start simulations at theta
    std::size_t paths = 10000;
    std::size_t steps = 100000;
    double dt = 0.1;
    std::vector<int> horizons;            // varrv Monte Carlo / empirical horizons
    std::uint64_t seed = 12345;
    std::string out_path;                 // empty -> stdout
    OutputFormat format = OutputFormat::csv;
    ColumnMapping price_mapping;
    ColumnMapping index_mapping;
    bool allow_bad_rows = false;
    double trading_days_per_year = 252.0;
};

// Exit codes: 0 success, 2 input error (files, parsing, configuration),
// 3 computation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitComputeError = 3;

int run_command(const RunConfig& config, std::ostream& diagnostics);

} // namespace volstat

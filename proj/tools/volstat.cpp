#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "volstat/cli.hpp"

namespace {

using volstat::RunConfig;

void add_data_options(CLI::App* cmd, RunConfig& config, bool with_index) {
    cmd->add_option("--prices", config.prices_path, "price CSV (date + close columns)");
    cmd->add_option("--date-col", config.price_mapping.date_column, "price date column name");
    cmd->add_option("--close-col", config.price_mapping.value_column, "price close column name");
    if (with_index) {
        cmd->add_option("--index", config.index_path, "volatility index CSV");
        cmd->add_option("--index-date-col", config.index_mapping.date_column, "index date column name");
        cmd->add_option("--level-col", config.index_mapping.value_column, "index level column name");
        cmd->add_option_function<std::string>(
               "--kind",
               [&config](const std::string& value) {
                   if (value == "vix") {
                       config.kind = volstat::IndexKind::vix;
                   } else if (value == "vxo") {
                       config.kind = volstat::IndexKind::vxo;
                   } else if (value == "other") {
                       config.kind = volstat::IndexKind::other;
                   } else {
                       throw CLI::ValidationError("--kind must be vix, vxo or other");
                   }
               },
               "index kind: vix|vxo|other")
            ->default_str("vix");
    }
    cmd->add_option_function<std::string>(
           "--date-format",
           [&config](const std::string& value) {
               if (value == "iso") {
                   config.price_mapping.date_format = volstat::DateFormat::iso;
                   config.index_mapping.date_format = volstat::DateFormat::iso;
               } else if (value == "us") {
                   config.price_mapping.date_format = volstat::DateFormat::us;
                   config.index_mapping.date_format = volstat::DateFormat::us;
               } else {
                   throw CLI::ValidationError("--date-format must be iso or us");
               }
           },
           "date format of both inputs: iso (YYYY-MM-DD) or us (M/D/YYYY)")
        ->default_str("iso");
    cmd->add_flag("--allow-bad-rows", config.allow_bad_rows, "keep going past rejected rows (reported on stderr)");
}

void add_period_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option_function<std::string>(
        "--from",
        [&config](const std::string& value) {
            const auto date = volstat::parse_date(value, volstat::DateFormat::iso);
            if (!date) throw CLI::ValidationError("--from must be YYYY-MM-DD");
            config.from = *date;
        },
        "period start (YYYY-MM-DD)");
    cmd->add_option_function<std::string>(
        "--to",
        [&config](const std::string& value) {
            const auto date = volstat::parse_date(value, volstat::DateFormat::iso);
            if (!date) throw CLI::ValidationError("--to must be YYYY-MM-DD");
            config.to = *date;
        },
        "period end (YYYY-MM-DD)");
}

void add_model_options(CLI::App* cmd, RunConfig& config) {
    static std::string model;
    static double theta = 0.0;
    static double gamma = 0.0;
    static double kappa = -1.0;
    cmd->add_option("--preset", config.preset, "named parameter set (heston-sp500, mult-sp500, *-daily)");
    cmd->add_option("--model", model, "heston|mult");
    cmd->add_option("--theta", theta, "stationary mean of v");
    cmd->add_option("--gamma", gamma, "mean-reversion rate per day");
    cmd->add_option("--kappa", kappa, "vol-of-variance coefficient");
    cmd->callback([cmd, &config] {
        if (!config.preset.empty()) {
            const auto preset = volstat::sv_preset(config.preset);
            if (!preset) throw CLI::ValidationError("unknown preset '" + config.preset + "'");
            config.sv = *preset;
        }
        if (cmd->count("--model") > 0) {
            volstat::SVParams params;
            if (config.sv) params = *config.sv;
            params.model = model == "mult" ? volstat::SVModel::multiplicative : volstat::SVModel::heston;
            if (model != "heston" && model != "mult") throw CLI::ValidationError("--model must be heston or mult");
            if (cmd->count("--theta")) params.theta = theta;
            if (cmd->count("--gamma")) params.gamma = gamma;
            if (cmd->count("--kappa")) params.kappa = kappa;
            config.sv = params;
        }
    });
}

void add_output_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--out", config.out_path, "output file (default stdout)");
    cmd->add_option_function<std::string>(
           "--format",
           [&config](const std::string& value) {
               if (value == "csv") {
                   config.format = volstat::OutputFormat::csv;
               } else if (value == "json") {
                   config.format = volstat::OutputFormat::json;
               } else {
                   throw CLI::ValidationError("--format must be csv or json");
               }
           },
           "csv|json")
        ->default_str("csv");
    cmd->add_option("--seed", config.seed, "random seed");
}

void add_families_option(CLI::App* cmd, RunConfig& config) {
    cmd->add_option_function<std::string>(
        "--families",
        [&config](const std::string& value) {
            config.families.clear();
            std::size_t start = 0;
            while (start <= value.size()) {
                const auto comma = value.find(',', start);
                const std::string token = value.substr(start, comma - start);
                if (!token.empty()) {
                    const auto family = volstat::family_from_name(token);
                    if (!family) throw CLI::ValidationError("unknown family '" + token + "'");
                    config.families.push_back(*family);
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        },
        "comma-separated families (normal,lognormal,inverse-gamma,gamma,weibull,inverse-gaussian,"
        "exgaussian,gamma-product,inverse-gamma-product)");
}

void add_horizons_option(CLI::App* cmd, RunConfig& config) {
    cmd->add_option_function<std::string>(
        "--horizons",
        [&config](const std::string& value) {
            config.horizons.clear();
            std::size_t start = 0;
            while (start <= value.size()) {
                const auto comma = value.find(',', start);
                const std::string token = value.substr(start, comma - start);
                if (!token.empty()) config.horizons.push_back(std::stoi(token));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        },
        "comma-separated horizons in trading days");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"volstat - realized and implied volatility statistics"};
    app.require_subcommand(1);

    RunConfig config;

    auto* rv = app.add_subcommand("rv", "realized variance over n-day windows");
    add_data_options(rv, config, false);
    add_period_options(rv, config);
    rv->add_option("--n", config.window_n, "window length in trading days");
    add_output_options(rv, config);

    auto* ratio = app.add_subcommand("ratio", "ratio distribution of realized and implied variance, with MLE fits");
    add_data_options(ratio, config, true);
    add_period_options(ratio, config);
    ratio->add_option("--n", config.window_n, "window length in trading days");
    ratio->add_option_function<std::string>(
        "--alignment",
        [&config](const std::string& value) {
            if (value == "concurrent") {
                config.alignment = volstat::Alignment::concurrent;
            } else if (value == "preceding") {
                config.alignment = volstat::Alignment::preceding;
            } else {
                throw CLI::ValidationError("--alignment must be concurrent or preceding");
            }
        },
        "pair the index with the following (concurrent) or prior (preceding) window");
    add_families_option(ratio, config);
    add_output_options(ratio, config);

    auto* compare = app.add_subcommand("compare", "two-sample KS of scaled realized variance vs squared index");
    add_data_options(compare, config, true);
    add_period_options(compare, config);
    compare->add_option("--n", config.window_n, "window length in trading days");
    compare->add_option_function<std::string>(
        "--scaling",
        [&config](const std::string& value) {
            const auto mode = volstat::scaling_mode_from_name(value);
            if (!mode) throw CLI::ValidationError("--scaling must be theory-365-252, theory-30-21 or empirical");
            config.scaling = *mode;
        },
        "scaling mode for realized variance");
    add_output_options(compare, config);

    auto* vix = app.add_subcommand("vix", "model-free implied variance from option-chain snapshots");
    vix->add_option("--chain", config.chain_paths, "chain snapshot file (repeatable)")->required();
    add_output_options(vix, config);

    auto* simulate = app.add_subcommand("simulate", "simulate a stochastic-variance path");
    add_model_options(simulate, config);
    simulate->add_option("--dt", config.dt, "step in days");
    simulate->add_option("--steps", config.steps, "number of steps");
    simulate->add_option("--v0", config.sv_v0, "initial variance (default theta)");
    add_output_options(simulate, config);

    auto* varrv = app.add_subcommand("varrv", "variance of realized variance: theory, reduced curve, Monte Carlo");
    add_model_options(varrv, config);
    varrv->add_option("--dt", config.dt, "Euler step in days");
    varrv->add_option("--paths", config.paths, "Monte Carlo paths (0 to skip)");
    add_horizons_option(varrv, config);
    add_data_options(varrv, config, false);
    add_output_options(varrv, config);

    auto* report = app.add_subcommand("report", "named report datasets");
    report->add_option("name", config.report,
                       "table1 | table2 | table3-concurrent | table-preceding | fig2-slope | fig13 | fig14")
        ->required();
    add_data_options(report, config, true);
    add_period_options(report, config);
    report->add_option("--n", config.window_n, "window length in trading days");
    report->add_option_function<std::string>(
        "--scaling",
        [&config](const std::string& value) {
            const auto mode = volstat::scaling_mode_from_name(value);
            if (!mode) throw CLI::ValidationError("--scaling must be theory-365-252, theory-30-21 or empirical");
            config.scaling = *mode;
        },
        "scaling mode (table2)");
    add_families_option(report, config);
    add_horizons_option(report, config);
    add_model_options(report, config);
    add_output_options(report, config);

    CLI11_PARSE(app, argc, argv);

    for (auto* cmd : {rv, ratio, compare, vix, simulate, varrv, report}) {
        if (cmd->parsed()) {
            config.command = cmd->get_name();
            break;
        }
    }
    return volstat::run_command(config, std::cerr);
}

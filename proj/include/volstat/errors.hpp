#pragma once

#include <stdexcept>
#include <string>

namespace volstat {

// Every failure mode the library reports. Exceptions carry one of these so
// callers can branch on the kind without parsing messages.
enum class errc {
    // csv ingestion
    malformed_row,
    non_positive_price,
    negative_level,
    duplicate_date,
    empty_input,
    empty_intersection,
    // returns / variance series
    too_short,
    empty_overlap,
    zero_denominator_mean,
    non_positive_ratio,
    slope_undefined,
    // option chains
    no_strike_below_forward,
    empty_chain,
    too_few_strikes,
    invalid_bracket,
    // distribution fitting
    support_violation,
    non_convergence,
    degenerate_sample,
    integration_failure,
    empty_sample,
    // stochastic variance models
    invalid_step,
    moment_divergence,
    non_positive_decay,
    // io / config
    io_error,
    bad_config,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace volstat

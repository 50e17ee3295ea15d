#pragma once

#include <span>
#include <string>
#include <vector>

#include "volstat/errors.hpp"

namespace volstat {

enum class OptionRight { call, put };

struct OptionQuote {
    double strike = 0.0;
    OptionRight right = OptionRight::call;
    double bid = 0.0;
    double ask = 0.0;

    double mid() const noexcept { return 0.5 * (bid + ask); }
};

// One expiry's quotes plus the forward level and the continuously
// compounded risk-free rate to that expiry.
class OptionChainSnapshot {
public:
    OptionChainSnapshot(double expiry_time_years, double forward, double risk_free_rate,
                        std::vector<OptionQuote> quotes);

    double expiry_years() const noexcept { return expiry_years_; }
    double forward() const noexcept { return forward_; }
    double rate() const noexcept { return rate_; }
    const std::vector<OptionQuote>& quotes() const noexcept { return quotes_; }

private:
    double expiry_years_;
    double forward_;
    double rate_;
    std::vector<OptionQuote> quotes_; // sorted by (strike, right), unique per right
};

struct StrikeContribution {
    double strike = 0.0;
    double delta_k = 0.0;
    double quote_mid = 0.0;
    double term_value = 0.0; // (delta_k / strike^2) * exp(RT) * mid
};

struct ExcludedStrike {
    double strike = 0.0;
    std::string reason; // "zero-bid" or "zero-bid-run"
};

struct ImpliedVarianceResult {
    double variance = 0.0; // percent^2, annualized to the chain expiry
    double k0 = 0.0;
    double forward_correction = 0.0; // (1/T) (F/K0 - 1)^2, before the 100^2 scale
    std::vector<StrikeContribution> contributions;
    std::vector<ExcludedStrike> excluded;
};

// Largest strike <= forward. Errors: NoStrikeBelowForward.
double select_k0(const OptionChainSnapshot& chain);

// Half the gap between the neighbours of strikes[i]; one-sided at the ends.
double strike_spacing(std::span<const double> strikes, std::size_t i);

// Model-free variance of the chain: out-of-money puts below K0, calls above,
// the put/call average at K0, zero-bid strikes excluded and the strip
// truncated after two consecutive zero bids away from K0.
ImpliedVarianceResult implied_variance(const OptionChainSnapshot& chain);

// Linear interpolation of total variance T * sigma^2(T) to the target
// horizon, re-annualized by 365/target_days. Errors: InvalidBracket.
double blend_terms(double near_variance, double near_expiry_years, double next_variance, double next_expiry_years,
                   double target_days = 30.0, bool allow_extrapolation = false);

// Forward implied by put-call parity at the strike with the smallest
// |call mid - put mid| gap. Optional helper; the estimator itself takes the
// forward as an input.
double forward_from_parity(const OptionChainSnapshot& chain);

// Chain-snapshot file reader. Grammar (see the CLI documentation):
//   # term: days=<D> forward=<F> rate=<R>     (one line per expiry)
//   expiry_days,right,strike,bid,ask          (header, then data rows)
// Returns one snapshot per declared expiry, ascending by expiry.
std::vector<OptionChainSnapshot> parse_chain_file(const std::string& path);

} // namespace volstat

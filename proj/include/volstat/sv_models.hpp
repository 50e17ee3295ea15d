#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volstat/realized_vol.hpp"

namespace volstat {

enum class SVModel { heston, multiplicative };

const char* sv_model_name(SVModel model) noexcept;

// Mean-reverting stochastic-variance parameters, in trading-day units:
//   heston:          dv = -gamma (v - theta) dt + kappa sqrt(v) dW
//   multiplicative:  dv = -gamma (v - theta) dt + kappa v dW
struct SVParams {
    double theta = 0.0; // stationary mean of v
    double gamma = 0.0; // mean-reversion rate per day
    double kappa = 0.0; // vol-of-variance coefficient
    SVModel model = SVModel::heston;

    // 2 gamma theta >= kappa^2; informational, not enforced.
    bool feller() const noexcept { return 2.0 * gamma * theta >= kappa * kappa; }
    // Finite stationary second moment (always true for heston).
    bool second_moment_finite() const noexcept {
        return model == SVModel::heston || 2.0 * gamma > kappa * kappa;
    }
    void validate() const; // theta > 0, gamma > 0, kappa >= 0
};

struct SVPath {
    double dt = 0.0; // days per step
    std::vector<double> values; // v at each grid point, values[0] = v0, size steps + 1
    std::uint64_t seed = 0;
};

struct StationaryMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Euler-Maruyama with full truncation (heston) or reflection at zero
// (multiplicative); observed values are never negative. Deterministic for a
// fixed seed.
SVPath simulate(const SVParams& params, double v0, double dt, std::size_t steps, std::uint64_t seed);

// (theta, kappa^2 theta / 2 gamma) for heston,
// (theta, kappa^2 theta^2 / (2 gamma - kappa^2)) for multiplicative.
// Errors: MomentDivergence when 2 gamma <= kappa^2 (multiplicative).
StationaryMoments stationary_moments(const SVParams& params);

// cov(v_t, v_{t+tau}) = stationary variance * exp(-gamma tau).
double autocovariance_theory(const SVParams& params, double tau_days);

// Closed-form E[(T^-1 int_0^T v dt - theta)^2]:
//   stationary variance * var_rv_reduced(gamma T).
double var_rv_theory(const SVParams& params, double t_days);

// Universal dimensionless curve 2 (gamma T)^-2 (exp(-gamma T) - 1 + gamma T);
// tends to 1 for small gamma T and to 2/(gamma T) for large gamma T.
double var_rv_reduced(double gamma_t);

// theta from the sample mean; gamma and the covariance amplitude from an OLS
// fit of ln autocovariance over lags 1..L (positive covariances only,
// L re-derived as ceil(3/gamma) after a first pass); kappa inverted from the
// model's stationary-variance identity. The proxy is expected to be daily
// squared returns (window 1, de-annualized).
// Errors: NonPositiveDecay, TooShort.
SVParams estimate_params(const VarianceSeries& variance_proxy, SVModel model);

// r_i^2 as a window-1, unannualized VarianceSeries — the estimation proxy.
VarianceSeries daily_variance_proxy(const ReturnSeries& returns);

enum class CurveKind { theory_heston, theory_mult, reduced, empirical };

const char* curve_kind_name(CurveKind kind) noexcept;

struct VarRVCurve {
    std::vector<double> horizons; // days, strictly increasing
    std::vector<double> values;
    CurveKind kind = CurveKind::empirical;
};

// Variance across non-overlapping n-day windows of the window-mean daily
// variance proxy, per horizon; optionally normalized by the n = 1 point.
VarRVCurve empirical_var_rv(const ReturnSeries& returns, const std::vector<int>& horizons,
                            bool normalize_by_n1 = false);

struct MonteCarloVarRV {
    double window_mean_variance = 0.0; // across paths, unbiased
    double window_mean_average = 0.0;
    std::size_t paths = 0;
};

// Variance of the path-averaged v over [0, T] across independent paths,
// each started from a stationary draw. Paths are simulated in parallel;
// path p depends only on (seed, p), so results are reproducible.
MonteCarloVarRV monte_carlo_var_rv(const SVParams& params, double t_days, double dt, std::size_t paths,
                                   std::uint64_t seed);

struct SVPreset {
    std::string name;
    SVParams params;
};

// Named parameter sets calibrated to S&P 500 daily variance (autocovariance
// fit and single-day-return variants).
const std::vector<SVPreset>& sv_presets();
std::optional<SVParams> sv_preset(std::string_view name);

// Deterministic per-path seed derivation (splitmix64 over seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

} // namespace volstat

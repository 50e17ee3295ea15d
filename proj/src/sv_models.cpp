#include "volstat/sv_models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "volstat/stats_util.hpp"

namespace volstat {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(state);
}

const char* sv_model_name(SVModel model) noexcept {
    return model == SVModel::heston ? "heston" : "multiplicative";
}

void SVParams::validate() const {
    if (!(theta > 0.0)) throw Error(errc::bad_config, "theta must be positive");
    if (!(gamma > 0.0)) throw Error(errc::bad_config, "gamma must be positive");
    if (!(kappa >= 0.0)) throw Error(errc::bad_config, "kappa must be non-negative");
}

SVPath simulate(const SVParams& params, double v0, double dt, std::size_t steps, std::uint64_t seed) {
    params.validate();
    if (!(dt > 0.0)) throw Error(errc::invalid_step, "dt must be positive");
    if (steps < 1) throw Error(errc::invalid_step, "need at least one step");
    if (!(v0 > 0.0)) throw Error(errc::invalid_step, "v0 must be positive");

    std::mt19937_64 rng(derive_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_dt = std::sqrt(dt);

    SVPath path;
    path.dt = dt;
    path.seed = seed;
    path.values.reserve(steps + 1);
    path.values.push_back(v0);

    if (params.model == SVModel::heston) {
        // Full truncation: the latent state may dip below zero but the drift
        // and diffusion see max(x, 0), and the observed path is clipped.
        double x = v0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double plus = std::max(x, 0.0);
            x += -params.gamma * (plus - params.theta) * dt + params.kappa * std::sqrt(plus) * sqrt_dt * normal(rng);
            path.values.push_back(std::max(x, 0.0));
        }
    } else {
        double v = v0;
        for (std::size_t k = 0; k < steps; ++k) {
            v += -params.gamma * (v - params.theta) * dt + params.kappa * v * sqrt_dt * normal(rng);
            if (v < 0.0) v = -v; // reflecting guard, effectively unreachable for small kappa sqrt(dt)
            path.values.push_back(v);
        }
    }
    return path;
}

StationaryMoments stationary_moments(const SVParams& params) {
    params.validate();
    if (params.model == SVModel::heston) {
        return {params.theta, params.kappa * params.kappa * params.theta / (2.0 * params.gamma)};
    }
    if (!params.second_moment_finite()) {
        throw Error(errc::moment_divergence, "multiplicative model needs 2 gamma > kappa^2");
    }
    const double k2 = params.kappa * params.kappa;
    return {params.theta, k2 * params.theta * params.theta / (2.0 * params.gamma - k2)};
}

double autocovariance_theory(const SVParams& params, double tau_days) {
    if (tau_days < 0.0) throw Error(errc::bad_config, "lag must be non-negative");
    return stationary_moments(params).variance * std::exp(-params.gamma * tau_days);
}

double var_rv_reduced(double gamma_t) {
    if (!(gamma_t > 0.0)) throw Error(errc::bad_config, "gamma T must be positive");
    // expm1 keeps the small-argument cancellation exact:
    // exp(-x) - 1 + x = expm1(-x) + x = x^2/2 - x^3/6 + ...
    return 2.0 * (std::expm1(-gamma_t) + gamma_t) / (gamma_t * gamma_t);
}

double var_rv_theory(const SVParams& params, double t_days) {
    if (!(t_days > 0.0)) throw Error(errc::bad_config, "horizon must be positive");
    return stationary_moments(params).variance * var_rv_reduced(params.gamma * t_days);
}

VarianceSeries daily_variance_proxy(const ReturnSeries& returns) {
    std::vector<double> values(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) values[i] = returns.values()[i] * returns.values()[i];
    return VarianceSeries(returns.dates(), std::move(values), 1, 1.0);
}

namespace {

struct DecayFit {
    double gamma = 0.0;
    double amplitude = 0.0; // fitted covariance at lag zero
};

DecayFit fit_autocovariance_decay(std::span<const double> v, std::size_t max_lag) {
    const double m = mean(v);
    std::vector<double> lags;
    std::vector<double> log_cov;
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (std::size_t i = 0; i + tau < v.size(); ++i) acc += (v[i] - m) * (v[i + tau] - m);
        const double cov = acc / static_cast<double>(v.size() - tau);
        if (cov > 0.0) { // logarithm needs positive covariances
            lags.push_back(static_cast<double>(tau));
            log_cov.push_back(std::log(cov));
        }
    }
    if (lags.size() < 3) throw Error(errc::non_positive_decay, "too few positive autocovariances");
    const auto line = ols_fit(lags, log_cov);
    if (!(line.slope < 0.0)) throw Error(errc::non_positive_decay, "autocovariance does not decay");
    return {-line.slope, std::exp(line.intercept)};
}

} // namespace

SVParams estimate_params(const VarianceSeries& variance_proxy, SVModel model) {
    const auto& v = variance_proxy.values();
    if (v.size() < 1000) throw Error(errc::too_short, "need at least 1000 observations");

    const double theta = mean(v);
    if (!(theta > 0.0)) throw Error(errc::bad_config, "proxy mean must be positive");

    // The fit window depends on gamma, so bootstrap with a modest window and
    // re-fit once on ceil(3 / gamma).
    auto clamp_lag = [&](double lag) {
        return static_cast<std::size_t>(std::clamp<double>(lag, 5.0, static_cast<double>(v.size() / 10)));
    };
    DecayFit fit = fit_autocovariance_decay(v, clamp_lag(21.0));
    fit = fit_autocovariance_decay(v, clamp_lag(std::ceil(3.0 / fit.gamma)));

    SVParams params;
    params.model = model;
    params.theta = theta;
    params.gamma = fit.gamma;
    if (model == SVModel::heston) {
        params.kappa = std::sqrt(2.0 * fit.gamma * fit.amplitude / theta);
    } else {
        // amplitude = kappa^2 theta^2 / (2 gamma - kappa^2)
        params.kappa = std::sqrt(2.0 * fit.gamma * fit.amplitude / (theta * theta + fit.amplitude));
    }
    params.validate();
    return params;
}

VarRVCurve empirical_var_rv(const ReturnSeries& returns, const std::vector<int>& horizons, bool normalize_by_n1) {
    if (horizons.empty()) throw Error(errc::bad_config, "need at least one horizon");
    std::vector<int> sorted(horizons);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(errc::bad_config, "duplicate horizons");
    }

    const auto proxy = daily_variance_proxy(returns);
    auto window_variance = [&](int n) {
        if (proxy.size() / static_cast<std::size_t>(n) < 2) {
            throw Error(errc::too_short, "fewer than two windows for n=" + std::to_string(n));
        }
        const std::size_t windows = proxy.size() / static_cast<std::size_t>(n);
        std::vector<double> means(windows);
        for (std::size_t w = 0; w < windows; ++w) {
            double acc = 0.0;
            for (std::size_t i = w * static_cast<std::size_t>(n); i < (w + 1) * static_cast<std::size_t>(n); ++i) {
                acc += proxy.values()[i];
            }
            means[w] = acc / static_cast<double>(n);
        }
        return sample_variance(means);
    };

    VarRVCurve curve;
    curve.kind = normalize_by_n1 ? CurveKind::reduced : CurveKind::empirical;
    const double base = normalize_by_n1 ? window_variance(1) : 1.0;
    if (normalize_by_n1 && !(base > 0.0)) throw Error(errc::slope_undefined, "zero variance at n=1");
    for (int n : sorted) {
        if (n < 1) throw Error(errc::bad_config, "horizons must be >= 1");
        curve.horizons.push_back(static_cast<double>(n));
        curve.values.push_back(window_variance(n) / base);
    }
    return curve;
}

namespace {

// Stationary draw for the path start: gamma law for heston, inverse gamma
// for the multiplicative model (point mass theta when kappa = 0).
double stationary_draw(const SVParams& params, std::mt19937_64& rng) {
    if (params.kappa == 0.0) return params.theta;
    const double two_g_over_k2 = 2.0 * params.gamma / (params.kappa * params.kappa);
    if (params.model == SVModel::heston) {
        std::gamma_distribution<double> gamma_law(two_g_over_k2 * params.theta, 1.0 / two_g_over_k2);
        return gamma_law(rng);
    }
    std::gamma_distribution<double> gamma_law(1.0 + two_g_over_k2, 1.0 / (two_g_over_k2 * params.theta));
    double draw = gamma_law(rng);
    while (draw <= 0.0) draw = gamma_law(rng);
    return 1.0 / draw;
}

double path_window_mean(const SVParams& params, double dt, std::size_t steps, std::uint64_t path_seed) {
    std::mt19937_64 rng(path_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_dt = std::sqrt(dt);
    double x = stationary_draw(params, rng);
    double acc = 0.0;
    if (params.model == SVModel::heston) {
        for (std::size_t k = 0; k < steps; ++k) {
            const double plus = std::max(x, 0.0);
            acc += plus;
            x += -params.gamma * (plus - params.theta) * dt + params.kappa * std::sqrt(plus) * sqrt_dt * normal(rng);
        }
    } else {
        for (std::size_t k = 0; k < steps; ++k) {
            acc += x;
            x += -params.gamma * (x - params.theta) * dt + params.kappa * x * sqrt_dt * normal(rng);
            if (x < 0.0) x = -x;
        }
    }
    return acc / static_cast<double>(steps);
}

} // namespace

MonteCarloVarRV monte_carlo_var_rv(const SVParams& params, double t_days, double dt, std::size_t paths,
                                   std::uint64_t seed) {
    params.validate();
    if (!(dt > 0.0) || !(t_days > 0.0)) throw Error(errc::invalid_step, "dt and T must be positive");
    if (paths < 2) throw Error(errc::bad_config, "need at least two paths");
    const auto steps = static_cast<std::size_t>(std::llround(t_days / dt));
    if (steps < 1) throw Error(errc::invalid_step, "T shorter than one step");

    std::vector<double> window_means(paths);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, paths);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t p = w; p < paths; p += workers) {
                window_means[p] = path_window_mean(params, dt, steps, derive_seed(seed, p + 1));
            }
        });
    }
    for (auto& t : pool) t.join();

    MonteCarloVarRV out;
    out.paths = paths;
    out.window_mean_average = mean(window_means);
    out.window_mean_variance = sample_variance(window_means);
    return out;
}

const char* curve_kind_name(CurveKind kind) noexcept {
    switch (kind) {
        case CurveKind::theory_heston: return "theory-heston";
        case CurveKind::theory_mult: return "theory-mult";
        case CurveKind::reduced: return "reduced";
        case CurveKind::empirical: return "empirical";
    }
    return "?";
}

const std::vector<SVPreset>& sv_presets() {
    static const std::vector<SVPreset> presets = {
        {"heston-sp500", {9.81e-5, 0.041, 2.32e-3, SVModel::heston}},
        {"mult-sp500", {9.81e-5, 0.041, 0.25, SVModel::multiplicative}},
        {"heston-sp500-daily", {1.02e-4, 0.041, 2.80e-3, SVModel::heston}},
        {"mult-sp500-daily", {1.10e-4, 0.041, 0.25, SVModel::multiplicative}},
    };
    return presets;
}

std::optional<SVParams> sv_preset(std::string_view name) {
    for (const auto& preset : sv_presets()) {
        if (preset.name == name) return preset.params;
    }
    return std::nullopt;
}

} // namespace volstat

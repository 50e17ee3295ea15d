#include <doctest.h>

#include <cmath>
#include <random>

#include "support/helpers.hpp"
#include "volstat/stats_util.hpp"
#include "volstat/sv_models.hpp"

using namespace volstat;

namespace {

const SVParams kHeston{9.81e-5, 0.041, 2.32e-3, SVModel::heston};
const SVParams kMult{9.81e-5, 0.041, 0.25, SVModel::multiplicative};

ReturnSeries returns_from_values(std::vector<double> values) {
    return ReturnSeries(testutil::consecutive_dates(values.size()), std::move(values));
}

} // namespace

TEST_CASE("noise-free simulation relaxes exponentially to theta") {
    SVParams params{1.0e-4, 0.1, 0.0, SVModel::heston};
    const double v0 = 5.0e-4;
    const double dt = 0.01;
    const auto path = simulate(params, v0, dt, 5000, 1);
    for (std::size_t k : {100u, 1000u, 2500u, 5000u}) {
        const double t = static_cast<double>(k) * dt;
        const double expected = params.theta + (v0 - params.theta) * std::exp(-params.gamma * t);
        CHECK(path.values[k] == doctest::Approx(expected).epsilon(0.01));
    }
    SVParams mult = params;
    mult.model = SVModel::multiplicative;
    const auto mpath = simulate(mult, v0, dt, 5000, 1);
    CHECK(mpath.values[5000] == doctest::Approx(path.values[5000]).epsilon(1e-12));
}

TEST_CASE("simulation argument validation") {
    CHECK_THROWS_WITH_AS(simulate(kHeston, 1e-4, 0.0, 10, 1), doctest::Contains("InvalidStep"), Error);
    CHECK_THROWS_WITH_AS(simulate(kHeston, 1e-4, 0.1, 0, 1), doctest::Contains("InvalidStep"), Error);
    CHECK_THROWS_WITH_AS(simulate(kHeston, 0.0, 0.1, 10, 1), doctest::Contains("InvalidStep"), Error);
    SVParams bad = kHeston;
    bad.theta = -1.0;
    CHECK_THROWS_AS(simulate(bad, 1e-4, 0.1, 10, 1), Error);
}

TEST_CASE("fixed seed reproduces bit-identical paths; different seeds decorrelate") {
    const auto a = simulate(kHeston, kHeston.theta, 0.1, 20000, 42);
    const auto b = simulate(kHeston, kHeston.theta, 0.1, 20000, 42);
    CHECK(a.values == b.values);

    const auto c = simulate(kHeston, kHeston.theta, 0.1, 20000, 43);
    const double ma = mean(a.values);
    const double mc = mean(c.values);
    double cov = 0.0;
    double va = 0.0;
    double vc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        cov += (a.values[i] - ma) * (c.values[i] - mc);
        va += (a.values[i] - ma) * (a.values[i] - ma);
        vc += (c.values[i] - mc) * (c.values[i] - mc);
    }
    const double corr = cov / std::sqrt(va * vc);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(a.values.size())) * 5.0);
}

TEST_CASE("paths never go negative") {
    // Feller condition strongly violated to stress the truncation.
    SVParams params{1e-4, 0.05, 0.05, SVModel::heston};
    const auto path = simulate(params, 1e-4, 0.1, 50000, 7);
    for (double v : path.values) CHECK(v >= 0.0);
    const auto mpath = simulate(kMult, kMult.theta, 0.1, 50000, 7);
    for (double v : mpath.values) CHECK(v >= 0.0);
}

TEST_CASE("stationary moments") {
    SUBCASE("heston closed form") {
        const auto m = stationary_moments(kHeston);
        CHECK(m.mean == doctest::Approx(9.81e-5));
        CHECK(m.variance == doctest::Approx(2.32e-3 * 2.32e-3 * 9.81e-5 / (2.0 * 0.041)).epsilon(1e-12));
    }
    SUBCASE("multiplicative closed form") {
        const auto m = stationary_moments(kMult);
        CHECK(m.variance == doctest::Approx(0.0625 * 9.81e-5 * 9.81e-5 / (2.0 * 0.041 - 0.0625)).epsilon(1e-12));
    }
    SUBCASE("kappa zero is deterministic") {
        SVParams params{1e-4, 0.1, 0.0, SVModel::heston};
        CHECK(stationary_moments(params).variance == 0.0);
    }
    SUBCASE("multiplicative moment divergence at kappa^2 = 2 gamma") {
        SVParams params{1e-4, 0.03125, 0.25, SVModel::multiplicative}; // 2g = 0.0625 = kappa^2
        CHECK_THROWS_WITH_AS(stationary_moments(params), doctest::Contains("MomentDivergence"), Error);
    }
}

TEST_CASE("autocovariance theory") {
    const auto m = stationary_moments(kHeston);
    CHECK(autocovariance_theory(kHeston, 0.0) == doctest::Approx(m.variance).epsilon(1e-12));
    CHECK(autocovariance_theory(kHeston, 1.0 / kHeston.gamma) ==
          doctest::Approx(m.variance * std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(autocovariance_theory(kHeston, -1.0), Error);
}

TEST_CASE("long heston path matches the stationary law and correlation decay") {
    const std::size_t steps = 1000000;
    const auto path = simulate(kHeston, kHeston.theta, 0.1, steps, 2024);
    const auto values = std::span<const double>(path.values);
    CHECK(mean(values) == doctest::Approx(kHeston.theta).epsilon(0.02));
    const auto m = stationary_moments(kHeston);
    CHECK(sample_variance(values) == doctest::Approx(m.variance).epsilon(0.05));

    // Empirical autocovariance vs theory at moderate lags (daily sampling).
    const std::size_t per_day = 10;
    std::vector<double> daily;
    for (std::size_t i = 0; i < path.values.size(); i += per_day) daily.push_back(path.values[i]);
    const double daily_mean = mean(daily);
    for (double tau : {5.0, 20.0, 48.0}) {
        const auto lag = static_cast<std::size_t>(tau);
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < daily.size(); ++i) {
            acc += (daily[i] - daily_mean) * (daily[i + lag] - daily_mean);
        }
        const double emp = acc / static_cast<double>(daily.size() - lag);
        CHECK(emp == doctest::Approx(autocovariance_theory(kHeston, tau)).epsilon(0.10));
    }
}

TEST_CASE("var_rv_reduced: value, limits and monotonicity") {
    CHECK(var_rv_reduced(1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(var_rv_reduced(1e-6) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(var_rv_reduced(1e3) == doctest::Approx(2.0 / 1e3).epsilon(2e-3));

    double last = 1.0 + 1e-9;
    for (int k = -60; k <= 60; ++k) {
        const double x = std::pow(10.0, static_cast<double>(k) / 10.0);
        const double value = var_rv_reduced(x);
        CHECK(value > 0.0);
        CHECK(value < 1.0);
        CHECK(value < last);
        last = value;
    }
    CHECK_THROWS_AS(var_rv_reduced(0.0), Error);
}

TEST_CASE("var_rv_theory: small-horizon limit and the factorization identity") {
    for (const auto& params : {kHeston, kMult}) {
        const auto m = stationary_moments(params);
        const double tiny_t = 1e-4 / params.gamma;
        CHECK(var_rv_theory(params, tiny_t) == doctest::Approx(m.variance).epsilon(1e-3));

        // gamma T = 2: value = stationary variance * 0.5 (1 + e^-2).
        const double t2 = 2.0 / params.gamma;
        CHECK(var_rv_theory(params, t2) == doctest::Approx(m.variance * 0.5 * (1.0 + std::exp(-2.0))).epsilon(1e-12));

        for (int k = -3; k <= 3; ++k) {
            const double gt = std::pow(10.0, k);
            const double t = gt / params.gamma;
            CHECK(var_rv_theory(params, t) / m.variance == doctest::Approx(var_rv_reduced(gt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("monte carlo variance of the window mean matches the closed form") {
    const auto outcome = monte_carlo_var_rv(kHeston, 21.0, 0.1, 4000, 99);
    CHECK(outcome.window_mean_variance == doctest::Approx(var_rv_theory(kHeston, 21.0)).epsilon(0.07));
    CHECK(outcome.window_mean_average == doctest::Approx(kHeston.theta).epsilon(0.01));
}

TEST_CASE("monte carlo runs are reproducible for a fixed seed") {
    const auto a = monte_carlo_var_rv(kHeston, 5.0, 0.1, 500, 7);
    const auto b = monte_carlo_var_rv(kHeston, 5.0, 0.1, 500, 7);
    CHECK(a.window_mean_variance == b.window_mean_variance);
    CHECK(a.window_mean_average == b.window_mean_average);
}

TEST_CASE("daily variance proxy squares the returns") {
    const auto returns = returns_from_values({0.01, -0.02, 0.003});
    const auto proxy = daily_variance_proxy(returns);
    CHECK(proxy.window_n() == 1);
    CHECK(proxy.annualization() == 1.0);
    CHECK(proxy.values()[0] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(proxy.values()[1] == doctest::Approx(4e-4).epsilon(1e-12));
}

TEST_CASE("estimate_params round-trips a simulated heston path") {
    // Daily returns built from the simulated variance: r_i = sqrt(v_i) z_i.
    const std::size_t days = 100000;
    const auto path = simulate(kHeston, kHeston.theta, 0.1, days * 10, 314159);
    std::mt19937_64 rng(999);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> returns(days);
    for (std::size_t i = 0; i < days; ++i) {
        returns[i] = std::sqrt(path.values[i * 10]) * z(rng);
    }
    const auto proxy = daily_variance_proxy(returns_from_values(std::move(returns)));
    const auto estimated = estimate_params(proxy, SVModel::heston);
    CHECK(estimated.theta == doctest::Approx(kHeston.theta).epsilon(0.10));
    CHECK(estimated.gamma == doctest::Approx(kHeston.gamma).epsilon(0.10));
    CHECK(estimated.kappa == doctest::Approx(kHeston.kappa).epsilon(0.10));
}

TEST_CASE("estimate_params rejects white noise and short inputs") {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> returns(5000);
    for (auto& r : returns) r = z(rng);
    const auto proxy = daily_variance_proxy(returns_from_values(std::move(returns)));
    CHECK_THROWS_WITH_AS(estimate_params(proxy, SVModel::heston), doctest::Contains("NonPositiveDecay"), Error);

    std::vector<double> few(100, 0.01);
    CHECK_THROWS_WITH_AS(estimate_params(daily_variance_proxy(returns_from_values(std::move(few))), SVModel::heston),
                         doctest::Contains("TooShort"), Error);
}

TEST_CASE("empirical_var_rv on iid returns falls like 1/n") {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> returns(200000);
    for (auto& r : returns) r = z(rng);
    const auto curve = empirical_var_rv(returns_from_values(std::move(returns)), {1, 2, 4, 8, 16, 32});
    std::vector<double> log_n;
    std::vector<double> log_v;
    for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
        log_n.push_back(std::log(curve.horizons[i]));
        log_v.push_back(std::log(curve.values[i]));
    }
    CHECK(ols_fit(log_n, log_v).slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("empirical_var_rv normalization divides by the n=1 point") {
    std::mt19937_64 rng(4243);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> returns(50000);
    for (auto& r : returns) r = z(rng);
    const auto series = returns_from_values(std::move(returns));
    const auto raw = empirical_var_rv(series, {1, 4, 16});
    const auto reduced = empirical_var_rv(series, {1, 4, 16}, true);
    CHECK(reduced.kind == CurveKind::reduced);
    CHECK(reduced.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reduced.values[1] == doctest::Approx(raw.values[1] / raw.values[0]).epsilon(1e-12));
}

TEST_CASE("historic fig-13 branch slopes when fixtures are present") {
    const auto dir = testutil::historic_data_dir();
    if (!dir) {
        MESSAGE("historic fixtures not present; skipping");
        return;
    }
    const auto prices = parse_price_file((*dir / "sp500.csv").string(), ColumnMapping{}).series;
    const auto returns = log_returns(prices);
    const auto curve = empirical_var_rv(returns, {1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233});
    auto slope_of = [&](double lo, double hi) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
            if (curve.horizons[i] < lo || curve.horizons[i] > hi) continue;
            xs.push_back(std::log(curve.horizons[i]));
            ys.push_back(std::log(curve.values[i]));
        }
        return ols_fit(xs, ys).slope;
    };
    CHECK(slope_of(1, 8) == doctest::Approx(-0.0113).epsilon(12.0));   // flat branch, wide tolerance
    CHECK(slope_of(55, 233) == doctest::Approx(-0.992).epsilon(0.25)); // CLT branch
}

TEST_CASE("presets") {
    REQUIRE(sv_preset("heston-sp500").has_value());
    CHECK(sv_preset("heston-sp500")->theta == doctest::Approx(9.81e-5));
    CHECK(sv_preset("heston-sp500")->kappa == doctest::Approx(2.32e-3));
    CHECK(sv_preset("mult-sp500")->kappa == doctest::Approx(0.25));
    CHECK(sv_preset("heston-sp500-daily")->theta == doctest::Approx(1.02e-4));
    CHECK(sv_preset("mult-sp500-daily")->theta == doctest::Approx(1.10e-4));
    CHECK_FALSE(sv_preset("nope").has_value());
    CHECK_FALSE(sv_preset("mult-sp500")->feller());
    CHECK(sv_preset("mult-sp500")->second_moment_finite());
}

TEST_CASE("derive_seed separates path streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 5) != derive_seed(2, 5));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

#include "volstat/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "volstat/stats_util.hpp"

namespace volstat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct SampleStats {
    double mean = 0.0;
    double var_mle = 0.0; // 1/n
    double mean_log = 0.0;
    double mean_inv = 0.0;
    double skew = 0.0;
    double min = 0.0;
    double max = 0.0;
};

SampleStats basic_stats(std::span<const double> sample, bool with_logs) {
    SampleStats s;
    const double n = static_cast<double>(sample.size());
    s.mean = mean(sample);
    s.min = *std::min_element(sample.begin(), sample.end());
    s.max = *std::max_element(sample.begin(), sample.end());
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : sample) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    s.var_mle = m2 / n;
    s.skew = s.var_mle > 0.0 ? (m3 / n) / std::pow(s.var_mle, 1.5) : 0.0;
    if (with_logs) {
        double lg = 0.0;
        double inv = 0.0;
        for (double x : sample) {
            lg += std::log(x);
            inv += 1.0 / x;
        }
        s.mean_log = lg / n;
        s.mean_inv = inv / n;
    }
    return s;
}

void require_support(std::span<const double> sample, Family family) {
    if (!positive_support(family)) return;
    for (double x : sample) {
        if (!(x > 0.0)) {
            throw Error(errc::support_violation,
                        std::string(family_name(family)) + " requires strictly positive data, got " +
                            std::to_string(x));
        }
    }
}

// Solves ln k - digamma(k) = s, the stationarity condition shared by the
// gamma shape (on the data) and the inverse-gamma shape (on reciprocals).
double solve_shape_equation(double s, Family family) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(errc::degenerate_sample, std::string(family_name(family)) + " shape equation needs s > 0");
    }
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        if (std::abs(f) < 1e-13) return k;
        const double fp = 1.0 / k - boost::math::trigamma(k);
        double next = k - f / fp;
        if (!(next > 0.0) || !std::isfinite(next)) next = k / 2.0;
        if (std::abs(next - k) < 1e-14 * k) return next;
        k = next;
    }
    throw Error(errc::non_convergence, std::string(family_name(family)) + " shape iteration stalled (200 iters)");
}

double weibull_shape(std::span<const double> sample, double mean_log_scaled) {
    // Scale-invariant shape equation on data pre-divided by its maximum:
    //   sum(y^k ln y) / sum(y^k) - 1/k - mean(ln y) = 0
    double sd_log = 0.0;
    for (double y : sample) {
        const double d = std::log(y) - mean_log_scaled;
        sd_log += d * d;
    }
    sd_log = std::sqrt(sd_log / static_cast<double>(sample.size()));
    if (!(sd_log > 0.0)) throw Error(errc::degenerate_sample, "weibull needs dispersion in log data");

    double k = (kPi / std::sqrt(6.0)) / sd_log;
    double last_g = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        double sw = 0.0;
        double swl = 0.0;
        double swll = 0.0;
        for (double y : sample) {
            const double w = std::pow(y, k);
            const double l = std::log(y);
            sw += w;
            swl += w * l;
            swll += w * l * l;
        }
        const double a = swl / sw;
        const double g = a - 1.0 / k - mean_log_scaled;
        last_g = g;
        if (std::abs(g) < 1e-13) return k;
        const double gp = (swll * sw - swl * swl) / (sw * sw) + 1.0 / (k * k);
        double next = k - g / gp;
        if (!(next > 0.0) || !std::isfinite(next)) next = k / 2.0;
        if (std::abs(next - k) < 1e-14 * k) return next;
        k = next;
    }
    throw Error(errc::non_convergence,
                "weibull shape iteration stalled (500 iters, residual " + std::to_string(last_g) + ")");
}

// ---------------------------------------------------------------------------
// Quasi-Newton (BFGS) minimizer for the composite-family likelihoods.
// Works on the negative mean log-likelihood in unconstrained coordinates.
// ---------------------------------------------------------------------------

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ValueAndGrad = std::function<double(std::span<const double>, std::span<double>)>;

MinimizeResult minimize_bfgs(ValueAndGrad f, std::vector<double> x0, double grad_tol, int max_iter) {
    const std::size_t d = x0.size();
    std::vector<double> x = std::move(x0);
    std::vector<double> g(d);
    std::vector<double> h(d * d, 0.0); // inverse Hessian approximation
    for (std::size_t i = 0; i < d; ++i) h[i * d + i] = 1.0;

    double fx = f(x, g);
    auto inf_norm = [](std::span<const double> v) {
        double m = 0.0;
        for (double c : v) m = std::max(m, std::abs(c));
        return m;
    };

    MinimizeResult result;
    // Quadrature-backed objectives bottom out near 1e-6; treat a stall below
    // that as converged rather than NonConvergence.
    const double noise_floor = std::max(grad_tol, 1e-6);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double gnorm = inf_norm(g);
        if (gnorm < grad_tol) {
            result = {x, fx, gnorm, iter, true};
            return result;
        }
        std::vector<double> p(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) p[i] -= h[i * d + j] * g[j];
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < d; ++i) slope += p[i] * g[i];
        if (slope >= 0.0) { // reset to steepest descent
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) h[i * d + j] = i == j ? 1.0 : 0.0;
                p[i] = -g[i];
            }
            slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        }

        double step = 1.0;
        std::vector<double> xn(d);
        std::vector<double> gn(d);
        double fn = fx;
        bool improved = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + step * p[i];
            fn = f(xn, gn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            const bool at_floor = gnorm < noise_floor;
            result = {x, fx, gnorm, iter, at_floor};
            return result;
        }

        std::vector<double> s(d);
        std::vector<double> y(d);
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            std::vector<double> hy(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) hy[i] += h[i * d + j] * y[j];
            }
            const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    h[i * d + j] += (sy + yhy) * rho * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        x = std::move(xn);
        g = gn;
        fx = fn;
        result.iterations = iter + 1;
    }
    result.x = x;
    result.value = fx;
    result.grad_norm = inf_norm(g);
    result.converged = result.grad_norm < noise_floor;
    return result;
}

// ---------------------------------------------------------------------------
// Composite-family likelihoods with analytic gradients.
// ---------------------------------------------------------------------------

double inverse_mills(double w) noexcept {
    // phi(w) / Phi(w), stable for very negative w.
    const double log_phi = -0.5 * w * w - 0.5 * std::log(2.0 * kPi);
    return std::exp(log_phi - log_norm_cdf(w));
}

// Negative mean log-likelihood of the exGaussian in (mu, ln sigma, ln tau).
double exg_objective(std::span<const double> sample, std::span<const double> theta, std::span<double> grad) {
    const double mu = theta[0];
    const double sigma = std::exp(theta[1]);
    const double tau = std::exp(theta[2]);
    const double n = static_cast<double>(sample.size());
    double value = 0.0;
    double d_mu = 0.0;
    double d_sigma = 0.0;
    double d_tau = 0.0;
    const double c = sigma / tau;
    for (double x : sample) {
        const double z = (x - mu) / sigma;
        const double w = z - c;
        value += -std::log(tau) + 0.5 * c * c - z * c + log_norm_cdf(w);
        const double r = inverse_mills(w);
        // d/dz and d/dc of the per-point log density
        const double dldz = -c + r;
        const double dldc = c - z - r;
        d_mu += dldz * (-1.0 / sigma);
        d_sigma += dldz * (-z / sigma) + dldc / tau;
        d_tau += -1.0 / tau + dldc * (-sigma / (tau * tau));
    }
    grad[0] = -d_mu / n;
    grad[1] = -d_sigma / n * sigma; // chain rule through ln sigma
    grad[2] = -d_tau / n * tau;
    return -value / n;
}

struct ProductGradient {
    double log_pdf;
    double d_shape;
    double d_scale;
};

// log-density of x = r^2 under the mixture and its parameter gradient,
// all three integrals evaluated with the same quadrature.
ProductGradient product_log_pdf_grad(Family family, double shape, double scale, double x, double tolerance) {
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    const bool is_gamma = family == Family::gamma_product;
    const double digamma_shape = boost::math::digamma(shape);

    auto weight = [&](double v) {
        if (is_gamma) {
            return std::exp((shape - 1.0) * std::log(v) - v / scale - std::lgamma(shape) - shape * std::log(scale));
        }
        return std::exp(shape * std::log(scale) - (shape + 1.0) * std::log(v) - scale / v - std::lgamma(shape));
    };
    auto chi = [&](double v) { return std::exp(-0.5 * x / v) / std::sqrt(2.0 * kPi * x * v); };

    double err = 0.0;
    const double f = integrator.integrate([&](double v) { return weight(v) * chi(v); }, tolerance, &err);
    if (!std::isfinite(f) || f <= 0.0) {
        return {-746.0, 0.0, 0.0}; // effectively log(0); far outside any optimum
    }
    double g_shape;
    double g_scale;
    if (is_gamma) {
        g_shape = integrator.integrate(
            [&](double v) { return weight(v) * chi(v) * (std::log(v / scale) - digamma_shape); }, tolerance, &err);
        g_scale = integrator.integrate(
            [&](double v) { return weight(v) * chi(v) * (v / scale - shape) / scale; }, tolerance, &err);
    } else {
        g_shape = integrator.integrate(
            [&](double v) { return weight(v) * chi(v) * (std::log(scale / v) - digamma_shape); }, tolerance, &err);
        g_scale = integrator.integrate(
            [&](double v) { return weight(v) * chi(v) * (shape / scale - 1.0 / v); }, tolerance, &err);
    }
    return {std::log(f), g_shape / f, g_scale / f};
}

double product_objective(Family family, std::span<const double> sample, std::span<const double> theta,
                         std::span<double> grad) {
    const double shape = std::exp(theta[0]);
    const double scale = std::exp(theta[1]);
    const double n = static_cast<double>(sample.size());
    double value = 0.0;
    double d_shape = 0.0;
    double d_scale = 0.0;
    for (double x : sample) {
        const auto part = product_log_pdf_grad(family, shape, scale, x, 1e-9);
        value += part.log_pdf;
        d_shape += part.d_shape;
        d_scale += part.d_scale;
    }
    grad[0] = -d_shape / n * shape;
    grad[1] = -d_scale / n * scale;
    return -value / n;
}

// Moment-matched parameters of the mixing law from the sample mean and
// variance of x = r^2: E[x] = E[v], var(x) = 3 E[v^2] - E[v]^2.
std::vector<double> product_moment_params(Family family, const SampleStats& stats) {
    const double m = stats.mean;
    const double q = stats.var_mle / (m * m);
    if (family == Family::gamma_product) {
        // var(x)/m^2 = (2k + 3)/k
        const double k = q > 2.05 ? 3.0 / (q - 2.0) : 30.0;
        return {k, m / k};
    }
    // var(x)/m^2 = (2a - 1)/(a - 2)
    const double a = q > 2.05 ? (2.0 * q - 1.0) / (q - 2.0) : 30.0;
    return {a, m * (a - 1.0)};
}

std::vector<double> exg_moment_params(const SampleStats& stats) {
    const double sd = std::sqrt(stats.var_mle);
    const double skew = std::clamp(stats.skew, 0.01, 1.9);
    double tau = sd * std::cbrt(0.5 * skew);
    tau = std::min(tau, 0.95 * sd);
    const double sigma = std::sqrt(std::max(stats.var_mle - tau * tau, 1e-12 * stats.var_mle));
    return {stats.mean - tau, sigma, tau};
}

FitResult fit_composite(std::span<const double> sample, Family family, const SampleStats& stats) {
    std::vector<double> init;
    ValueAndGrad objective;
    if (family == Family::ex_gaussian) {
        const auto p = exg_moment_params(stats);
        init = {p[0], std::log(p[1]), std::log(p[2])};
        objective = [sample](std::span<const double> theta, std::span<double> grad) {
            return exg_objective(sample, theta, grad);
        };
    } else {
        const auto p = product_moment_params(family, stats);
        init = {std::log(p[0]), std::log(p[1])};
        objective = [sample, family](std::span<const double> theta, std::span<double> grad) {
            return product_objective(family, sample, theta, grad);
        };
    }

    const auto outcome = minimize_bfgs(objective, init, 1e-8, 500);

    FitResult fit;
    fit.family = family;
    fit.n = sample.size();
    if (outcome.converged) {
        if (family == Family::ex_gaussian) {
            fit.params = {outcome.x[0], std::exp(outcome.x[1]), std::exp(outcome.x[2])};
        } else {
            fit.params = {std::exp(outcome.x[0]), std::exp(outcome.x[1])};
        }
    } else {
        // Documented fallback: keep the moment-matched parameters, flagged.
        fit.params = family == Family::ex_gaussian ? exg_moment_params(stats) : product_moment_params(family, stats);
        fit.moment_matched = true;
    }
    fit.log_likelihood = log_likelihood(family, fit.params, sample);
    fit.ks = ks_one_sample(sample, family, fit.params);
    return fit;
}

} // namespace

FitResult fit_mle(std::span<const double> sample, Family family) {
    if (sample.size() < 10) {
        throw Error(errc::too_short, "need at least 10 points to fit, got " + std::to_string(sample.size()));
    }
    require_support(sample, family);
    const auto stats = basic_stats(sample, positive_support(family));
    if (stats.min == stats.max) {
        throw Error(errc::degenerate_sample, std::string(family_name(family)) + " fit on a constant sample");
    }

    FitResult fit;
    fit.family = family;
    fit.n = sample.size();
    switch (family) {
        case Family::normal:
            fit.params = {stats.mean, std::sqrt(stats.var_mle)};
            break;
        case Family::log_normal: {
            double acc = 0.0;
            for (double x : sample) {
                const double d = std::log(x) - stats.mean_log;
                acc += d * d;
            }
            fit.params = {stats.mean_log, std::sqrt(acc / static_cast<double>(sample.size()))};
            break;
        }
        case Family::gamma: {
            const double s = std::log(stats.mean) - stats.mean_log;
            const double k = solve_shape_equation(s, family);
            fit.params = {k, stats.mean / k};
            break;
        }
        case Family::inverse_gamma: {
            // Profile equation in the shape is the gamma one with the roles of
            // x and 1/x swapped: s' = ln(mean(1/x)) + mean(ln x).
            const double s = std::log(stats.mean_inv) + stats.mean_log;
            const double alpha = solve_shape_equation(s, family);
            fit.params = {alpha, alpha / stats.mean_inv};
            break;
        }
        case Family::weibull: {
            const double top = stats.max;
            std::vector<double> scaled(sample.begin(), sample.end());
            for (auto& y : scaled) y /= top;
            const double mean_log_scaled = stats.mean_log - std::log(top);
            const double k = weibull_shape(scaled, mean_log_scaled);
            double mean_pow = 0.0;
            for (double y : scaled) mean_pow += std::pow(y, k);
            mean_pow /= static_cast<double>(sample.size());
            fit.params = {top * std::pow(mean_pow, 1.0 / k), k};
            break;
        }
        case Family::inverse_gaussian: {
            const double inv_lambda = stats.mean_inv - 1.0 / stats.mean;
            if (!(inv_lambda > 0.0)) {
                throw Error(errc::degenerate_sample, "inverse-gaussian fit needs mean(1/x) > 1/mean(x)");
            }
            fit.params = {stats.mean, 1.0 / inv_lambda};
            break;
        }
        case Family::ex_gaussian:
        case Family::gamma_product:
        case Family::inverse_gamma_product:
            return fit_composite(sample, family, stats);
    }
    fit.log_likelihood = log_likelihood(family, fit.params, sample);
    fit.ks = ks_one_sample(sample, family, fit.params);
    return fit;
}

double ks_one_sample(std::span<const double> sample, Family family, std::span<const double> params) {
    if (sample.empty()) throw Error(errc::empty_sample, "KS of empty sample");
    if (!params_in_domain(family, params)) {
        throw Error(errc::support_violation, std::string(family_name(family)) + " parameters out of domain");
    }
    require_support(sample, family);
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(family, params, sorted[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(errc::empty_sample, "KS needs two non-empty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return std::max(d, std::abs(1.0 - static_cast<double>(j) / nb));
}

FitRanking rank_families(std::span<const double> sample, std::span<const Family> families) {
    if (families.empty()) throw Error(errc::bad_config, "no families requested");
    FitRanking ranking;
    for (Family family : families) {
        try {
            ranking.results.push_back(fit_mle(sample, family));
        } catch (const Error& e) {
            ranking.skipped.push_back({family, e.what()});
        }
    }
    if (ranking.results.empty()) {
        throw Error(errc::non_convergence, "every family failed; first: " + ranking.skipped.front().reason);
    }
    std::stable_sort(ranking.results.begin(), ranking.results.end(), [](const FitResult& x, const FitResult& y) {
        if (x.ks != y.ks) return x.ks < y.ks;
        return x.log_likelihood > y.log_likelihood;
    });
    return ranking;
}

} // namespace volstat

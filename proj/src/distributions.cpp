#include "volstat/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace volstat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640561764;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double norm_pdf(double z) noexcept { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double norm_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Density of r^2 given the mixing variance v: r | v ~ N(0, v), so
// r^2 | v is v * chi^2_1 with density exp(-x/2v) / sqrt(2 pi x v).
double chi1_scaled_pdf(double x, double v) noexcept {
    return std::exp(-0.5 * x / v) / std::sqrt(2.0 * kPi * x * v);
}

double gamma_pdf(double x, double shape, double scale) noexcept {
    if (x <= 0.0) return 0.0;
    const double log_pdf = (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
    return std::exp(log_pdf);
}

double inverse_gamma_pdf(double x, double shape, double scale) noexcept {
    if (x <= 0.0) return 0.0;
    const double log_pdf = shape * std::log(scale) - (shape + 1.0) * std::log(x) - scale / x - std::lgamma(shape);
    return std::exp(log_pdf);
}

enum class ProductKind { gamma, inverse_gamma };

double product_integral(ProductKind kind, double shape, double scale, double x, double tolerance, bool cumulative) {
    // One-dimensional mixture integral over the variance v in (0, inf).
    auto integrand = [&](double v) {
        const double weight = kind == ProductKind::gamma ? gamma_pdf(v, shape, scale) : inverse_gamma_pdf(v, shape, scale);
        if (weight == 0.0) return 0.0;
        if (cumulative) return weight * std::erf(std::sqrt(0.5 * x / v));
        return weight * chi1_scaled_pdf(x, v);
    };
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    const double value = integrator.integrate(integrand, tolerance, &error, &l1);
    if (!std::isfinite(value) || (l1 > 0.0 && error > 100.0 * tolerance)) {
        throw Error(errc::integration_failure, std::string(family_name(kind == ProductKind::gamma
                                                                           ? Family::gamma_product
                                                                           : Family::inverse_gamma_product)) +
                                                   " quadrature error " + std::to_string(error) + " at x=" +
                                                   std::to_string(x));
    }
    return value;
}

struct ExGaussianParts {
    double z; // (x - mu) / sigma
    double c; // sigma / tau
};

ExGaussianParts exg_parts(std::span<const double> p, double x) noexcept {
    return {(x - p[0]) / p[1], p[1] / p[2]};
}

} // namespace

double log_norm_cdf(double z) noexcept {
    if (z > -37.0) {
        return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
    }
    // Asymptotic expansion of the lower tail.
    const double z2 = z * z;
    return -0.5 * z2 - std::log(-z) - kLnSqrt2Pi + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

const char* family_name(Family family) noexcept {
    switch (family) {
        case Family::normal: return "normal";
        case Family::log_normal: return "lognormal";
        case Family::inverse_gamma: return "inverse-gamma";
        case Family::gamma: return "gamma";
        case Family::weibull: return "weibull";
        case Family::inverse_gaussian: return "inverse-gaussian";
        case Family::ex_gaussian: return "exgaussian";
        case Family::gamma_product: return "gamma-product";
        case Family::inverse_gamma_product: return "inverse-gamma-product";
    }
    return "?";
}

const char* family_label(Family family) noexcept {
    switch (family) {
        case Family::normal: return "N";
        case Family::log_normal: return "LN";
        case Family::inverse_gamma: return "IGa";
        case Family::gamma: return "Gamma";
        case Family::weibull: return "Weibull";
        case Family::inverse_gaussian: return "IG";
        case Family::ex_gaussian: return "ExGa";
        case Family::gamma_product: return "GaPD";
        case Family::inverse_gamma_product: return "IGaPD";
    }
    return "?";
}

std::optional<Family> family_from_name(std::string_view name) noexcept {
    for (Family f : {Family::normal, Family::log_normal, Family::inverse_gamma, Family::gamma, Family::weibull,
                     Family::inverse_gaussian, Family::ex_gaussian, Family::gamma_product,
                     Family::inverse_gamma_product}) {
        if (name == family_name(f) || name == family_label(f)) return f;
    }
    return std::nullopt;
}

std::size_t param_count(Family family) noexcept { return family == Family::ex_gaussian ? 3 : 2; }

bool params_in_domain(Family family, std::span<const double> params) noexcept {
    if (params.size() != param_count(family)) return false;
    for (double p : params) {
        if (!std::isfinite(p)) return false;
    }
    switch (family) {
        case Family::normal:
        case Family::log_normal:
            return params[1] > 0.0;
        case Family::ex_gaussian:
            return params[1] > 0.0 && params[2] > 0.0;
        default:
            return params[0] > 0.0 && params[1] > 0.0;
    }
}

bool positive_support(Family family) noexcept {
    switch (family) {
        case Family::normal:
        case Family::ex_gaussian:
            return false;
        default:
            return true;
    }
}

bool in_support(Family family, double x) noexcept {
    if (!std::isfinite(x)) return false;
    return positive_support(family) ? x > 0.0 : true;
}

double log_pdf(Family family, std::span<const double> params, double x) {
    if (!params_in_domain(family, params)) {
        throw Error(errc::support_violation, std::string(family_name(family)) + " parameters out of domain");
    }
    if (!in_support(family, x)) return kNegInf;
    switch (family) {
        case Family::normal: {
            const double z = (x - params[0]) / params[1];
            return -0.5 * z * z - std::log(params[1]) - kLnSqrt2Pi;
        }
        case Family::log_normal: {
            const double z = (std::log(x) - params[0]) / params[1];
            return -0.5 * z * z - std::log(x * params[1]) - kLnSqrt2Pi;
        }
        case Family::gamma: {
            const double k = params[0];
            const double s = params[1];
            return (k - 1.0) * std::log(x) - x / s - std::lgamma(k) - k * std::log(s);
        }
        case Family::inverse_gamma: {
            const double a = params[0];
            const double b = params[1];
            return a * std::log(b) - (a + 1.0) * std::log(x) - b / x - std::lgamma(a);
        }
        case Family::weibull: {
            const double lambda = params[0];
            const double k = params[1];
            const double t = x / lambda;
            return std::log(k / lambda) + (k - 1.0) * std::log(t) - std::pow(t, k);
        }
        case Family::inverse_gaussian: {
            const double mu = params[0];
            const double lambda = params[1];
            const double d = x - mu;
            return 0.5 * std::log(lambda / (2.0 * kPi * x * x * x)) - lambda * d * d / (2.0 * mu * mu * x);
        }
        case Family::ex_gaussian: {
            const auto [z, c] = exg_parts(params, x);
            return -std::log(params[2]) + 0.5 * c * c - z * c + log_norm_cdf(z - c);
        }
        case Family::gamma_product:
        case Family::inverse_gamma_product: {
            const double density = pdf_composite(family, params, x);
            return density > 0.0 ? std::log(density) : kNegInf;
        }
    }
    return kNegInf;
}

double pdf(Family family, std::span<const double> params, double x) {
    switch (family) {
        case Family::gamma_product:
        case Family::inverse_gamma_product:
            if (!params_in_domain(family, params)) {
                throw Error(errc::support_violation, std::string(family_name(family)) + " parameters out of domain");
            }
            return in_support(family, x) ? pdf_composite(family, params, x) : 0.0;
        default: {
            const double lp = log_pdf(family, params, x);
            return lp == kNegInf ? 0.0 : std::exp(lp);
        }
    }
}

double cdf(Family family, std::span<const double> params, double x) {
    if (!params_in_domain(family, params)) {
        throw Error(errc::support_violation, std::string(family_name(family)) + " parameters out of domain");
    }
    if (positive_support(family) && x <= 0.0) return 0.0;
    switch (family) {
        case Family::normal:
            return norm_cdf((x - params[0]) / params[1]);
        case Family::log_normal:
            return norm_cdf((std::log(x) - params[0]) / params[1]);
        case Family::gamma:
            return boost::math::gamma_p(params[0], x / params[1]);
        case Family::inverse_gamma:
            return boost::math::gamma_q(params[0], params[1] / x);
        case Family::weibull:
            return -std::expm1(-std::pow(x / params[0], params[1]));
        case Family::inverse_gaussian: {
            const double mu = params[0];
            const double lambda = params[1];
            const double s = std::sqrt(lambda / x);
            const double first = norm_cdf(s * (x / mu - 1.0));
            const double second = std::exp(2.0 * lambda / mu + log_norm_cdf(-s * (x / mu + 1.0)));
            return std::min(1.0, first + second);
        }
        case Family::ex_gaussian: {
            const auto [z, c] = exg_parts(params, x);
            const double value = norm_cdf(z) - std::exp(0.5 * c * c - z * c + log_norm_cdf(z - c));
            return std::clamp(value, 0.0, 1.0);
        }
        case Family::gamma_product:
            return std::clamp(product_integral(ProductKind::gamma, params[0], params[1], x, 1e-10, true), 0.0, 1.0);
        case Family::inverse_gamma_product:
            return std::clamp(product_integral(ProductKind::inverse_gamma, params[0], params[1], x, 1e-10, true), 0.0,
                              1.0);
    }
    return 0.0;
}

double pdf_composite(Family family, std::span<const double> params, double x, double tolerance) {
    if (!params_in_domain(family, params)) {
        throw Error(errc::support_violation, std::string(family_name(family)) + " parameters out of domain");
    }
    switch (family) {
        case Family::ex_gaussian: {
            const auto [z, c] = exg_parts(params, x);
            return std::exp(-std::log(params[2]) + 0.5 * c * c - z * c + log_norm_cdf(z - c));
        }
        case Family::gamma_product:
            return product_integral(ProductKind::gamma, params[0], params[1], x, tolerance, false);
        case Family::inverse_gamma_product:
            return product_integral(ProductKind::inverse_gamma, params[0], params[1], x, tolerance, false);
        default:
            throw Error(errc::bad_config, std::string(family_name(family)) + " is not a composite family");
    }
}

double log_likelihood(Family family, std::span<const double> params, std::span<const double> sample) {
    if (sample.empty()) throw Error(errc::empty_sample, "log-likelihood of empty sample");
    for (double x : sample) {
        if (!in_support(family, x)) {
            throw Error(errc::support_violation,
                        std::string(family_name(family)) + " does not support x=" + std::to_string(x));
        }
    }
    double acc = 0.0;
    for (double x : sample) {
        const double lp = log_pdf(family, params, x);
        if (lp == kNegInf) return kNegInf;
        acc += lp;
    }
    return acc;
}

} // namespace volstat

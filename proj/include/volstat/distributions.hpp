#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volstat/errors.hpp"

namespace volstat {

// Candidate distribution families. The first six are the core single/two
// parameter families; the last three are composites used for n-day mean
// squared returns: exGaussian (normal (+) exponential convolution) and the
// laws of r^2 where r = sqrt(v) * z with z standard normal and v gamma or
// inverse-gamma distributed.
enum class Family {
    normal,
    log_normal,
    inverse_gamma,
    gamma,
    weibull,
    inverse_gaussian,
    ex_gaussian,
    gamma_product,
    inverse_gamma_product,
};

inline constexpr Family kCoreFamilies[] = {
    Family::normal,  Family::log_normal, Family::inverse_gamma,
    Family::gamma,   Family::weibull,    Family::inverse_gaussian,
};

const char* family_name(Family family) noexcept;
// Short table label: N, LN, IGa, Gamma, Weibull, IG, ExGa, GaPD, IGaPD.
const char* family_label(Family family) noexcept;
std::optional<Family> family_from_name(std::string_view name) noexcept;

// Parameterizations:
//   normal(mu, sigma)            log_normal(mu, sigma) of ln x
//   gamma(shape k, scale s)      inverse_gamma(shape alpha, scale beta)
//   weibull(scale lambda, shape k)
//   inverse_gaussian(mean mu, shape lambda)
//   ex_gaussian(mu, sigma, tau)
//   gamma_product(shape, scale) / inverse_gamma_product(shape, scale)
//   of the mixing variance v.
std::size_t param_count(Family family) noexcept;
bool params_in_domain(Family family, std::span<const double> params) noexcept;
// Whether x lies in the family's support.
bool in_support(Family family, double x) noexcept;
// True when the family's support is (0, inf).
bool positive_support(Family family) noexcept;

double pdf(Family family, std::span<const double> params, double x);
double cdf(Family family, std::span<const double> params, double x);
double log_pdf(Family family, std::span<const double> params, double x);
double log_likelihood(Family family, std::span<const double> params, std::span<const double> sample);

// Density of the composite families only (exGaussian by closed form, the
// product families by adaptive quadrature over the mixing variance).
// Throws IntegrationFailure when the quadrature cannot reach `tolerance`.
double pdf_composite(Family family, std::span<const double> params, double x, double tolerance = 1e-9);

// ln Phi(z), stable for arbitrarily negative z.
double log_norm_cdf(double z) noexcept;

} // namespace volstat

#pragma once

#include <random>
#include <span>
#include <vector>

#include "volstat/distributions.hpp"

namespace testutil {

// Seeded draws from each family; the sampling routes are independent of the
// library's pdf/cdf code so fits can be checked against known parameters.
inline std::vector<double> draw(volstat::Family family, std::span<const double> p, std::size_t n,
                                std::mt19937_64& rng) {
    using volstat::Family;
    std::vector<double> out(n);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (family) {
        case Family::normal: {
            std::normal_distribution<double> d(p[0], p[1]);
            for (auto& x : out) x = d(rng);
            break;
        }
        case Family::log_normal: {
            std::lognormal_distribution<double> d(p[0], p[1]);
            for (auto& x : out) x = d(rng);
            break;
        }
        case Family::gamma: {
            std::gamma_distribution<double> d(p[0], p[1]);
            for (auto& x : out) x = d(rng);
            break;
        }
        case Family::inverse_gamma: {
            std::gamma_distribution<double> d(p[0], 1.0 / p[1]);
            for (auto& x : out) x = 1.0 / d(rng);
            break;
        }
        case Family::weibull: {
            std::weibull_distribution<double> d(p[1], p[0]); // (shape, scale)
            for (auto& x : out) x = d(rng);
            break;
        }
        case Family::inverse_gaussian: {
            // Michael-Schucany-Haas transformation.
            const double mu = p[0];
            const double lambda = p[1];
            for (auto& x : out) {
                const double nu = z(rng);
                const double y = nu * nu;
                const double w = mu + mu * mu * y / (2.0 * lambda) -
                                 mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
                x = u(rng) <= mu / (mu + w) ? w : mu * mu / w;
            }
            break;
        }
        case Family::ex_gaussian: {
            std::normal_distribution<double> d(p[0], p[1]);
            std::exponential_distribution<double> e(1.0 / p[2]);
            for (auto& x : out) x = d(rng) + e(rng);
            break;
        }
        case Family::gamma_product: {
            std::gamma_distribution<double> d(p[0], p[1]);
            for (auto& x : out) {
                const double zz = z(rng);
                x = d(rng) * zz * zz;
            }
            break;
        }
        case Family::inverse_gamma_product: {
            std::gamma_distribution<double> d(p[0], 1.0 / p[1]);
            for (auto& x : out) {
                const double zz = z(rng);
                x = zz * zz / d(rng);
            }
            break;
        }
    }
    return out;
}

} // namespace testutil

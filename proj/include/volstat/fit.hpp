#pragma once

#include <span>
#include <string>
#include <vector>

#include "volstat/distributions.hpp"

namespace volstat {

struct FitResult {
    Family family = Family::normal;
    std::vector<double> params;
    double log_likelihood = 0.0; // summed over the sample
    double ks = 0.0;
    std::size_t n = 0;
    // Set when the quadrature-likelihood optimizer for a composite family
    // did not converge and the parameters are moment-matched instead.
    bool moment_matched = false;
};

// Maximum-likelihood fit. Closed forms where they exist (normal, lognormal,
// inverse Gaussian); profile-likelihood Newton for gamma, inverse gamma and
// Weibull; quasi-Newton on the quadrature likelihood for the composites.
// Errors: SupportViolation, DegenerateSample, NonConvergence.
FitResult fit_mle(std::span<const double> sample, Family family);

// sup |ECDF - F| via max_i of max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
double ks_one_sample(std::span<const double> sample, Family family, std::span<const double> params);

// sup distance between two empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct SkippedFamily {
    Family family;
    std::string reason;
};

struct FitRanking {
    std::vector<FitResult> results; // ascending ks, ties broken by higher log-likelihood
    std::vector<SkippedFamily> skipped;
};

// Fits every requested family on the same sample; per-family failures are
// collected as skips, and only a full wipe-out throws.
FitRanking rank_families(std::span<const double> sample, std::span<const Family> families);

} // namespace volstat

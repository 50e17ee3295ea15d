#include "volstat/errors.hpp"

namespace volstat {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::malformed_row: return "MalformedRow";
        case errc::non_positive_price: return "NonPositivePrice";
        case errc::negative_level: return "NegativeLevel";
        case errc::duplicate_date: return "DuplicateDate";
        case errc::empty_input: return "EmptyInput";
        case errc::empty_intersection: return "EmptyIntersection";
        case errc::too_short: return "TooShort";
        case errc::empty_overlap: return "EmptyOverlap";
        case errc::zero_denominator_mean: return "ZeroDenominatorMean";
        case errc::non_positive_ratio: return "NonPositiveRatio";
        case errc::slope_undefined: return "SlopeUndefined";
        case errc::no_strike_below_forward: return "NoStrikeBelowForward";
        case errc::empty_chain: return "EmptyChain";
        case errc::too_few_strikes: return "TooFewStrikes";
        case errc::invalid_bracket: return "InvalidBracket";
        case errc::support_violation: return "SupportViolation";
        case errc::non_convergence: return "NonConvergence";
        case errc::degenerate_sample: return "DegenerateSample";
        case errc::integration_failure: return "IntegrationFailure";
        case errc::empty_sample: return "EmptySample";
        case errc::invalid_step: return "InvalidStep";
        case errc::moment_divergence: return "MomentDivergence";
        case errc::non_positive_decay: return "NonPositiveDecay";
        case errc::io_error: return "IoError";
        case errc::bad_config: return "BadConfig";
    }
    return "UnknownError";
}

} // namespace volstat

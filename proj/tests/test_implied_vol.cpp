#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "support/black_scholes.hpp"
#include "volstat/implied_vol.hpp"

using namespace volstat;

namespace {

OptionChainSnapshot single_strike_chain(double forward) {
    std::vector<OptionQuote> quotes{
        {100.0, OptionRight::put, 1.0, 1.0},
        {100.0, OptionRight::call, 1.0, 1.0},
    };
    return OptionChainSnapshot(30.0 / 365.0, forward, 0.0, std::move(quotes));
}

// Flat-volatility synthetic chain: puts below the forward, calls above,
// both rights at every strike, priced by Black-76 with zero spread.
OptionChainSnapshot flat_vol_chain(double forward, double sigma, double t_years, double rate, int strike_count,
                                   double sd_span = 5.0) {
    const double sd = sigma * std::sqrt(t_years);
    const double lo = forward * std::exp(-sd_span * sd);
    const double hi = forward * std::exp(sd_span * sd);
    std::vector<OptionQuote> quotes;
    for (int i = 0; i < strike_count; ++i) {
        const double k = lo + (hi - lo) * i / (strike_count - 1);
        const double put = testutil::black_put(forward, k, sigma, t_years, rate);
        const double call = testutil::black_call(forward, k, sigma, t_years, rate);
        quotes.push_back({k, OptionRight::put, put, put});
        quotes.push_back({k, OptionRight::call, call, call});
    }
    return OptionChainSnapshot(t_years, forward, rate, std::move(quotes));
}

} // namespace

TEST_CASE("select_k0 picks the largest strike at or below the forward") {
    std::vector<OptionQuote> quotes{
        {95.0, OptionRight::put, 1.0, 1.2},
        {100.0, OptionRight::put, 2.0, 2.2},
        {105.0, OptionRight::call, 1.5, 1.7},
    };
    SUBCASE("strictly between strikes") {
        OptionChainSnapshot chain(0.1, 101.0, 0.0, quotes);
        CHECK(select_k0(chain) == 100.0);
    }
    SUBCASE("forward exactly on a strike") {
        OptionChainSnapshot chain(0.1, 100.0, 0.0, quotes);
        CHECK(select_k0(chain) == 100.0);
    }
    SUBCASE("forward below the lowest strike") {
        OptionChainSnapshot chain(0.1, 90.0, 0.0, quotes);
        CHECK_THROWS_WITH_AS(select_k0(chain), doctest::Contains("NoStrikeBelowForward"), Error);
    }
}

TEST_CASE("strike spacing: interior halves the bracket, ends are one-sided") {
    const std::vector<double> strikes{90.0, 100.0, 105.0};
    CHECK(strike_spacing(strikes, 1) == doctest::Approx(7.5));
    CHECK(strike_spacing(strikes, 0) == doctest::Approx(10.0));
    CHECK(strike_spacing(strikes, 2) == doctest::Approx(5.0));
    CHECK_THROWS_WITH_AS(strike_spacing(std::vector<double>{100.0}, 0), doctest::Contains("TooFewStrikes"), Error);

    std::vector<double> uniform;
    for (int i = 0; i < 12; ++i) uniform.push_back(50.0 + 2.5 * i);
    for (std::size_t i = 0; i < uniform.size(); ++i) {
        CHECK(strike_spacing(uniform, i) == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("single-strike chain reproduces the hand-computed variance") {
    // 100^2 * (2 * 365/30) * (1/100^2) * 1 = 24.3333..., no forward term.
    const auto at_forward = implied_variance(single_strike_chain(100.0));
    CHECK(at_forward.variance == doctest::Approx(2.0 * 365.0 / 30.0).epsilon(1e-12));
    CHECK(at_forward.k0 == 100.0);
    CHECK(at_forward.forward_correction == 0.0);
    REQUIRE(at_forward.contributions.size() == 1);
    CHECK(at_forward.contributions[0].delta_k == 1.0);
    CHECK(at_forward.contributions[0].quote_mid == doctest::Approx(1.0));

    // Forward 1% above K0 subtracts 100^2 * (365/30) * 0.01^2 = 12.1667.
    const auto offset = implied_variance(single_strike_chain(101.0));
    const double correction = 1e4 * (365.0 / 30.0) * 0.01 * 0.01;
    CHECK(correction == doctest::Approx(12.166666666666666).epsilon(1e-12));
    CHECK(offset.variance == doctest::Approx(2.0 * 365.0 / 30.0 - correction).epsilon(1e-10));
}

TEST_CASE("flat Black-Scholes chain recovers the input variance within 3%") {
    const double sigma = 0.2;
    const auto chain = flat_vol_chain(2000.0, sigma, 30.0 / 365.0, 0.0, 20);
    const auto result = implied_variance(chain);
    CHECK(result.variance == doctest::Approx(1e4 * sigma * sigma).epsilon(0.03));
}

TEST_CASE("nonzero rate: discounted quotes are grown back by exp(RT)") {
    const double sigma = 0.25;
    const double rate = 0.03;
    const auto chain = flat_vol_chain(1500.0, sigma, 45.0 / 365.0, rate, 40);
    const auto result = implied_variance(chain);
    CHECK(result.variance == doctest::Approx(1e4 * sigma * sigma).epsilon(0.03));
}

TEST_CASE("strike-scaling invariance") {
    const auto base = flat_vol_chain(2000.0, 0.2, 30.0 / 365.0, 0.0, 24);
    const double c = 3.7;
    std::vector<OptionQuote> scaled;
    for (auto quote : base.quotes()) {
        quote.strike *= c;
        quote.bid *= c;
        quote.ask *= c;
        scaled.push_back(quote);
    }
    OptionChainSnapshot chain(base.expiry_years(), base.forward() * c, base.rate(), std::move(scaled));
    const auto a = implied_variance(base);
    const auto b = implied_variance(chain);
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-10));
}

TEST_CASE("dropping the deepest out-of-money strike lowers the variance") {
    const auto base = flat_vol_chain(2000.0, 0.2, 30.0 / 365.0, 0.0, 24);
    const auto full = implied_variance(base);
    std::vector<OptionQuote> trimmed(base.quotes().begin() + 2, base.quotes().end()); // drop lowest strike
    OptionChainSnapshot chain(base.expiry_years(), base.forward(), base.rate(), std::move(trimmed));
    const auto less = implied_variance(chain);
    CHECK(less.variance < full.variance);
    for (const auto& c : full.contributions) CHECK(c.term_value >= 0.0);
}

TEST_CASE("contributions reproduce the variance identity") {
    const auto chain = flat_vol_chain(1200.0, 0.3, 21.0 / 365.0, 0.01, 30);
    const auto result = implied_variance(chain);
    double sum = 0.0;
    for (const auto& c : result.contributions) {
        CHECK(c.term_value ==
              doctest::Approx(c.delta_k / (c.strike * c.strike) * std::exp(chain.rate() * chain.expiry_years()) *
                              c.quote_mid)
                  .epsilon(1e-12));
        sum += c.term_value;
    }
    const double reassembled = 1e4 * (2.0 / chain.expiry_years() * sum - result.forward_correction);
    CHECK(result.variance == doctest::Approx(reassembled).epsilon(1e-12));
}

TEST_CASE("zero-bid handling: skips and truncation") {
    // Puts at 80 and 75 have zero bids (consecutive): 70 must be cut off even
    // though it has a live bid. The lone zero bid at 90 is just skipped.
    std::vector<OptionQuote> quotes{
        {70.0, OptionRight::put, 0.4, 0.5},  {75.0, OptionRight::put, 0.0, 0.1}, {80.0, OptionRight::put, 0.0, 0.1},
        {85.0, OptionRight::put, 0.5, 0.6},  {90.0, OptionRight::put, 0.0, 0.2}, {95.0, OptionRight::put, 0.9, 1.1},
        {100.0, OptionRight::put, 2.0, 2.2}, {100.0, OptionRight::call, 2.0, 2.2},
        {105.0, OptionRight::call, 0.8, 1.0},
    };
    OptionChainSnapshot chain(30.0 / 365.0, 100.5, 0.0, std::move(quotes));
    const auto result = implied_variance(chain);
    std::vector<double> used;
    for (const auto& c : result.contributions) used.push_back(c.strike);
    CHECK(used == std::vector<double>{85.0, 95.0, 100.0, 105.0});
    REQUIRE(result.excluded.size() == 4);
    bool saw_run = false;
    for (const auto& e : result.excluded) {
        if (e.strike == 70.0) {
            CHECK(e.reason == "zero-bid-run");
            saw_run = true;
        }
    }
    CHECK(saw_run);
}

TEST_CASE("duplicate strikes per right are rejected at construction") {
    std::vector<OptionQuote> quotes{
        {100.0, OptionRight::put, 1.0, 1.1},
        {100.0, OptionRight::put, 1.0, 1.2},
    };
    CHECK_THROWS_WITH_AS(OptionChainSnapshot(0.1, 100.0, 0.0, std::move(quotes)), doctest::Contains("duplicate"),
                         Error);
}

TEST_CASE("chain invariants") {
    CHECK_THROWS_AS(OptionChainSnapshot(0.0, 100.0, 0.0, {{100.0, OptionRight::put, 1.0, 1.1}}), Error);
    CHECK_THROWS_AS(OptionChainSnapshot(0.1, -5.0, 0.0, {{100.0, OptionRight::put, 1.0, 1.1}}), Error);
    CHECK_THROWS_WITH_AS(OptionChainSnapshot(0.1, 100.0, 0.0, {}), doctest::Contains("EmptyChain"), Error);
    CHECK_THROWS_AS(OptionChainSnapshot(0.1, 100.0, 0.0, {{100.0, OptionRight::put, 1.2, 1.0}}), Error);
}

TEST_CASE("blend_terms") {
    SUBCASE("equal variances pass through") {
        CHECK(blend_terms(400.0, 20.0 / 365.0, 400.0, 40.0 / 365.0) == doctest::Approx(400.0).epsilon(1e-12));
    }
    SUBCASE("near term exactly at 30 days gets weight one") {
        CHECK(blend_terms(321.0, 30.0 / 365.0, 500.0, 60.0 / 365.0) == doctest::Approx(321.0).epsilon(1e-12));
    }
    SUBCASE("hand-computed interpolation") {
        // Total variance at 30d: [T1*400*(10/365) + T2*500*(10/365)] / (20/365),
        // annualized by 365/30 -> 14000/30.
        CHECK(blend_terms(400.0, 20.0 / 365.0, 500.0, 40.0 / 365.0) ==
              doctest::Approx(14000.0 / 30.0).epsilon(1e-12));
    }
    SUBCASE("bracket violations") {
        CHECK_THROWS_WITH_AS(blend_terms(400.0, 35.0 / 365.0, 500.0, 60.0 / 365.0),
                             doctest::Contains("InvalidBracket"), Error);
        CHECK_THROWS_WITH_AS(blend_terms(400.0, 10.0 / 365.0, 500.0, 20.0 / 365.0),
                             doctest::Contains("InvalidBracket"), Error);
        CHECK_THROWS_AS(blend_terms(400.0, 40.0 / 365.0, 500.0, 20.0 / 365.0), Error);
    }
    SUBCASE("extrapolation only when asked") {
        const double value = blend_terms(400.0, 10.0 / 365.0, 500.0, 20.0 / 365.0, 30.0, true);
        CHECK(std::isfinite(value));
    }
}

TEST_CASE("forward_from_parity finds the parity strike") {
    const double forward = 1234.0;
    const auto chain = flat_vol_chain(forward, 0.2, 30.0 / 365.0, 0.02, 41);
    CHECK(forward_from_parity(chain) == doctest::Approx(forward).epsilon(1e-3));
}

TEST_CASE("chain file parsing") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "volstat_chain_test.csv";
    {
        std::ofstream out(path);
        out << "# synthetic two-term chain\n"
               "# term: days=24 forward=100.5 rate=0.01\n"
               "# term: days=38 forward=100.9 rate=0.012\n"
               "expiry_days,right,strike,bid,ask\n"
               "24,P,95,0.9,1.1\n"
               "24,P,100,2.0,2.2\n"
               "24,C,100,2.0,2.2\n"
               "24,C,105,0.8,1.0\n"
               "38,P,95,1.4,1.6\n"
               "38,P,100,2.6,2.8\n"
               "38,C,100,2.6,2.8\n"
               "38,C,105,1.2,1.4\n";
    }
    const auto chains = parse_chain_file(path.string());
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].expiry_years() == doctest::Approx(24.0 / 365.0));
    CHECK(chains[0].forward() == doctest::Approx(100.5));
    CHECK(chains[0].rate() == doctest::Approx(0.01));
    CHECK(chains[0].quotes().size() == 4);
    CHECK(chains[1].expiry_years() == doctest::Approx(38.0 / 365.0));
    fs::remove(path);

    CHECK_THROWS_WITH_AS(parse_chain_file("/nonexistent/volstat/chain.csv"), doctest::Contains("IoError"), Error);

    const auto bad = fs::temp_directory_path() / "volstat_chain_bad.csv";
    {
        std::ofstream out(bad);
        out << "expiry_days,right,strike,bid,ask\n24,P,95,0.9,1.1\n"; // no term header
    }
    CHECK_THROWS_WITH_AS(parse_chain_file(bad.string()), doctest::Contains("term"), Error);
    fs::remove(bad);
}

#include "volstat/implied_vol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace volstat {

namespace {

struct StrikeQuotes {
    std::optional<double> put_bid;
    std::optional<double> put_mid;
    std::optional<double> call_bid;
    std::optional<double> call_mid;
};

std::map<double, StrikeQuotes> by_strike(const OptionChainSnapshot& chain) {
    std::map<double, StrikeQuotes> ladder;
    for (const auto& quote : chain.quotes()) {
        auto& entry = ladder[quote.strike];
        if (quote.right == OptionRight::put) {
            entry.put_bid = quote.bid;
            entry.put_mid = quote.mid();
        } else {
            entry.call_bid = quote.bid;
            entry.call_mid = quote.mid();
        }
    }
    return ladder;
}

} // namespace

OptionChainSnapshot::OptionChainSnapshot(double expiry_time_years, double forward, double risk_free_rate,
                                         std::vector<OptionQuote> quotes)
    : expiry_years_(expiry_time_years), forward_(forward), rate_(risk_free_rate), quotes_(std::move(quotes)) {
    if (!(expiry_years_ > 0.0)) throw Error(errc::bad_config, "expiry must be positive");
    if (!(forward_ > 0.0)) throw Error(errc::bad_config, "forward must be positive");
    if (quotes_.empty()) throw Error(errc::empty_chain, "chain has no quotes");
    for (const auto& q : quotes_) {
        if (!(q.strike > 0.0)) throw Error(errc::bad_config, "strike must be positive");
        if (q.bid < 0.0 || q.ask < q.bid) throw Error(errc::bad_config, "need ask >= bid >= 0");
    }
    std::sort(quotes_.begin(), quotes_.end(), [](const OptionQuote& a, const OptionQuote& b) {
        if (a.strike != b.strike) return a.strike < b.strike;
        return a.right < b.right;
    });
    for (std::size_t i = 1; i < quotes_.size(); ++i) {
        if (quotes_[i].strike == quotes_[i - 1].strike && quotes_[i].right == quotes_[i - 1].right) {
            throw Error(errc::bad_config, "duplicate strike " + std::to_string(quotes_[i].strike) + " for one right");
        }
    }
}

double select_k0(const OptionChainSnapshot& chain) {
    double best = -1.0;
    for (const auto& quote : chain.quotes()) {
        if (quote.strike <= chain.forward()) best = std::max(best, quote.strike);
    }
    if (best < 0.0) {
        throw Error(errc::no_strike_below_forward,
                    "no strike at or below forward " + std::to_string(chain.forward()));
    }
    return best;
}

double strike_spacing(std::span<const double> strikes, std::size_t i) {
    if (strikes.size() < 2) throw Error(errc::too_few_strikes, "spacing needs at least two strikes");
    if (i >= strikes.size()) throw Error(errc::bad_config, "strike index out of range");
    if (i == 0) return strikes[1] - strikes[0];
    if (i + 1 == strikes.size()) return strikes[i] - strikes[i - 1];
    return 0.5 * (strikes[i + 1] - strikes[i - 1]);
}

ImpliedVarianceResult implied_variance(const OptionChainSnapshot& chain) {
    const auto ladder = by_strike(chain);
    const double k0 = select_k0(chain);

    ImpliedVarianceResult result;
    result.k0 = k0;

    // Out-of-money strip: puts below K0, calls above, both averaged at K0.
    // Strikes with a zero bid contribute nothing; after two consecutive zero
    // bids walking away from K0 the remaining strikes are dropped entirely.
    std::vector<std::pair<double, double>> selected; // (strike, mid)
    const auto at_k0 = ladder.find(k0);

    {
        double mid = 0.0;
        if (at_k0->second.put_mid && at_k0->second.call_mid) {
            mid = 0.5 * (*at_k0->second.put_mid + *at_k0->second.call_mid);
        } else if (at_k0->second.put_mid) {
            mid = *at_k0->second.put_mid;
        } else {
            mid = *at_k0->second.call_mid;
        }
        selected.emplace_back(k0, mid);
    }

    int zero_run = 0;
    for (auto it = std::make_reverse_iterator(at_k0); it != ladder.rend(); ++it) {
        if (zero_run >= 2) {
            result.excluded.push_back({it->first, "zero-bid-run"});
            continue;
        }
        const auto& put = it->second;
        if (!put.put_bid || *put.put_bid <= 0.0) {
            ++zero_run;
            result.excluded.push_back({it->first, "zero-bid"});
            continue;
        }
        zero_run = 0;
        selected.emplace_back(it->first, *put.put_mid);
    }

    zero_run = 0;
    for (auto it = std::next(at_k0); it != ladder.end(); ++it) {
        if (zero_run >= 2) {
            result.excluded.push_back({it->first, "zero-bid-run"});
            continue;
        }
        const auto& call = it->second;
        if (!call.call_bid || *call.call_bid <= 0.0) {
            ++zero_run;
            result.excluded.push_back({it->first, "zero-bid"});
            continue;
        }
        zero_run = 0;
        selected.emplace_back(it->first, *call.call_mid);
    }

    std::sort(selected.begin(), selected.end());
    std::vector<double> strikes(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) strikes[i] = selected[i].first;

    const double t = chain.expiry_years();
    const double growth = std::exp(chain.rate() * t);
    double sum = 0.0;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        // A lone strike has no neighbour to difference against; use a unit
        // interval so the degenerate single-strike chain stays well-defined.
        const double dk = selected.size() >= 2 ? strike_spacing(strikes, i) : 1.0;
        const double term = dk / (strikes[i] * strikes[i]) * growth * selected[i].second;
        result.contributions.push_back({strikes[i], dk, selected[i].second, term});
        sum += term;
    }

    const double offset = chain.forward() / k0 - 1.0;
    result.forward_correction = offset * offset / t;
    result.variance = 1e4 * (2.0 / t * sum - result.forward_correction);
    if (result.variance < 0.0) {
        throw Error(errc::bad_config, "negative model-free variance; chain too sparse around the forward");
    }
    return result;
}

double blend_terms(double near_variance, double near_expiry_years, double next_variance, double next_expiry_years,
                   double target_days, bool allow_extrapolation) {
    if (!(target_days > 0.0)) throw Error(errc::bad_config, "target horizon must be positive");
    if (next_expiry_years < near_expiry_years) {
        throw Error(errc::invalid_bracket, "next-term expiry before near-term expiry");
    }
    const double t_target = target_days / 365.0;
    if (!allow_extrapolation && !(near_expiry_years <= t_target && t_target <= next_expiry_years)) {
        throw Error(errc::invalid_bracket, "target horizon not bracketed by the two expiries");
    }
    if (next_expiry_years == near_expiry_years) {
        return 0.5 * (near_variance + next_variance);
    }
    const double w = (next_expiry_years - t_target) / (next_expiry_years - near_expiry_years);
    const double total = w * near_expiry_years * near_variance + (1.0 - w) * next_expiry_years * next_variance;
    return total / t_target;
}

double forward_from_parity(const OptionChainSnapshot& chain) {
    const auto ladder = by_strike(chain);
    double best_gap = std::numeric_limits<double>::infinity();
    double strike = 0.0;
    double call = 0.0;
    double put = 0.0;
    for (const auto& [k, quotes] : ladder) {
        if (!quotes.call_mid || !quotes.put_mid) continue;
        const double gap = std::abs(*quotes.call_mid - *quotes.put_mid);
        if (gap < best_gap) {
            best_gap = gap;
            strike = k;
            call = *quotes.call_mid;
            put = *quotes.put_mid;
        }
    }
    if (strike == 0.0) throw Error(errc::empty_chain, "no strike quotes both rights");
    return strike + std::exp(chain.rate() * chain.expiry_years()) * (call - put);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text, std::size_t line_no, const char* what) {
    text = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(errc::malformed_row,
                    "line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(text) + "'");
    }
    return value;
}

struct TermHeader {
    double days = 0.0;
    double forward = 0.0;
    double rate = 0.0;
};

std::optional<TermHeader> parse_term_line(std::string_view line, std::size_t line_no) {
    const auto pos = line.find("term:");
    if (pos == std::string_view::npos) return std::nullopt;
    std::istringstream in{std::string(line.substr(pos + 5))};
    TermHeader header;
    bool have_days = false;
    bool have_forward = false;
    bool have_rate = false;
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw Error(errc::malformed_row, "line " + std::to_string(line_no) + ": bad term field '" + token + "'");
        }
        const std::string key = token.substr(0, eq);
        const double value = parse_number(token.substr(eq + 1), line_no, key.c_str());
        if (key == "days") {
            header.days = value;
            have_days = true;
        } else if (key == "forward") {
            header.forward = value;
            have_forward = true;
        } else if (key == "rate") {
            header.rate = value;
            have_rate = true;
        } else {
            throw Error(errc::malformed_row, "line " + std::to_string(line_no) + ": unknown term field '" + key + "'");
        }
    }
    if (!have_days || !have_forward || !have_rate) {
        throw Error(errc::malformed_row, "line " + std::to_string(line_no) + ": term needs days, forward and rate");
    }
    return header;
}

} // namespace

std::vector<OptionChainSnapshot> parse_chain_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(errc::io_error, "cannot open '" + path + "'");

    std::map<double, TermHeader> terms;
    std::map<double, std::vector<OptionQuote>> quotes;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(file, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            if (const auto term = parse_term_line(text, line_no)) terms[term->days] = *term;
            continue;
        }
        if (!header_seen) {
            if (text != "expiry_days,right,strike,bid,ask") {
                throw Error(errc::malformed_row,
                            "line " + std::to_string(line_no) + ": expected header 'expiry_days,right,strike,bid,ask'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        const std::string_view view = text;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(view.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 5) {
            throw Error(errc::malformed_row, "line " + std::to_string(line_no) + ": expected 5 fields");
        }
        const double days = parse_number(fields[0], line_no, "expiry_days");
        const auto right_text = trim(fields[1]);
        OptionRight right;
        if (right_text == "C" || right_text == "c" || right_text == "CALL" || right_text == "call") {
            right = OptionRight::call;
        } else if (right_text == "P" || right_text == "p" || right_text == "PUT" || right_text == "put") {
            right = OptionRight::put;
        } else {
            throw Error(errc::malformed_row,
                        "line " + std::to_string(line_no) + ": bad right '" + std::string(right_text) + "'");
        }
        OptionQuote quote;
        quote.right = right;
        quote.strike = parse_number(fields[2], line_no, "strike");
        quote.bid = parse_number(fields[3], line_no, "bid");
        quote.ask = parse_number(fields[4], line_no, "ask");
        quotes[days].push_back(quote);
    }
    if (quotes.empty()) throw Error(errc::empty_chain, "no quote rows in '" + path + "'");

    std::vector<OptionChainSnapshot> chains;
    for (auto& [days, term_quotes] : quotes) {
        const auto term = terms.find(days);
        if (term == terms.end()) {
            throw Error(errc::malformed_row,
                        "no '# term: days=" + std::to_string(days) + " ...' header in '" + path + "'");
        }
        chains.emplace_back(days / 365.0, term->second.forward, term->second.rate, std::move(term_quotes));
    }
    return chains;
}

} // namespace volstat

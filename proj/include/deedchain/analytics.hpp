#pragma once
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "deedchain/date.hpp"
#include "deedchain/errors.hpp"

namespace deedchain {

struct PriceObservation {
    Day date = 0;
    double close = 0;
};

struct PriceSeries {
    std::string symbol;
    std::vector<PriceObservation> observations;  // strictly ascending dates
};

struct ReturnObservation {
    Day date = 0;
    double ret = 0;  // simple return p_t / p_{t-1} - 1
};

struct ReturnSeries {
    std::string symbol;
    std::vector<ReturnObservation> observations;
};

struct CorrelationMatrix {
    std::vector<std::string> symbols;
    std::vector<std::vector<double>> entries;  // symmetric, unit diagonal
};

// CSV with header "date,close", ISO-8601 dates. Rows are sorted; duplicate
// dates and non-positive prices are rejected.
inline Result<PriceSeries> load_series(const std::filesystem::path& file,
                                       std::string symbol = {}) {
    using R = Result<PriceSeries>;
    std::ifstream in(file);
    if (!in) return R::fail(Err::ParseError, "cannot open " + file.string());
    PriceSeries s;
    s.symbol = symbol.empty() ? file.stem().string() : std::move(symbol);
    std::string line;
    if (!std::getline(in, line)) return R::fail(Err::ParseError, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,close")
        return R::fail(Err::ParseError, "expected header 'date,close'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            return R::fail(Err::ParseError, "line " + std::to_string(lineno));
        auto date = parse_date(line.substr(0, comma));
        if (!date) return R::fail(Err::ParseError, "bad date, line " + std::to_string(lineno));
        double close;
        try {
            std::size_t idx = 0;
            close = std::stod(line.substr(comma + 1), &idx);
            if (idx != line.size() - comma - 1) throw std::invalid_argument("");
        } catch (...) {
            return R::fail(Err::ParseError, "bad close, line " + std::to_string(lineno));
        }
        if (!(close > 0)) return R::fail(Err::NonPositivePrice, "line " + std::to_string(lineno));
        s.observations.push_back({*date, close});
    }
    std::sort(s.observations.begin(), s.observations.end(),
              [](const auto& a, const auto& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < s.observations.size(); ++i) {
        if (s.observations[i].date == s.observations[i - 1].date)
            return R::fail(Err::DuplicateDate, format_date(s.observations[i].date));
    }
    return R::success(std::move(s));
}

// Rebase so the first observation equals exactly 1. Idempotent.
inline Result<PriceSeries> standardize(const PriceSeries& s) {
    if (s.observations.empty()) return Result<PriceSeries>::fail(Err::EmptySeries);
    PriceSeries out;
    out.symbol = s.symbol;
    double base = s.observations.front().close;
    out.observations.reserve(s.observations.size());
    for (const auto& o : s.observations) out.observations.push_back({o.date, o.close / base});
    return Result<PriceSeries>::success(std::move(out));
}

inline Result<ReturnSeries> daily_returns(const PriceSeries& s) {
    if (s.observations.size() < 2) return Result<ReturnSeries>::fail(Err::TooShort);
    ReturnSeries r;
    r.symbol = s.symbol;
    r.observations.reserve(s.observations.size() - 1);
    for (std::size_t i = 1; i < s.observations.size(); ++i) {
        r.observations.push_back({s.observations[i].date,
                                  s.observations[i].close / s.observations[i - 1].close - 1.0});
    }
    return Result<ReturnSeries>::success(std::move(r));
}

// Sample standard deviation (N-1 divisor).
inline Result<double> volatility(const ReturnSeries& r) {
    const auto n = r.observations.size();
    if (n < 2) return Result<double>::fail(Err::TooShort);
    double mean = 0;
    for (const auto& o : r.observations) mean += o.ret;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (const auto& o : r.observations) ss += (o.ret - mean) * (o.ret - mean);
    return Result<double>::success(std::sqrt(ss / static_cast<double>(n - 1)));
}

// Inner join on calendar date, order preserved.
inline Result<std::vector<std::pair<double, double>>> align(const ReturnSeries& a,
                                                            const ReturnSeries& b) {
    using R = Result<std::vector<std::pair<double, double>>>;
    std::vector<std::pair<double, double>> pairs;
    std::size_t i = 0, j = 0;
    while (i < a.observations.size() && j < b.observations.size()) {
        Day da = a.observations[i].date, db = b.observations[j].date;
        if (da == db) {
            pairs.emplace_back(a.observations[i].ret, b.observations[j].ret);
            ++i;
            ++j;
        } else if (da < db) {
            ++i;
        } else {
            ++j;
        }
    }
    if (pairs.empty()) return R::fail(Err::NoOverlap);
    return R::success(std::move(pairs));
}

inline Result<double> correlation(const ReturnSeries& a, const ReturnSeries& b) {
    auto pairs = align(a, b);
    if (!pairs.ok()) return Result<double>::fail(pairs.err, pairs.detail);
    const auto n = pairs->size();
    if (n < 3) return Result<double>::fail(Err::TooShort);
    double mx = 0, my = 0;
    for (const auto& [x, y] : *pairs) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : *pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0 || syy == 0) return Result<double>::fail(Err::ZeroVariance);
    return Result<double>::success(sxy / std::sqrt(sxx * syy));
}

inline Result<CorrelationMatrix> correlation_matrix(const std::vector<ReturnSeries>& set) {
    using R = Result<CorrelationMatrix>;
    CorrelationMatrix m;
    for (const auto& s : set) m.symbols.push_back(s.symbol);
    const auto n = set.size();
    m.entries.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            auto c = correlation(set[i], set[j]);
            if (!c.ok()) return R::fail(c.err, m.symbols[i] + "/" + m.symbols[j]);
            m.entries[i][j] = m.entries[j][i] = *c;
        }
    }
    return R::success(std::move(m));
}

namespace analytics_detail {

inline const PriceObservation* at_or_before(const PriceSeries& s, Day d) {
    const PriceObservation* best = nullptr;
    for (const auto& o : s.observations) {
        if (o.date <= d) best = &o;
        else break;
    }
    return best;
}

}  // namespace analytics_detail

// Single-day percent move across event_date, against the prior observation.
inline Result<double> event_delta(const PriceSeries& s, Day event_date) {
    const PriceObservation* event = nullptr;
    for (const auto& o : s.observations)
        if (o.date == event_date) event = &o;
    if (!event) return Result<double>::fail(Err::MissingDate, format_date(event_date));
    const auto* prior = analytics_detail::at_or_before(s, event_date - 1);
    if (!prior) return Result<double>::fail(Err::MissingDate, "no prior close");
    return Result<double>::success((event->close / prior->close - 1.0) * 100.0);
}

// Percent change between the last closes at or before each boundary date.
inline Result<double> period_change(const PriceSeries& s, Day window_start, Day window_end) {
    const auto* start = analytics_detail::at_or_before(s, window_start);
    const auto* end = analytics_detail::at_or_before(s, window_end);
    if (!start || !end) return Result<double>::fail(Err::MissingDate);
    return Result<double>::success((end->close / start->close - 1.0) * 100.0);
}

// Synthetic stress path: the event-day move lands on tick 1 and a constant
// per-tick drift makes the cumulative change over the horizon equal
// period_pct exactly (percent inputs).
inline Result<std::vector<double>> shock_path(double base_price, double event_day_pct,
                                              double period_pct, std::uint64_t horizon_ticks) {
    using R = Result<std::vector<double>>;
    if (horizon_ticks < 2) return R::fail(Err::BadHorizon);
    double event_factor = 1.0 + event_day_pct / 100.0;
    double period_factor = 1.0 + period_pct / 100.0;
    // (1 + event) * (1 + d)^(horizon - 1) = 1 + period
    double drift = std::pow(period_factor / event_factor,
                            1.0 / static_cast<double>(horizon_ticks - 1)) - 1.0;
    std::vector<double> path;
    path.reserve(horizon_ticks + 1);
    path.push_back(base_price);
    path.push_back(base_price * event_factor);
    for (std::uint64_t t = 2; t <= horizon_ticks; ++t)
        path.push_back(path.back() * (1.0 + drift));
    // pin the endpoint against accumulated float error
    path.back() = base_price * period_factor;
    return R::success(std::move(path));
}

}  // namespace deedchain

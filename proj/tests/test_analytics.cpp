#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "deedchain/analytics.hpp"

using namespace deedchain;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = fs::path(DEEDCHAIN_SOURCE_DIR) / "data" / "market2022";

fs::path write_csv(const std::string& stem, const std::string& body) {
    auto p = fs::temp_directory_path() / (stem + "-" + std::to_string(::getpid()) + ".csv");
    std::ofstream out(p);
    out << body;
    return p;
}

PriceSeries series_of(std::initializer_list<std::pair<const char*, double>> rows) {
    PriceSeries s;
    s.symbol = "T";
    for (const auto& [d, c] : rows) s.observations.push_back({*parse_date(d), c});
    return s;
}

ReturnSeries returns_of(std::initializer_list<std::pair<Day, double>> rows) {
    ReturnSeries r;
    r.symbol = "T";
    for (const auto& [d, v] : rows) r.observations.push_back({d, v});
    return r;
}

}  // namespace

// --- loading ---

TEST_CASE("load_series parses and sorts") {
    auto p = write_csv("ok", "date,close\n2022-01-03,10.5\n2022-01-01,10\n2022-01-02,9\n");
    auto s = load_series(p, "X");
    REQUIRE(s.ok());
    CHECK(s->symbol == "X");
    REQUIRE(s->observations.size() == 3);
    CHECK(format_date(s->observations[0].date) == "2022-01-01");
    CHECK(s->observations[0].close == 10.0);
    CHECK(s->observations[2].close == 10.5);
    fs::remove(p);
}

TEST_CASE("load_series rejections") {
    auto dup = write_csv("dup", "date,close\n2022-01-01,10\n2022-01-01,11\n");
    CHECK(load_series(dup).err == Err::DuplicateDate);
    fs::remove(dup);

    auto neg = write_csv("neg", "date,close\n2022-01-01,-1\n");
    CHECK(load_series(neg).err == Err::NonPositivePrice);
    fs::remove(neg);

    auto zero = write_csv("zero", "date,close\n2022-01-01,0\n");
    CHECK(load_series(zero).err == Err::NonPositivePrice);
    fs::remove(zero);

    auto hdr = write_csv("hdr", "day,price\n2022-01-01,10\n");
    CHECK(load_series(hdr).err == Err::ParseError);
    fs::remove(hdr);

    auto bad = write_csv("bad", "date,close\n2022-13-01,10\n");
    CHECK(load_series(bad).err == Err::ParseError);
    fs::remove(bad);

    CHECK(load_series(fs::temp_directory_path() / "missing-xyz.csv").err == Err::ParseError);
}

// --- standardize ---

TEST_CASE("standardize rebases to one and is idempotent") {
    auto s = series_of({{"2022-01-01", 50.0}, {"2022-01-02", 55.0}, {"2022-01-03", 40.0}});
    auto z = standardize(s);
    REQUIRE(z.ok());
    CHECK(z->observations[0].close == 1.0);
    CHECK(z->observations[1].close == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(z->observations[2].close == doctest::Approx(0.8).epsilon(1e-12));
    auto zz = standardize(*z);
    REQUIRE(zz.ok());
    for (std::size_t i = 0; i < z->observations.size(); ++i)
        CHECK(zz->observations[i].close == z->observations[i].close);
    PriceSeries empty;
    CHECK(standardize(empty).err == Err::EmptySeries);
}

TEST_CASE("standardize preserves returns exactly") {
    std::mt19937_64 rng(7);
    PriceSeries s;
    s.symbol = "R";
    double px = 100;
    for (int i = 0; i < 50; ++i) {
        s.observations.push_back({static_cast<Day>(19000 + i), px});
        px *= 1.0 + (static_cast<double>(rng() % 2001) - 1000.0) / 20000.0;
    }
    auto z = standardize(s);
    REQUIRE(z.ok());
    auto r1 = daily_returns(s);
    auto r2 = daily_returns(*z);
    REQUIRE(r1.ok());
    REQUIRE(r2.ok());
    for (std::size_t i = 0; i < r1->observations.size(); ++i)
        CHECK(r2->observations[i].ret ==
              doctest::Approx(r1->observations[i].ret).epsilon(1e-12));
}

// --- returns and volatility ---

TEST_CASE("daily returns by hand") {
    auto s = series_of({{"2022-01-01", 100.0}, {"2022-01-02", 110.0}, {"2022-01-03", 99.0}});
    auto r = daily_returns(s);
    REQUIRE(r.ok());
    REQUIRE(r->observations.size() == 2);
    CHECK(r->observations[0].ret == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(r->observations[1].ret == doctest::Approx(-0.10).epsilon(1e-12));
    CHECK(format_date(r->observations[0].date) == "2022-01-02");

    PriceSeries one = series_of({{"2022-01-01", 1.0}});
    CHECK(daily_returns(one).err == Err::TooShort);
}

TEST_CASE("cumulative product of returns recovers the price ratio") {
    std::mt19937_64 rng(9);
    PriceSeries s;
    double px = 3.0;
    for (int i = 0; i < 300; ++i) {
        s.observations.push_back({static_cast<Day>(19000 + i), px});
        px *= 1.0 + (static_cast<double>(rng() % 2001) - 1000.0) / 10000.0;
    }
    auto r = daily_returns(s);
    REQUIRE(r.ok());
    double prod = 1.0;
    for (const auto& o : r->observations) prod *= 1.0 + o.ret;
    CHECK(prod == doctest::Approx(s.observations.back().close /
                                  s.observations.front().close).epsilon(1e-12));
}

TEST_CASE("volatility against a textbook two-pass oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        ReturnSeries r;
        std::size_t n = 2 + rng() % 200;
        for (std::size_t i = 0; i < n; ++i)
            r.observations.push_back({static_cast<Day>(i),
                                      (static_cast<double>(rng() % 20001) - 10000.0) / 1e5});
        auto vol = volatility(r);
        REQUIRE(vol.ok());
        // independent oracle: direct definition with a separate accumulation order
        long double mean = 0;
        for (auto it = r.observations.rbegin(); it != r.observations.rend(); ++it)
            mean += it->ret;
        mean /= static_cast<long double>(n);
        long double ss = 0;
        for (auto it = r.observations.rbegin(); it != r.observations.rend(); ++it)
            ss += (it->ret - mean) * (it->ret - mean);
        double expected = static_cast<double>(sqrtl(ss / static_cast<long double>(n - 1)));
        CHECK(*vol == doctest::Approx(expected).epsilon(1e-12));
    }
    ReturnSeries one = returns_of({{1, 0.5}});
    CHECK(volatility(one).err == Err::TooShort);
}

TEST_CASE("volatility of a constant-return series is zero") {
    auto r = returns_of({{1, 0.02}, {2, 0.02}, {3, 0.02}, {4, 0.02}});
    auto vol = volatility(r);
    REQUIRE(vol.ok());
    CHECK(*vol == doctest::Approx(0.0));
}

// --- alignment and correlation ---

TEST_CASE("align inner-joins on date") {
    auto a = returns_of({{1, 0.1}, {2, 0.2}, {4, 0.4}, {5, 0.5}});
    auto b = returns_of({{2, -0.2}, {3, -0.3}, {4, -0.4}, {6, -0.6}});
    auto pairs = align(a, b);
    REQUIRE(pairs.ok());
    REQUIRE(pairs->size() == 2);
    CHECK((*pairs)[0] == std::pair{0.2, -0.2});
    CHECK((*pairs)[1] == std::pair{0.4, -0.4});

    auto c = returns_of({{10, 1.0}});
    CHECK(align(a, c).err == Err::NoOverlap);
}

TEST_CASE("correlation of identical and negated series") {
    auto a = returns_of({{1, 0.01}, {2, -0.02}, {3, 0.005}, {4, 0.03}, {5, -0.01}});
    auto b = a;
    for (auto& o : b.observations) o.ret = -2.5 * o.ret;
    auto self = correlation(a, a);
    REQUIRE(self.ok());
    CHECK(*self == doctest::Approx(1.0).epsilon(1e-12));
    auto anti = correlation(a, b);
    REQUIRE(anti.ok());
    CHECK(*anti == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("correlation is invariant under positive affine maps") {
    std::mt19937_64 rng(29);
    ReturnSeries a, b;
    for (int i = 0; i < 100; ++i) {
        a.observations.push_back({static_cast<Day>(i),
                                  (static_cast<double>(rng() % 2001) - 1000.0) / 1e4});
        b.observations.push_back({static_cast<Day>(i),
                                  (static_cast<double>(rng() % 2001) - 1000.0) / 1e4});
    }
    auto base = correlation(a, b);
    REQUIRE(base.ok());
    auto scaled = a;
    for (auto& o : scaled.observations) o.ret = 3.7 * o.ret + 0.001;
    auto again = correlation(scaled, b);
    REQUIRE(again.ok());
    CHECK(*again == doctest::Approx(*base).epsilon(1e-12));
}

TEST_CASE("correlation matches the product-moment oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        ReturnSeries a, b;
        std::size_t n = 3 + rng() % 100;
        for (std::size_t i = 0; i < n; ++i) {
            a.observations.push_back({static_cast<Day>(i),
                                      (static_cast<double>(rng() % 2001) - 1000.0) / 1e4});
            b.observations.push_back({static_cast<Day>(i),
                                      (static_cast<double>(rng() % 2001) - 1000.0) / 1e4});
        }
        auto got = correlation(a, b);
        REQUIRE(got.ok());
        // independent oracle: E[xy] - E[x]E[y] over sqrt of the same for squares
        long double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            long double x = a.observations[i].ret, y = b.observations[i].ret;
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        long double nn = static_cast<long double>(n);
        long double cov = sxy / nn - (sx / nn) * (sy / nn);
        long double vx = sxx / nn - (sx / nn) * (sx / nn);
        long double vy = syy / nn - (sy / nn) * (sy / nn);
        double expected = static_cast<double>(cov / sqrtl(vx * vy));
        CHECK(*got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("zero variance rejected") {
    auto flat = returns_of({{1, 0.01}, {2, 0.01}, {3, 0.01}});
    auto other = returns_of({{1, 0.02}, {2, -0.01}, {3, 0.03}});
    CHECK(correlation(flat, other).err == Err::ZeroVariance);
}

TEST_CASE("correlation matrix is symmetric with unit diagonal") {
    std::mt19937_64 rng(37);
    std::vector<ReturnSeries> set(3);
    for (std::size_t k = 0; k < set.size(); ++k) {
        set[k].symbol = "S" + std::to_string(k);
        for (int i = 0; i < 40; ++i)
            set[k].observations.push_back({static_cast<Day>(i),
                                           (static_cast<double>(rng() % 2001) - 1000.0) / 1e4});
    }
    auto m = correlation_matrix(set);
    REQUIRE(m.ok());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m->entries[i][i] == 1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(m->entries[i][j] == m->entries[j][i]);
            CHECK(std::abs(m->entries[i][j]) <= 1.0 + 1e-12);
        }
    }
}

// --- event windows ---

TEST_CASE("event delta against the prior close") {
    auto s = series_of({{"2022-11-09", 100.0}, {"2022-11-10", 80.0}, {"2022-11-11", 88.0}});
    auto d = event_delta(s, *parse_date("2022-11-10"));
    REQUIRE(d.ok());
    CHECK(*d == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(event_delta(s, *parse_date("2022-11-12")).err == Err::MissingDate);
}

TEST_CASE("event delta skips a market holiday for the prior close") {
    // weekend gap: prior trading day is Friday the 4th
    auto s = series_of({{"2022-11-04", 50.0}, {"2022-11-07", 55.0}});
    auto d = event_delta(s, *parse_date("2022-11-07"));
    REQUIRE(d.ok());
    CHECK(*d == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("period change uses last-available closes at the boundaries") {
    auto s = series_of({{"2022-10-31", 200.0}, {"2022-11-28", 150.0}, {"2022-12-02", 140.0}});
    // Nov-30 boundary falls between observations: use Nov-28's close
    auto chg = period_change(s, *parse_date("2022-10-31"), *parse_date("2022-11-30"));
    REQUIRE(chg.ok());
    CHECK(*chg == doctest::Approx(-25.0).epsilon(1e-12));
    CHECK(period_change(s, *parse_date("2022-10-01"), *parse_date("2022-11-30")).err ==
          Err::MissingDate);
}

// --- shock paths ---

TEST_CASE("shock path pins the event day and the endpoint") {
    auto path = shock_path(100.0, -20.0, -25.05, 20);
    REQUIRE(path.ok());
    REQUIRE(path->size() == 21);
    CHECK((*path)[0] == 100.0);
    CHECK((*path)[1] == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(path->back() == 100.0 * (1.0 - 0.2505));  // exact, not approximate
    // drift is constant between ticks 1 and horizon
    double d1 = (*path)[2] / (*path)[1];
    for (std::size_t i = 2; i + 2 < path->size(); ++i)
        CHECK((*path)[i + 1] / (*path)[i] == doctest::Approx(d1).epsilon(1e-9));
    CHECK(shock_path(100.0, -5.0, -10.0, 1).err == Err::BadHorizon);
}

TEST_CASE("shock path with recovery drift") {
    // deep event day but a flat month: the drift must be positive
    auto path = shock_path(10.0, -30.0, 0.0, 10);
    REQUIRE(path.ok());
    CHECK(path->back() == 10.0);
    for (std::size_t i = 1; i + 1 < path->size(); ++i)
        CHECK((*path)[i + 1] > (*path)[i]);
}

// --- bundled 2022 dataset sanity ---

TEST_CASE("bundled dataset reproduces the headline 2022 statistics") {
    auto btc = load_series(kDataDir / "BTC.csv");
    auto eth = load_series(kDataDir / "ETH.csv");
    auto usdt = load_series(kDataDir / "USDT.csv");
    REQUIRE(btc.ok());
    REQUIRE(eth.ok());
    REQUIRE(usdt.ok());

    auto rb = daily_returns(*btc);
    auto re = daily_returns(*eth);
    auto ru = daily_returns(*usdt);
    REQUIRE(rb.ok());

    auto c = correlation(*rb, *re);
    REQUIRE(c.ok());
    CHECK(*c == doctest::Approx(0.90).epsilon(0.07));

    auto vol_usdt = volatility(*ru);
    REQUIRE(vol_usdt.ok());
    CHECK(*vol_usdt < 0.001);  // stablecoin: an order quieter than the majors

    auto event = event_delta(*btc, *parse_date("2022-11-11"));
    REQUIRE(event.ok());
    CHECK(*event == doctest::Approx(-2.54).epsilon(0.15));
}

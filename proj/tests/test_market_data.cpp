#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fpc/market_data.hpp"

using namespace fpc;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/fpc_test_") + name;
}

}  // namespace

TEST_CASE("discount curve interpolates the zero rate linearly in time") {
    DiscountCurve curve({{1.0, 0.02}, {2.0, 0.04}});
    // Rate at 1.5y is 3%, so the 1.5y discount factor is exp(-0.045).
    CHECK(curve.zero_rate(1.5) == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(curve.discount_factor(1.5) == doctest::Approx(std::exp(-0.045)).epsilon(1e-14));
    // Flat extrapolation on both sides.
    CHECK(curve.zero_rate(0.25) == doctest::Approx(0.02));
    CHECK(curve.zero_rate(10.0) == doctest::Approx(0.04));
    CHECK(curve.discount_factor(0.0) == doctest::Approx(1.0));
}

TEST_CASE("flat discount curve") {
    auto curve = DiscountCurve::flat(0.03);
    CHECK(curve.discount_factor(5.0) == doctest::Approx(std::exp(-0.15)).epsilon(1e-15));
    CHECK(curve.forward_discount(2.0, 5.0) ==
          doctest::Approx(std::exp(-0.09)).epsilon(1e-14));
}

TEST_CASE("forward simple rate matches the discount ratio") {
    auto curve = DiscountCurve::flat(0.03);
    const double l = curve.forward_simple_rate(1.0, 1.5, 0.5);
    CHECK((1.0 + 0.5 * l) * curve.discount_factor(1.5) ==
          doctest::Approx(curve.discount_factor(1.0)).epsilon(1e-14));
}

TEST_CASE("discount curve rejects bad pillars") {
    CHECK_THROWS(DiscountCurve({}));
    CHECK_THROWS(DiscountCurve({{1.0, 0.02}, {1.0, 0.03}}));
    CHECK_THROWS(DiscountCurve({{-1.0, 0.02}}));
}

TEST_CASE("dividend curve cumulative yield") {
    auto div = DividendCurve::flat(0.008);
    CHECK(div.cumulative_yield(5.0) == doctest::Approx(0.04).epsilon(1e-14));
}

TEST_CASE("schedule covers the full period") {
    const auto s = build_schedule(0.0, 5.0, 4);
    CHECK(s.dates.size() == 20);
    CHECK(s.maturity() == doctest::Approx(5.0).epsilon(1e-15));
    double total = 0.0;
    for (double a : s.accruals)
        total += a;
    CHECK(total == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("schedule short final stub") {
    const auto s = build_schedule(0.0, 1.3, 4);
    CHECK(s.dates.size() == 6);
    CHECK(s.dates.back() == doctest::Approx(1.3));
    CHECK(s.accruals.back() == doctest::Approx(0.05).epsilon(1e-9));
    double total = 0.0;
    for (double a : s.accruals)
        total += a;
    CHECK(total == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("previous and next payment dates") {
    const auto s = build_schedule(0.0, 2.0, 4);
    CHECK(s.previous_date(0.1) == doctest::Approx(0.0));
    CHECK(s.previous_date(0.6) == doctest::Approx(0.5));
    CHECK(s.first_date_after(0.5) == 2);
    CHECK(s.first_date_after(1.99) == 7);
    CHECK(s.first_date_after(2.0) == s.dates.size());
}

TEST_CASE("quote CSV round trip is the identity") {
    const std::string path = temp_path("quotes.csv");
    std::vector<CdsQuote> quotes = {{1, 19, 24, 21.5, 0.4, 4},
                                    {5, 42, 44, 43, 0.4, 4},
                                    {10, 56, 66, 61, 0.35, 4}};
    save_quotes(quotes, path);
    const auto loaded = load_quotes(path);
    REQUIRE(loaded.size() == quotes.size());
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        CHECK(loaded[i].tenor == quotes[i].tenor);
        CHECK(loaded[i].bid_bps == quotes[i].bid_bps);
        CHECK(loaded[i].ask_bps == quotes[i].ask_bps);
        CHECK(loaded[i].mid_bps == quotes[i].mid_bps);
        CHECK(loaded[i].recovery == quotes[i].recovery);
    }
    std::remove(path.c_str());
}

TEST_CASE("quote loader reports path and row on parse errors") {
    const std::string path = temp_path("bad_quotes.csv");
    {
        std::ofstream out(path);
        out << "tenor_years,bid_bps,ask_bps,mid_bps,recovery\n";
        out << "1,19,24,21.5,0.4\n";
        out << "3,oops,34,33,0.4\n";
    }
    try {
        load_quotes(path);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        const std::string what = e.what();
        CHECK(what.find(path) != std::string::npos);
        CHECK(what.find("row 3") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("quote loader rejects duplicate tenors and crossed quotes") {
    const std::string path = temp_path("dup_quotes.csv");
    {
        std::ofstream out(path);
        out << "tenor_years,bid_bps,ask_bps,mid_bps,recovery\n";
        out << "1,19,24,21.5,0.4\n1,20,25,22.5,0.4\n";
    }
    CHECK_THROWS(load_quotes(path));
    {
        std::ofstream out(path);
        out << "tenor_years,bid_bps,ask_bps,mid_bps,recovery\n";
        out << "1,25,24,21.5,0.4\n";
    }
    CHECK_THROWS(load_quotes(path));
    std::remove(path.c_str());
}

TEST_CASE("empty quote file yields an empty list") {
    const std::string path = temp_path("empty_quotes.csv");
    {
        std::ofstream out(path);
        out << "tenor_years,bid_bps,ask_bps,mid_bps,recovery\n";
        out << "# no quotes today\n";
    }
    CHECK(load_quotes(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("discount curve CSV round trip") {
    const std::string path = temp_path("curve.csv");
    DiscountCurve curve({{0.5, 0.021}, {2.0, 0.033}, {10.0, 0.041}});
    save_discount_curve(curve, path);
    const auto loaded = load_discount_curve(path);
    REQUIRE(loaded.pillars().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.pillars()[i].first == curve.pillars()[i].first);
        CHECK(loaded.pillars()[i].second == curve.pillars()[i].second);
    }
    std::remove(path.c_str());
}

TEST_CASE("missing files raise errors naming the path") {
    try {
        load_quotes("/nonexistent/q.csv");
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("/nonexistent/q.csv") != std::string::npos);
    }
    CHECK_THROWS(load_discount_curve("/nonexistent/c.csv"));
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "dgcm/errors.hpp"
#include "dgcm/returns.hpp"

using namespace dgcm;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "dgcm_test_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE_BEGIN("returns");

TEST_CASE("two prices give the single log return") {
    TempFile file("date,p\n2024-01-02,100\n2024-01-03,110\n");
    const auto prices = parse_prices_csv(file.path);
    const auto returns = to_log_returns(prices);
    REQUIRE(returns.n == 1);
    CHECK(returns.returns[0][0] == doctest::Approx(std::log(1.1)).epsilon(1e-15));
}

TEST_CASE("constant prices give zero returns") {
    TempFile file("date,p\n2024-01-02,50\n2024-01-03,50\n2024-01-04,50\n");
    const auto returns = to_log_returns(parse_prices_csv(file.path));
    for (double r : returns.returns[0]) CHECK(r == 0.0);
}

TEST_CASE("one missing slot is filled at the midpoint") {
    std::vector<double> values{0.02, 0.0, 0.04};
    interpolate_missing(values, {true, false, true});
    CHECK(values[1] == doctest::Approx(0.03).epsilon(1e-15));
}

TEST_CASE("interior gaps interpolate, edges copy flat") {
    std::vector<double> values{0.0, 0.02, 0.0, 0.0, 0.05, 0.0};
    interpolate_missing(values, {false, true, false, false, true, false});
    CHECK(values[0] == doctest::Approx(0.02));
    CHECK(values[2] == doctest::Approx(0.03));
    CHECK(values[3] == doctest::Approx(0.04));
    CHECK(values[5] == doctest::Approx(0.05));
}

TEST_CASE("a holiday price produces an interpolated pair of returns") {
    // Missing price on 01-04: both adjacent return slots are filled from
    // the neighboring available returns.
    TempFile file(
        "date,p,q\n"
        "2024-01-02,100,10\n"
        "2024-01-03,110,11\n"
        "2024-01-04,,12\n"
        "2024-01-05,121,13\n"
        "2024-01-08,169.4,14\n");
    const auto returns = to_log_returns(parse_prices_csv(file.path));
    REQUIRE(returns.n == 4);
    const auto& p = returns.returns[0];
    const double r1 = std::log(1.1);
    const double r4 = std::log(1.4);
    CHECK(p[0] == doctest::Approx(r1));
    CHECK(p[3] == doctest::Approx(r4));
    // Two missing slots between r1 and r4: linear thirds.
    CHECK(p[1] == doctest::Approx(r1 + (r4 - r1) / 3.0));
    CHECK(p[2] == doctest::Approx(r1 + 2.0 * (r4 - r1) / 3.0));
    // The q column is complete and untouched by the gap in p.
    CHECK(returns.returns[1][1] == doctest::Approx(std::log(12.0 / 11.0)));
}

TEST_CASE("ingest then re-export reproduces a gap-free series") {
    TempFile file(
        "date,p\n"
        "2024-01-02,100\n2024-01-03,104.2\n2024-01-04,101.77\n2024-01-05,108.3\n");
    const auto first = to_log_returns(parse_prices_csv(file.path));

    // Rebuild prices from the returns and ingest again.
    std::string rebuilt = "date,p\n2024-01-02,100\n";
    double price = 100.0;
    const char* dates[] = {"2024-01-03", "2024-01-04", "2024-01-05"};
    for (int i = 0; i < 3; ++i) {
        price *= std::exp(first.returns[0][static_cast<std::size_t>(i)]);
        char line[64];
        std::snprintf(line, sizeof(line), "%s,%.17g\n", dates[i], price);
        rebuilt += line;
    }
    TempFile second_file(rebuilt);
    const auto second = to_log_returns(parse_prices_csv(second_file.path));
    REQUIRE(second.n == first.n);
    for (int i = 0; i < first.n; ++i) {
        CHECK(second.returns[0][static_cast<std::size_t>(i)] ==
              doctest::Approx(first.returns[0][static_cast<std::size_t>(i)])
                  .epsilon(1e-12));
    }
}

TEST_CASE("data errors carry their location") {
    SUBCASE("non-positive price") {
        TempFile file("date,p\n2024-01-02,100\n2024-01-03,-5\n");
        CHECK_THROWS_AS(to_log_returns(parse_prices_csv(file.path)), DataError);
    }
    SUBCASE("series with no usable observations") {
        TempFile file("date,p,q\n2024-01-02,,1\n2024-01-03,,2\n");
        CHECK_THROWS_AS(to_log_returns(parse_prices_csv(file.path)), DataError);
    }
    SUBCASE("malformed number names row and column") {
        TempFile file("date,p\n2024-01-02,abc\n");
        CHECK_THROWS_WITH_AS(parse_prices_csv(file.path),
                             doctest::Contains("row 2"), CsvParseError);
    }
    SUBCASE("dates must increase strictly") {
        TempFile file("date,p\n2024-01-03,1\n2024-01-02,2\n");
        CHECK_THROWS_AS(parse_prices_csv(file.path), CsvParseError);
    }
    SUBCASE("bad date format") {
        TempFile file("date,p\n01/02/2024,1\n");
        CHECK_THROWS_AS(parse_prices_csv(file.path), CsvParseError);
    }
    SUBCASE("ragged row") {
        TempFile file("date,p,q\n2024-01-02,1\n");
        CHECK_THROWS_AS(parse_prices_csv(file.path), CsvParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_prices_csv("no_such_file.csv"), IoError);
    }
}

TEST_CASE("rows absent in every series are dropped") {
    TempFile file(
        "date,p,q\n"
        "2024-01-02,100,10\n"
        "2024-01-03,,\n"
        "2024-01-04,110,11\n");
    const auto prices = parse_prices_csv(file.path);
    CHECK(prices.dates.size() == 2);
    const auto returns = to_log_returns(prices);
    CHECK(returns.n == 1);
    CHECK(returns.returns[0][0] == doctest::Approx(std::log(1.1)));
}

TEST_CASE("quoted fields and a named date column") {
    TempFile file(
        "\"price,usd\",when\n"
        "100,2024-01-02\n"
        "110,2024-01-03\n");
    const auto prices = parse_prices_csv(file.path, "when");
    REQUIRE(prices.series_names.size() == 1);
    CHECK(prices.series_names[0] == "price,usd");
    CHECK(to_log_returns(prices).returns[0][0] == doctest::Approx(std::log(1.1)));
}

TEST_CASE("role binding builds the panel") {
    TempFile file(
        "date,a,b\n"
        "2024-01-02,100,10\n"
        "2024-01-03,110,12\n"
        "2024-01-04,120,9\n");
    const auto returns = to_log_returns(parse_prices_csv(file.path));
    const auto panel = bind_panel(
        returns, {{SeriesRole::X, "a", ""}, {SeriesRole::Y, "b", "bee"}});
    CHECK(panel.length() == 2);
    CHECK(panel.labels(SeriesRole::X) == std::vector<std::string>{"a"});
    CHECK(panel.labels(SeriesRole::Y) == std::vector<std::string>{"bee"});
    CHECK(panel.value(SeriesRole::X, 0, 1) == doctest::Approx(std::log(1.1)));
    CHECK_THROWS_AS(bind_panel(returns, {{SeriesRole::X, "zzz", ""}}), DataError);
}

TEST_SUITE_END();

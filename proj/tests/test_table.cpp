#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "wgqed/core.hpp"
#include "wgqed/table.hpp"

using namespace wgqed;

TEST_CASE("numbers print shortest and read back exactly")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(3.0) == "3");
    CHECK(format_number(-2.5e-12) == "-2.5e-12");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv round trip")
{
    ResultTable t;
    t.set("schema", "demo/1");
    t.set("alpha", 0.0032);
    t.set("note", "a = b, with spaces");
    t.echo = {"[run]", "", "seed = 4"};
    t.columns = {"x", "y"};
    t.add_row({1.0, 1.0 / 3.0});
    t.add_row({std::numeric_limits<double>::quiet_NaN(), -1e300});

    const std::string csv = to_csv(t);
    CHECK(csv.starts_with("# schema=demo/1\n"));
    CHECK(csv.find("#| [run]\n") != std::string::npos);
    CHECK(csv.find("\nx,y\n") != std::string::npos);

    const ResultTable back = parse_csv(csv);
    CHECK(back == t);
    CHECK(to_csv(back) == csv);
    CHECK(back.get("note") == std::optional<std::string>("a = b, with spaces"));
    CHECK(std::isnan(back.column("x")[1]));

    const auto path = std::filesystem::temp_directory_path() / "wgqed_table_roundtrip.csv";
    write_table(t, path);
    CHECK(read_table(path) == t);
    std::filesystem::remove(path);
}

TEST_CASE("set replaces in place")
{
    ResultTable t;
    t.set("a", "1");
    t.set("b", "2");
    t.set("a", "3");
    REQUIRE(t.meta.size() == 2);
    CHECK(t.meta[0].first == "a");
    CHECK(t.meta[0].second == "3");
}

TEST_CASE("malformed tables are rejected")
{
    ResultTable t;
    t.columns = {"x", "y"};
    CHECK_THROWS_AS(t.add_row({1.0}), DomainError);
    CHECK_THROWS_AS(t.set("bad key", "1"), DomainError);
    CHECK_THROWS_AS(t.set("k", "two\nlines"), DomainError);
    CHECK_THROWS_AS(t.column("z"), DomainError);
    CHECK_THROWS_AS(parse_csv("x,y\n1,2,3\n"), DomainError);
    CHECK_THROWS_AS(parse_csv("x,y\n1,abc\n"), DomainError);
}

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "svrp/config.hpp"

using namespace svrp;

TEST_SUITE("config") {

TEST_CASE("parses keys, comments, and repeated assignments") {
    const auto cfg = KeyValueConfig::from_string(
        "# a comment\n"
        "\n"
        "name = hello world \n"
        "count=3\n"
        "count = 4\n"
        "  rate  =  0.25\n"
        "flag = TRUE\n"
        "big = 18446744073709551615\n");
    CHECK(cfg.get_string("name") == "hello world");
    CHECK(cfg.get_int("count", 0) == 4);
    CHECK(cfg.get_double("rate", 0.0) == doctest::Approx(0.25));
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_u64("big", 0) == 18446744073709551615ull);
    CHECK(cfg.get_int("absent", 7) == 7);
    CHECK_FALSE(cfg.has("absent"));
}

TEST_CASE("parses comma lists") {
    const auto cfg = KeyValueConfig::from_string(
        "sizes = 10, 20,50\n"
        "ratios = 0.6,0.2,0.2\n"
        "names = cw, tabu\n");
    CHECK(cfg.get_ints("sizes", {}) == std::vector<int>{10, 20, 50});
    CHECK(cfg.get_doubles("ratios", {}) == std::vector<double>{0.6, 0.2, 0.2});
    CHECK(cfg.get_strings("names", {}) == std::vector<std::string>{"cw", "tabu"});
    CHECK(cfg.get_ints("absent", {1}) == std::vector<int>{1});
}

TEST_CASE("rejects malformed input") {
    CHECK_THROWS_AS(KeyValueConfig::from_string("no equals sign\n"), std::invalid_argument);
    CHECK_THROWS_AS(KeyValueConfig::from_string("= naked value\n"), std::invalid_argument);
    const auto cfg = KeyValueConfig::from_string("x = abc\nlist = 1,,2\n");
    CHECK_THROWS_AS(cfg.get_int("x", 0), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_double("x", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_bool("x", false), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_ints("list", {}), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_string("missing"), std::invalid_argument);
}

TEST_CASE("tracks unread keys and supports overrides") {
    auto cfg = KeyValueConfig::from_string("a = 1\nb = 2\n");
    cfg.set("c", "3");
    CHECK(cfg.get_int("a", 0) == 1);
    CHECK(cfg.unread_keys() == std::vector<std::string>{"b", "c"});
    CHECK(cfg.get_int("c", 0) == 3);
}

TEST_CASE("round-trips through a file") {
    const std::string path = "config_test_roundtrip.cfg";
    {
        std::ofstream out(path);
        out << "x = 42\n";
    }
    const auto cfg = KeyValueConfig::from_file(path);
    CHECK(cfg.get_int("x", 0) == 42);
    CHECK_THROWS_AS(KeyValueConfig::from_file("does_not_exist.cfg"), std::runtime_error);
    std::remove(path.c_str());
}

}  // TEST_SUITE

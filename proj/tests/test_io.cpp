#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include "r2r/io.hpp"

using namespace r2r;
using json = nlohmann::json;

TEST_CASE("deck wire format") {
    CHECK(io::format_deck(Deck({3, 1, 4, 2})) == "3,1,4,2");
    CHECK(io::parse_deck("3,1,4,2") == Deck({3, 1, 4, 2}));
    CHECK_THROWS_AS(io::parse_deck(""), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_deck("1,2,x"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_deck("1,1,2"), std::invalid_argument);
}

TEST_CASE("shuffle and path wire formats") {
    CHECK(io::format_shuffle({1, 3}) == "1>3");
    CHECK(io::parse_shuffle("1>3") == Shuffle{1, 3});
    CHECK_THROWS_AS(io::parse_shuffle("13"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_shuffle("1>2>3"), std::invalid_argument);

    const ShufflePath p{{1, 1}, {1, 4}, {2, 3}};
    CHECK(io::format_path(p) == "1>1;1>4;2>3");
    CHECK(io::parse_path("1>1;1>4;2>3") == p);
    CHECK(io::parse_path("").empty());
}

TEST_CASE("wire formats round trip random values") {
    SeedSpec seed{606};
    Xoshiro256StarStar rng = seed.stream(0);
    for (int rep = 0; rep < 200; ++rep) {
        const Deck d = unrank_deck(rng.below(factorial(7)), 7);
        CHECK(io::parse_deck(io::format_deck(d)) == d);
        const ShufflePath p = random_path(rng, 7, 12);
        CHECK(io::parse_path(io::format_path(p)) == p);
    }
}

TEST_CASE("coupled outcome JSON uses the documented keys and inf encoding") {
    const CoupledOutcome finite = run_coupled(Deck({1, 3, 4, 2}), {1, 2},
                                              {{1, 1}, {1, 4}, {2, 3}}, {});
    const json j = json::parse(io::coupled_outcome_to_json(finite));
    CHECK(j["T"] == 2);
    CHECK(j["coalesced"] == true);
    CHECK(j["good_times"] == json::array({2}));
    CHECK(j["x_final"] == "3,2,4,1");
    CHECK(j["x_prime_final"] == "3,2,4,1");

    const CoupledOutcome infinite = run_coupled(Deck({1, 2}), {1, 2}, {{2, 2}}, {});
    const json ji = json::parse(io::coupled_outcome_to_json(infinite));
    CHECK(ji["T"] == "inf");
    CHECK(ji["coalesced"] == false);
}

TEST_CASE("matrix serialization") {
    const chain::TransitionMatrix k = chain::build_ktilde(10);
    const std::string csv = io::matrix_to_csv(k);
    CHECK(csv.substr(0, csv.find('\n')) == "state,0,1,2,3,4,5,6,7,inf");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 9 rows
    CHECK(csv.find("inf,") != std::string::npos);

    const json j = json::parse(io::matrix_to_json(k));
    CHECK(j["kind"] == "stochastic");
    CHECK(j["n"] == 10);
    CHECK(j["states"].size() == 9);
    CHECK(j["rows"].size() == 9);
    CHECK(j["rows"][8][1] == doctest::Approx(0.2));

    const json jc = json::parse(io::matrix_to_json(chain::build_c()));
    CHECK(jc["kind"] == "generator");
    CHECK(!jc.contains("n"));
}

TEST_CASE("floats render with 12 significant digits") {
    CHECK(io::format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(io::format_double(0.24923118304930245) == "0.249231183049");
    CHECK(io::round_sig(0.24923118304930245) == 0.249231183049);
    CHECK(io::format_double(424) == "424");
}

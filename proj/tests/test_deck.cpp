#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "r2r/deck.hpp"

using namespace r2r;

namespace {

Deck deck(std::vector<Card> v) { return Deck(std::move(v)); }

}  // namespace

TEST_CASE("apply_shuffle moves one card and keeps relative order") {
    CHECK(apply_shuffle(deck({1, 2, 3}), {1, 3}) == deck({2, 3, 1}));
    CHECK(apply_shuffle(deck({1, 2, 3}), {2, 2}) == deck({2, 1, 3}));
    CHECK(apply_shuffle(deck({1, 3, 4, 2}), {1, 2}) == deck({3, 4, 2, 1}));
}

TEST_CASE("apply_shuffle rejects labels outside the deck") {
    CHECK_THROWS_AS(apply_shuffle(deck({1, 2, 3}), {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(apply_shuffle(deck({1, 2, 3}), {1, 4}), std::invalid_argument);
}

TEST_CASE("deck validation") {
    CHECK_THROWS_AS(deck({1, 1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(deck({1, 2, 5}), std::invalid_argument);
    CHECK(Deck::identity(4) == deck({1, 2, 3, 4}));
    CHECK(deck({2, 3, 1}).position_of(1) == 3);
}

TEST_CASE("apply_path returns the whole trajectory") {
    const ShufflePath path{{1, 1}, {1, 4}, {2, 3}};
    const auto traj = apply_path(deck({1, 3, 4, 2}), path);
    REQUIRE(traj.size() == 4);
    CHECK(traj[0] == deck({1, 3, 4, 2}));
    CHECK(traj[1] == deck({1, 3, 4, 2}));  // 1>1 re-inserts at the front it came from
    CHECK(traj[2] == deck({3, 4, 1, 2}));
    CHECK(traj[3] == deck({3, 2, 4, 1}));

    CHECK(apply_path(deck({2, 1, 3}), {}).size() == 1);
    CHECK(apply_path(deck({1, 2}), {{1, 2}}).back() == deck({2, 1}));
}

TEST_CASE("random_shuffle is uniform over the n^2 cells") {
    Xoshiro256StarStar rng(12345);
    SUBCASE("n=1 has a single option") {
        for (int i = 0; i < 50; ++i) CHECK(random_shuffle(rng, 1) == Shuffle{1, 1});
    }
    SUBCASE("n=5 cell frequencies within 4 standard errors of 1/25") {
        constexpr int kDraws = 1000000;
        std::map<std::pair<Card, Card>, int> counts;
        for (int i = 0; i < kDraws; ++i) {
            const Shuffle s = random_shuffle(rng, 5);
            ++counts[{s.a, s.b}];
        }
        REQUIRE(counts.size() == 25);
        const double se = std::sqrt(0.04 * 0.96 / kDraws);
        for (const auto& [cell, count] : counts) {
            const double freq = static_cast<double>(count) / kDraws;
            CHECK(std::abs(freq - 0.04) <= 4 * se);
        }
    }
    SUBCASE("identical seeds give identical streams") {
        Xoshiro256StarStar a(99), b(99);
        for (int i = 0; i < 200; ++i) CHECK(random_shuffle(a, 7) == random_shuffle(b, 7));
    }
}

TEST_CASE("transpose_relabel") {
    CHECK(transpose_relabel({1, 4}, 1, 2) == Shuffle{2, 4});
    CHECK(transpose_relabel({1, 2}, 1, 2) == Shuffle{2, 1});
    CHECK(transpose_relabel({3, 3}, 1, 2) == Shuffle{3, 3});
    CHECK_THROWS_AS(transpose_relabel({1, 2}, 3, 3), std::invalid_argument);
}

TEST_CASE("swap_cards exchanges two positions and is an involution") {
    CHECK(swap_cards(deck({1, 2, 3}), 1, 2) == deck({2, 1, 3}));
    CHECK(swap_cards(deck({1, 3, 4, 2}), 1, 2) == deck({2, 3, 4, 1}));
    Xoshiro256StarStar rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const Deck d = unrank_deck(rng.below(factorial(6)), 6);
        const Card i = static_cast<Card>(1 + rng.below(6));
        Card j = static_cast<Card>(1 + rng.below(6));
        if (i == j) j = i == 6 ? 1 : i + 1;
        CHECK(swap_cards(swap_cards(d, i, j), i, j) == d);
    }
}

TEST_CASE("rank/unrank is the lexicographic index") {
    // oracle: lexicographic enumeration via std::next_permutation
    std::vector<Card> order{1, 2, 3};
    std::uint64_t expected = 0;
    do {
        CHECK(rank_deck(deck(order)) == expected);
        CHECK(unrank_deck(expected, 3) == deck(order));
        ++expected;
    } while (std::next_permutation(order.begin(), order.end()));

    CHECK(rank_deck(deck({1, 2, 3})) == 0);
    CHECK(rank_deck(deck({2, 1, 3})) == 2);
    CHECK(unrank_deck(5, 3) == deck({3, 2, 1}));
    CHECK_THROWS_AS(unrank_deck(6, 3), std::invalid_argument);
}

TEST_CASE("rank is a bijection for n <= 5") {
    for (int n = 1; n <= 5; ++n) {
        std::vector<char> seen(factorial(n), 0);
        std::vector<Card> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 1);
        do {
            const std::uint64_t r = rank_deck(deck(order));
            REQUIRE(r < factorial(n));
            CHECK(!seen[r]);
            seen[r] = 1;
            CHECK(unrank_deck(r, n) == deck(order));
        } while (std::next_permutation(order.begin(), order.end()));
        CHECK(std::count(seen.begin(), seen.end(), 1) ==
              static_cast<std::ptrdiff_t>(factorial(n)));
    }
}

TEST_CASE("moves preserve the label multiset") {
    Xoshiro256StarStar rng(2024);
    std::vector<Card> order = Deck::identity(6).order();
    for (int t = 0; t < 500; ++t) {
        apply_shuffle_inplace(order, random_shuffle(rng, 6));
        std::vector<Card> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == Deck::identity(6).order());
    }
}

TEST_CASE("the diagonal move puts its card leftmost") {
    Xoshiro256StarStar rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const Deck d = unrank_deck(rng.below(factorial(5)), 5);
        const Card a = static_cast<Card>(1 + rng.below(5));
        CHECK(apply_shuffle(d, {a, a}).order().front() == a);
    }
}

TEST_CASE("one-step kernel is doubly stochastic (n <= 4 enumeration)") {
    for (int n : {3, 4}) {
        const std::uint64_t nfact = factorial(n);
        std::vector<std::uint64_t> column_counts(nfact, 0);
        for (std::uint64_t r = 0; r < nfact; ++r) {
            const Deck d = unrank_deck(r, n);
            int moves = 0;
            for (Card a = 1; a <= n; ++a)
                for (Card b = 1; b <= n; ++b) {
                    ++column_counts[rank_deck(apply_shuffle(d, {a, b}))];
                    ++moves;
                }
            CHECK(moves == n * n);
        }
        for (std::uint64_t count : column_counts)
            CHECK(count == static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n));
    }
}

TEST_CASE("substream derivation is deterministic and index-sensitive") {
    const SeedSpec spec{42};
    Xoshiro256StarStar a = spec.stream(0);
    Xoshiro256StarStar b = spec.stream(0);
    Xoshiro256StarStar c = spec.stream(1);
    bool differs = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        if (va != c.next()) differs = true;
    }
    CHECK(differs);
}

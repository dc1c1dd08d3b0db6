#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "r2r/coupling.hpp"

using namespace r2r;

namespace {

const SpecialPair kPair{1, 2};
const CouplingVariant kAmended{GoodTimeRule::amended, QueueMembership::self_exclusive};
const CouplingVariant kStrict{GoodTimeRule::strict, QueueMembership::self_exclusive};
const CouplingVariant kLiteral{GoodTimeRule::amended, QueueMembership::literal};

QueueState qs(std::set<Card> m) { return QueueState{std::move(m)}; }

ShufflePath decode_path(std::uint64_t code, int k, int n) {
    ShufflePath p(static_cast<size_t>(k));
    for (int t = 0; t < k; ++t) {
        const auto digit = static_cast<int>(code % static_cast<std::uint64_t>(n * n));
        code /= static_cast<std::uint64_t>(n * n);
        p[static_cast<size_t>(t)] =
            Shuffle{static_cast<Card>(digit / n + 1), static_cast<Card>(digit % n + 1)};
    }
    return p;
}

std::set<Card> relabeled(const std::set<Card>& members, SpecialPair pair) {
    std::set<Card> out;
    for (Card c : members)
        out.insert(c == pair.i ? pair.j : (c == pair.j ? pair.i : c));
    return out;
}

}  // namespace

TEST_CASE("queue_step follows the four-branch rule") {
    CHECK(queue_step(qs({2}), {3, 2}, kPair, kAmended) == qs({2, 3}));
    CHECK(queue_step(qs({2, 3}), {1, 5}, kPair, kAmended) == qs({2}));
    // the two membership readings split exactly on b == a
    CHECK(queue_step(qs({2, 3}), {3, 3}, kPair, kAmended) == qs({2}));
    CHECK(queue_step(qs({2, 3}), {3, 3}, kPair, kLiteral) == qs({2, 3}));
}

TEST_CASE("queue_trajectory starts empty and applies steps") {
    CHECK(queue_trajectory({{3, 3}}, kPair, kAmended) ==
          std::vector<QueueState>{qs({}), qs({})});
    CHECK(queue_trajectory({{1, 1}, {1, 4}, {2, 3}}, kPair, kAmended) ==
          std::vector<QueueState>{qs({}), qs({2}), qs({2}), qs({1})});
    CHECK(queue_trajectory({{1, 3}, {4, 2}, {4, 4}}, kPair, kAmended) ==
          std::vector<QueueState>{qs({}), qs({2}), qs({2, 4}), qs({2})});
}

TEST_CASE("good_times") {
    CHECK(good_times({{1, 3}, {2, 4}}, kPair, kAmended) == std::vector<int>{1});
    // t=1 fails because the same card moves at the completing time
    CHECK(good_times({{1, 1}, {1, 4}, {2, 3}}, kPair, kAmended) == std::vector<int>{2});
    CHECK(good_times({{3, 3}}, kPair, kAmended).empty());
}

TEST_CASE("last_good_time") {
    CHECK(last_good_time({{1, 3}, {2, 4}}, kPair, kAmended) == 1);
    CHECK(last_good_time({{3, 3}}, kPair, kAmended) == std::nullopt);
    CHECK(last_good_time({{1, 1}, {1, 4}, {2, 3}}, kPair, kAmended) == 2);
}

TEST_CASE("theta relabels strictly before T") {
    CHECK(theta({{1, 1}, {1, 4}, {2, 3}}, kPair, kAmended) ==
          ShufflePath{{2, 2}, {1, 4}, {2, 3}});
    CHECK(theta({{1, 3}, {2, 4}}, kPair, kAmended) == ShufflePath{{1, 3}, {2, 4}});
    // no good time: the whole path is relabeled
    CHECK(theta({{1, 3}}, kPair, kAmended) == ShufflePath{{2, 3}});
}

TEST_CASE("run_coupled examples") {
    SUBCASE("amended run coalesces at T=2") {
        const auto out = run_coupled(Deck({1, 3, 4, 2}), kPair, {{1, 1}, {1, 4}, {2, 3}},
                                     kAmended);
        CHECK(out.T == 2);
        CHECK(out.coalesced);
        CHECK(out.x_final == Deck({3, 2, 4, 1}));
        CHECK(out.x_prime_final == Deck({3, 2, 4, 1}));
        CHECK(out.good_times == std::vector<int>{2});
    }
    SUBCASE("strict rule admits a T<k path that fails to meet") {
        const auto out = run_coupled(Deck({1, 3, 4, 2}), kPair, {{1, 2}, {2, 3}, {3, 3}},
                                     kStrict);
        CHECK(out.T == 1);
        CHECK_FALSE(out.coalesced);
        CHECK(out.x_final == Deck({3, 2, 4, 1}));
        CHECK(out.x_prime_final == Deck({3, 1, 2, 4}));
    }
    SUBCASE("no good time leaves the decks swapped") {
        const auto out = run_coupled(Deck({1, 2}), kPair, {{2, 2}}, kAmended);
        CHECK(out.T == std::nullopt);
        CHECK_FALSE(out.coalesced);
        CHECK(out.good_times.empty());
    }
}

TEST_CASE("theta is an involution that preserves T and special times") {
    for (const CouplingVariant& v : {kAmended, kStrict}) {
        for (int n : {4, 8}) {
            SeedSpec seed{100u + static_cast<std::uint64_t>(n)};
            for (std::uint64_t rep = 0; rep < 2000; ++rep) {
                Xoshiro256StarStar rng = seed.stream(rep);
                const ShufflePath p = random_path(rng, n, 5 * n);
                const ShufflePath tp = theta(p, kPair, v);
                REQUIRE(tp.size() == p.size());
                CHECK(theta(tp, kPair, v) == p);
                CHECK(last_good_time(tp, kPair, v) == last_good_time(p, kPair, v));
                for (size_t t = 0; t < p.size(); ++t)
                    CHECK(kPair.is_special(p[t].a) == kPair.is_special(tp[t].a));
            }
        }
    }
}

TEST_CASE("theta queue agrees after T and is relabeled before T") {
    SeedSpec seed{555};
    for (std::uint64_t rep = 0; rep < 500; ++rep) {
        Xoshiro256StarStar rng = seed.stream(rep);
        const ShufflePath p = random_path(rng, 6, 30);
        const auto T = last_good_time(p, kPair, kAmended);
        const ShufflePath tp = theta(p, kPair, kAmended);
        const auto q = queue_trajectory(p, kPair, kAmended);
        const auto tq = queue_trajectory(tp, kPair, kAmended);
        const size_t boundary = T ? static_cast<size_t>(*T) : p.size() + 1;
        for (size_t t = 0; t < q.size(); ++t) {
            if (t >= boundary)
                CHECK(tq[t] == q[t]);
            else
                CHECK(tq[t].members == relabeled(q[t].members, kPair));
        }
    }
}

TEST_CASE("queue keeps exactly one special card once seeded") {
    SeedSpec seed{777};
    for (std::uint64_t rep = 0; rep < 300; ++rep) {
        Xoshiro256StarStar rng = seed.stream(rep);
        const ShufflePath p = random_path(rng, 7, 40);
        bool seeded = false;
        for (const QueueState& q : queue_trajectory(p, kPair, kAmended)) {
            const int specials = static_cast<int>(q.contains(kPair.i)) +
                                 static_cast<int>(q.contains(kPair.j));
            if (!seeded && q.size() > 0) seeded = true;
            if (seeded)
                CHECK(specials == 1);
            else
                CHECK(q.size() == 0);
        }
    }
}

TEST_CASE("theta is a bijection on every path space at n=3, k<=3") {
    for (const CouplingVariant& v : {kAmended, kStrict}) {
        for (int k = 1; k <= 3; ++k) {
            std::uint64_t total = 1;
            for (int i = 0; i < k; ++i) total *= 9;
            std::vector<char> hit(total, 0);
            for (std::uint64_t code = 0; code < total; ++code) {
                const ShufflePath p = decode_path(code, k, 3);
                const ShufflePath tp = theta(p, kPair, v);
                CHECK(theta(tp, kPair, v) == p);
                std::uint64_t image = 0;
                for (int t = k - 1; t >= 0; --t)
                    image = image * 9 +
                            static_cast<std::uint64_t>((tp[static_cast<size_t>(t)].a - 1) * 3 +
                                                       (tp[static_cast<size_t>(t)].b - 1));
                CHECK(!hit[image]);
                hit[image] = 1;
            }
        }
    }
}

TEST_CASE("amended variant coalesces whenever T is finite (exhaustive small cases)") {
    for (int n : {3, 4}) {
        const int k = 4;
        std::uint64_t total = 1;
        for (int i = 0; i < k; ++i) total *= static_cast<std::uint64_t>(n) * n;
        std::uint64_t finite_T = 0;
        for (std::uint64_t code = 0; code < total; ++code) {
            const ShufflePath p = decode_path(code, k, n);
            const auto out = run_coupled(Deck::identity(n), kPair, p, kAmended);
            if (out.T) {
                ++finite_T;
                CHECK(out.coalesced);
            }
        }
        CHECK(finite_T > 0);
    }
}

TEST_CASE("amended variant coalesces whenever T is finite (sampled, larger deck)") {
    SeedSpec seed{31337};
    std::uint64_t finite_T = 0;
    for (std::uint64_t rep = 0; rep < 3000; ++rep) {
        Xoshiro256StarStar rng = seed.stream(rep);
        const ShufflePath p = random_path(rng, 6, 48);
        const auto out = run_coupled(Deck::identity(6), kPair, p, kAmended);
        if (out.T) {
            ++finite_T;
            CHECK(out.coalesced);
        }
        CHECK(out.coalesced == (out.x_final == out.x_prime_final));
        if (!out.good_times.empty()) CHECK(out.T == out.good_times.back());
    }
    CHECK(finite_T > 2000);
}

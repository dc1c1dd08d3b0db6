#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "r2r/chain.hpp"

using namespace r2r;
using namespace r2r::chain;

TEST_CASE("q and p rates match the closed forms at n=10") {
    CHECK(q_rate(1, 10) == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(q_rate(2, 10) == doctest::Approx(0.29).epsilon(1e-15));
    CHECK(q_rate(3, 10) == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(p_rate(1, 10) == doctest::Approx(0.08).epsilon(1e-15));
    CHECK(p_rate(2, 10) == doctest::Approx(0.14).epsilon(1e-15));
    CHECK(p_rate(3, 10) == doctest::Approx(0.18).epsilon(1e-15));
    CHECK_THROWS_AS(q_rate(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(p_rate(11, 10), std::invalid_argument);
}

TEST_CASE("y_step transition frequencies") {
    Xoshiro256StarStar rng(2468);
    SUBCASE("absorbing state stays put") {
        for (int i = 0; i < 100; ++i) CHECK(y_step(0, rng, 10) == 0);
    }
    SUBCASE("from infinity: 1 with probability 2/n") {
        constexpr int kDraws = 100000;
        int ones = 0;
        for (int i = 0; i < kDraws; ++i) {
            const YValue next = y_step(y_infinity, rng, 10);
            if (next == 1)
                ++ones;
            else
                CHECK(next == y_infinity);
        }
        const double se = std::sqrt(0.2 * 0.8 / kDraws);
        CHECK(std::abs(ones / static_cast<double>(kDraws) - 0.2) <= 4 * se);
    }
    SUBCASE("from 3 at n=10: (.16, .18, .20, .46) split") {
        constexpr int kDraws = 200000;
        int down = 0, up = 0, reset = 0, stay = 0;
        for (int i = 0; i < kDraws; ++i) {
            switch (y_step(3, rng, 10)) {
                case 2: ++down; break;
                case 4: ++up; break;
                case 1: ++reset; break;
                case 3: ++stay; break;
                default: FAIL("unexpected state");
            }
        }
        auto within = [&](int count, double p) {
            const double se = std::sqrt(p * (1 - p) / kDraws);
            return std::abs(count / static_cast<double>(kDraws) - p) <= 4 * se;
        };
        CHECK(within(down, 0.16));
        CHECK(within(up, 0.18));
        CHECK(within(reset, 0.20));
        CHECK(within(stay, 0.46));
    }
}

TEST_CASE("build_ktilde rows at n=10") {
    const TransitionMatrix k = build_ktilde(10);
    REQUIRE(k.size == 9);
    // row 3: [0, .2, .16, .46, .18, 0, 0, 0, 0]
    const std::vector<double> row3{0, .2, .16, .46, .18, 0, 0, 0, 0};
    for (int c = 0; c < 9; ++c) CHECK(k.at(3, c) == doctest::Approx(row3[static_cast<size_t>(c)]).epsilon(1e-15));
    // row inf: [0, .2, 0, ..., 0, .8]
    CHECK(k.at(8, 1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(k.at(8, 8) == doctest::Approx(0.8).epsilon(1e-15));
    // row 7: births route to infinity
    CHECK(k.at(7, 6) == doctest::Approx(0.24).epsilon(1e-15));
    CHECK(k.at(7, 1) == doctest::Approx(0.20).epsilon(1e-15));
    CHECK(k.at(7, 8) == doctest::Approx(0.14).epsilon(1e-15));
    CHECK(k.at(7, 7) == doctest::Approx(0.42).epsilon(1e-15));

    CHECK_THROWS_AS(build_ktilde(8), std::invalid_argument);
}

TEST_CASE("row sums and signs for the chain matrices") {
    for (int n : {9, 10, 100, 1000}) {
        const TransitionMatrix k = build_ktilde(n);
        for (int r = 0; r < 9; ++r) {
            double sum = 0;
            for (int c = 0; c < 9; ++c) {
                CHECK(k.at(r, c) >= 0);
                sum += k.at(r, c);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        }
        const TransitionMatrix g = scaled_generator(n);
        for (int r = 0; r < 9; ++r) {
            double sum = 0;
            for (int c = 0; c < 9; ++c) sum += g.at(r, c);
            CHECK(std::abs(sum) <= 1e-12);
        }
    }
}

TEST_CASE("scaled_generator entries are exact rationals over n") {
    for (int n : {9, 10, 100, 1000, 10000})
        CHECK(scaled_generator(n).at(1, 0) == 1.0);  // n * q(1), exactly
    const TransitionMatrix g = scaled_generator(100);
    CHECK(g.at(2, 1) == doctest::Approx(2.99).epsilon(1e-15));
    CHECK(g.at(3, 2) == doctest::Approx(1.96).epsilon(1e-15));
}

TEST_CASE("the limit matrix as printed") {
    const TransitionMatrix c = build_c();
    for (int col = 0; col < 9; ++col) CHECK(c.at(0, col) == 0.0);
    CHECK(c.at(4, 5) == 4.0);
    CHECK(c.at(7, 7) == -15.0);
    CHECK(c.at(8, 1) == 2.0);
    CHECK(c.at(8, 8) == -2.0);
}

TEST_CASE("verify_limit decays like 92/n") {
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {100, 1000, 10000}) {
        const double err = verify_limit(n);
        CHECK(std::abs(err - 92.0 / n) <= 1e-10);
        CHECK(err <= 100.0 / n);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("second largest eigenvalue of a 2-state absorbing chain is 1-q") {
    for (double q : {0.3, 0.75, 1.0}) {
        const TransitionMatrix m =
            TransitionMatrix::stochastic(2, {1.0, 0.0, q, 1.0 - q});
        CHECK(second_largest_eigenvalue(m) == doctest::Approx(1.0 - q).epsilon(1e-12));
    }
}

TEST_CASE("eigenvalue of the limit matrix") {
    const EigenvalueReport rep = second_largest_eigenvalue_report(build_c());
    // frozen from an independent dense eigensolver run
    CHECK(rep.lambda == doctest::Approx(-0.6526613387473585).epsilon(1e-9));
    CHECK(rep.lambda < -0.6526);
    CHECK(1.0 / std::abs(rep.lambda) < 1.5324);
    CHECK(std::abs(rep.power_estimate - rep.poly_estimate) <= 1e-8);
    CHECK(rep.method == "power+poly");
    CHECK(rep.iterations > 0);
    CHECK(rep.residual < 1e-9);
}

TEST_CASE("finite-n eigenvalues approach the limit") {
    // frozen from an independent dense eigensolver run
    CHECK(second_largest_eigenvalue(scaled_generator(100)) ==
          doctest::Approx(-0.6569243364276176).epsilon(1e-7));
    CHECK(second_largest_eigenvalue(build_ktilde(10)) ==
          doctest::Approx(0.9301374294379754).epsilon(1e-8));
    CHECK(second_largest_eigenvalue(build_ktilde(50)) ==
          doctest::Approx(0.9867748778303289).epsilon(1e-8));

    const double lambda_c = second_largest_eigenvalue(build_c());
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n : {100, 1000, 10000}) {
        const double gap =
            std::abs(second_largest_eigenvalue(scaled_generator(n)) - lambda_c);
        CHECK(gap <= 10.0 / n);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("eigenvalue input validation") {
    // non-absorbing first state
    CHECK_THROWS_AS(
        second_largest_eigenvalue(TransitionMatrix::stochastic(2, {0.5, 0.5, 0.5, 0.5})),
        std::invalid_argument);
    // generator whose shifted block goes negative
    CHECK_THROWS_AS(
        second_largest_eigenvalue(TransitionMatrix::generator(2, {0.0, 0.0, 20.0, -20.0})),
        std::invalid_argument);
}

TEST_CASE("matrix factories enforce the row invariants") {
    CHECK_THROWS_AS(TransitionMatrix::stochastic(2, {0.9, 0.2, 0.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::stochastic(2, {1.1, -0.1, 0.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::generator(2, {0.0, 0.0, -1.0, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("exact truncated-chain distribution") {
    SUBCASE("t=0 is a point mass at infinity") {
        const std::vector<double> d = ytilde_distribution(10, 0);
        CHECK(d[8] == 1.0);
        CHECK(std::accumulate(d.begin(), d.end(), 0.0) == doctest::Approx(1.0));
    }
    SUBCASE("one step from infinity") {
        const std::vector<double> d = ytilde_distribution(10, 1);
        CHECK(d[1] == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(d[8] == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("mass is conserved to 1e-12 out to t=10^4") {
        for (int t : {10, 100, 1000, 10000}) {
            const std::vector<double> d = ytilde_distribution(20, t);
            double mass = 0;
            for (double w : d) {
                CHECK(w >= 0);
                mass += w;
            }
            CHECK(std::abs(mass - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("l2 diagnostic: Cauchy-Schwarz holds exactly, ratio reported") {
    const L2Diagnostic diag = l2_ratio_diagnostic(50, 1000);
    CHECK(diag.cauchy_schwarz_ok);
    CHECK(diag.sup_ratio > 0);
    CHECK(std::isfinite(diag.sup_ratio));
    MESSAGE("sup_k ||dist||_2 / lambda^k = ", diag.sup_ratio, " at k=", diag.argmax_k);
}

TEST_CASE("dominance check") {
    SUBCASE("t=0 cells show zero violation") {
        const DominanceResult res = dominance_check(20, 10, 2000, SeedSpec{1}, 10);
        for (const DominanceCell& cell : res.grid)
            if (cell.t == 0) CHECK(cell.z == 0.0);
    }
    SUBCASE("no violation beyond noise at a small configuration") {
        const DominanceResult res = dominance_check(20, 60, 20000, SeedSpec{9});
        CHECK(res.max_z <= 3.0);
        CHECK(res.samples == 20000);
    }
}

TEST_CASE("survival and mixing bounds") {
    CHECK(survival_bound(50, 391) == doctest::Approx(0.006076466012124555).epsilon(1e-12));
    CHECK(survival_bound(50, 392) == doctest::Approx(0.005997671310541002).epsilon(1e-12));

    CHECK(mixing_bound(52, 0.25) == 424);
    const double v = analytic_tv_bound(52, 424);
    CHECK(v == doctest::Approx(0.24923118304930245).epsilon(1e-12));
    CHECK(v <= 0.25);
    CHECK(analytic_tv_bound(52, 423) > 0.25);

    // t* is the first time the analytic bound dips under eps
    for (int n : {10, 50, 200}) {
        for (double eps : {0.5, 0.25, 0.01}) {
            const std::int64_t t = mixing_bound(n, eps);
            CHECK(analytic_tv_bound(n, t) <= eps);
            if (t > 0) CHECK(analytic_tv_bound(n, t - 1) > eps);
        }
    }
    CHECK_THROWS_AS(mixing_bound(52, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mixing_bound(52, 1.0), std::invalid_argument);

    const BoundConstants c;
    CHECK(c.mixing_constant * c.decay_rate > 1.0);
}

#include "r2r/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace r2r::mc {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Splits [0, total) into contiguous index ranges, one per worker. Each
// trajectory derives its stream from its own index, so the tallies are
// identical for every thread count.
template <typename Body>
void run_partitioned(std::uint64_t total, int threads, Body body) {
    if (threads < 1) threads = 1;
    if (threads == 1 || total < 2) {
        body(0, std::uint64_t{0}, total);
        return;
    }
    const std::uint64_t chunk = (total + threads - 1) / static_cast<std::uint64_t>(threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
        const std::uint64_t end = std::min(total, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(body, w, begin, end);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

EstimateWithCI wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("wilson interval needs trials > 0");
    if (successes > trials) throw std::invalid_argument("successes > trials");
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nt;
    const double center = (p + z2 / (2.0 * nt)) / denom;
    const double half =
        kZ95 * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    EstimateWithCI e;
    e.point = p;
    // clamp away sub-ulp inversions at p = 0 or 1
    e.lo = std::max(0.0, std::min(center - half, p));
    e.hi = std::min(1.0, std::max(center + half, p));
    e.samples = trials;
    return e;
}

EstimateWithCI estimate_T_tail(int n, int k, std::uint64_t samples, SeedSpec seed,
                               CouplingVariant variant, int threads) {
    if (n < 3) throw std::invalid_argument("tail estimate needs n >= 3");
    if (k < 1) throw std::invalid_argument("tail estimate needs k >= 1");
    if (samples == 0) throw std::invalid_argument("samples must be > 0");

    const SpecialPair pair{1, 2};
    std::vector<std::uint64_t> tail_counts(static_cast<size_t>(std::max(threads, 1)), 0);
    run_partitioned(samples, threads, [&](int slot, std::uint64_t begin, std::uint64_t end) {
        std::uint64_t local = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            Xoshiro256StarStar rng = seed.stream(i);
            GoodTimeScanner scanner(n, pair, variant);
            for (int t = 0; t < k; ++t) scanner.feed(random_shuffle(rng, n));
            if (!scanner.last_good()) ++local;
        }
        tail_counts[static_cast<size_t>(slot)] += local;
    });
    std::uint64_t tail = 0;
    for (std::uint64_t c : tail_counts) tail += c;
    return wilson_interval(tail, samples);
}

NonCoalescenceResult estimate_noncoalescence(int n, int k, std::uint64_t samples,
                                             SeedSpec seed, CouplingVariant variant,
                                             int threads) {
    if (n < 3) throw std::invalid_argument("coupled runs need n >= 3");
    if (k < 1) throw std::invalid_argument("coupled runs need k >= 1");
    if (samples == 0) throw std::invalid_argument("samples must be > 0");

    const SpecialPair pair{1, 2};
    struct Tally {
        std::uint64_t noncoal = 0;
        std::uint64_t t_lt_k = 0;
        std::uint64_t cond_failures = 0;
    };
    std::vector<Tally> tallies(static_cast<size_t>(std::max(threads, 1)));

    run_partitioned(samples, threads, [&](int slot, std::uint64_t begin, std::uint64_t end) {
        Tally local;
        ShufflePath path(static_cast<size_t>(k));
        std::vector<Card> top, bottom;
        const std::vector<Card> identity = Deck::identity(n).order();
        std::vector<Card> swapped = swap_cards(Deck::identity(n), pair.i, pair.j).order();
        for (std::uint64_t i = begin; i < end; ++i) {
            Xoshiro256StarStar rng = seed.stream(i);
            GoodTimeScanner scanner(n, pair, variant);
            for (int t = 0; t < k; ++t) {
                path[static_cast<size_t>(t)] = random_shuffle(rng, n);
                scanner.feed(path[static_cast<size_t>(t)]);
            }
            const std::optional<int> T = scanner.last_good();
            const size_t relabel_limit = T ? static_cast<size_t>(*T - 1) : path.size();
            top = identity;
            bottom = swapped;
            for (size_t idx = 0; idx < path.size(); ++idx) {
                apply_shuffle_inplace(top, path[idx]);
                apply_shuffle_inplace(bottom, idx < relabel_limit
                                                  ? transpose_relabel(path[idx], pair.i, pair.j)
                                                  : path[idx]);
            }
            const bool differs = top != bottom;
            if (differs) ++local.noncoal;
            if (T) {  // finite T is always < k
                ++local.t_lt_k;
                if (differs) ++local.cond_failures;
            }
        }
        tallies[static_cast<size_t>(slot)] = local;
    });

    Tally total;
    for (const Tally& t : tallies) {
        total.noncoal += t.noncoal;
        total.t_lt_k += t.t_lt_k;
        total.cond_failures += t.cond_failures;
    }

    NonCoalescenceResult out;
    out.overall = wilson_interval(total.noncoal, samples);
    out.t_lt_k = total.t_lt_k;
    out.failures_given_t_lt_k = total.cond_failures;
    if (total.t_lt_k > 0)
        out.conditional = wilson_interval(total.cond_failures, total.t_lt_k);
    return out;
}

QueueRateTable queue_transition_stats(int n, std::uint64_t steps, SeedSpec seed,
                                      CouplingVariant variant, int l_max) {
    if (n < 9) throw std::invalid_argument("queue stats need n >= 9");
    if (steps == 0) throw std::invalid_argument("steps must be > 0");
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    l_max = std::min(l_max, n - 1);

    const SpecialPair pair{1, 2};
    detail::FastQueue queue(n);
    Card special_member = 0;  // 0 until the first special move

    std::vector<std::uint64_t> visits(static_cast<size_t>(l_max) + 1, 0);
    std::vector<std::uint64_t> down(static_cast<size_t>(l_max) + 1, 0);
    std::vector<std::uint64_t> up(static_cast<size_t>(l_max) + 1, 0);
    std::vector<std::uint64_t> resets(static_cast<size_t>(l_max) + 1, 0);

    Xoshiro256StarStar rng = seed.stream(0);
    for (std::uint64_t step = 0; step < steps; ++step) {
        const Shuffle s = random_shuffle(rng, n);
        const int l = queue.size();
        const bool tracked = l >= 1 && l <= l_max;
        if (tracked) ++visits[static_cast<size_t>(l)];

        if (pair.is_special(s.a)) {
            if (tracked) {
                if (l == 1) {
                    // absorption analog: the queue's own card moves
                    if (s.a == special_member) ++down[1];
                } else if (l == 2) {
                    ++down[2];  // the closed form for q(2) includes resets
                } else {
                    ++resets[static_cast<size_t>(l)];
                }
            }
            special_member = pair.other(s.a);
            queue.reset_to(special_member);
        } else {
            const bool member = variant.queue_membership == QueueMembership::literal
                                    ? queue.contains(s.b)
                                    : (s.b != s.a && queue.contains(s.b));
            if (member) {
                if (tracked && !queue.contains(s.a)) ++up[static_cast<size_t>(l)];
                queue.insert(s.a);
            } else {
                if (tracked && queue.contains(s.a) && l >= 2) ++down[static_cast<size_t>(l)];
                queue.erase(s.a);
            }
        }
    }

    QueueRateTable table;
    table.n = n;
    table.steps = steps;
    table.master_seed = seed.master;
    for (int l = 1; l <= l_max; ++l) {
        QueueRateRow row;
        row.l = l;
        row.visits = visits[static_cast<size_t>(l)];
        row.down = down[static_cast<size_t>(l)];
        row.up = up[static_cast<size_t>(l)];
        row.resets = resets[static_cast<size_t>(l)];
        row.q_theory = chain::q_rate(l, n);
        row.p_theory = chain::p_rate(l, n);
        row.reset_theory = l >= 3 ? 2.0 / n : 0.0;
        if (row.visits > 0) {
            const auto v = static_cast<double>(row.visits);
            row.q_hat = static_cast<double>(row.down) / v;
            row.p_hat = static_cast<double>(row.up) / v;
            row.reset_hat = static_cast<double>(row.resets) / v;
            auto z = [&](double hat, double theory) {
                const double se = std::sqrt(theory * (1.0 - theory) / v);
                return se > 0 ? (hat - theory) / se : 0.0;
            };
            row.z_q = z(row.q_hat, row.q_theory);
            row.z_p = z(row.p_hat, row.p_theory);
            row.z_reset = l >= 3 ? z(row.reset_hat, row.reset_theory) : 0.0;
        }
        table.rows.push_back(row);
    }
    return table;
}

std::vector<BoundCurveRow> coupling_bound_curve(int n, const std::vector<int>& k_list,
                                                std::uint64_t samples, SeedSpec seed,
                                                CouplingVariant variant, int threads) {
    std::vector<BoundCurveRow> rows;
    rows.reserve(k_list.size());
    for (size_t idx = 0; idx < k_list.size(); ++idx) {
        const int k = k_list[idx];
        // substreams must not repeat across the k grid
        SeedSpec sub{seed.master + 0x9E3779B97F4A7C15ULL * (idx + 1)};
        BoundCurveRow row;
        row.k = k;
        if (k == 0) {
            row.estimate = wilson_interval(samples, samples);  // distinct point masses
        } else {
            row.estimate =
                estimate_noncoalescence(n, k, samples, sub, variant, threads).overall;
        }
        row.empirical = (n - 1) * row.estimate.point;
        row.analytic = chain::analytic_tv_bound(n, k);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace r2r::mc

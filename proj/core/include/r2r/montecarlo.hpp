#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "r2r/chain.hpp"
#include "r2r/coupling.hpp"
#include "r2r/rng.hpp"

namespace r2r::mc {

// Bernoulli point estimate with a 95% Wilson score interval; Wilson stays
// honest near 0 and 1, where tail probabilities live.
struct EstimateWithCI {
    double point = 0;
    double lo = 0;
    double hi = 0;
    std::uint64_t samples = 0;
    std::string method = "wilson";
};

EstimateWithCI wilson_interval(std::uint64_t successes, std::uint64_t trials);

// Fraction of uniform random k-paths with no good time (T infinite; a finite
// T is always < k). Simulated with the queue process only, O(k) per
// trajectory and no deck state. Trajectory i uses substream i of the seed.
EstimateWithCI estimate_T_tail(int n, int k, std::uint64_t samples, SeedSpec seed,
                               CouplingVariant variant = {}, int threads = 1);

struct NonCoalescenceResult {
    EstimateWithCI overall;                       // P(x_k != x'_k)
    std::optional<EstimateWithCI> conditional;    // P(x_k != x'_k | T < k); nullopt if
                                                  // the conditioning event never happened
    std::uint64_t t_lt_k = 0;
    std::uint64_t failures_given_t_lt_k = 0;
};

// Full coupled deck runs from the identity and the identity with cards 1,2
// swapped.
NonCoalescenceResult estimate_noncoalescence(int n, int k, std::uint64_t samples,
                                             SeedSpec seed, CouplingVariant variant = {},
                                             int threads = 1);

struct QueueRateRow {
    int l = 0;
    std::uint64_t visits = 0;
    std::uint64_t down = 0;
    std::uint64_t up = 0;
    std::uint64_t resets = 0;
    double q_hat = 0;
    double q_theory = 0;
    double p_hat = 0;
    double p_theory = 0;
    double reset_hat = 0;
    double reset_theory = 0;
    double z_q = 0;  // (hat - theory) / sqrt(theory (1-theory) / visits)
    double z_p = 0;
    double z_reset = 0;
};

struct QueueRateTable {
    int n = 0;
    std::uint64_t steps = 0;
    std::uint64_t master_seed = 0;
    std::vector<QueueRateRow> rows;
};

// One long uniform move stream with the pair fixed to (1,2); tallies the
// per-size frequencies of queue-size transitions against the closed forms.
// The size-1 "down" event is the absorption analog: the move removes the
// card the queue consists of. Resets (jumps to size 1 off a special move)
// are tallied separately for l >= 3 and are part of q(2) for l = 2.
QueueRateTable queue_transition_stats(int n, std::uint64_t steps, SeedSpec seed,
                                      CouplingVariant variant = {}, int l_max = 8);

struct BoundCurveRow {
    int k = 0;
    double empirical = 0;  // (n-1) * P_hat(x_k != x'_k)
    double analytic = 0;   // (n-1) * e^{-a k / n}
    EstimateWithCI estimate;
};

// Empirical path-coupling upper bound on d(t) next to the analytic curve.
std::vector<BoundCurveRow> coupling_bound_curve(int n, const std::vector<int>& k_list,
                                                std::uint64_t samples, SeedSpec seed,
                                                CouplingVariant variant = {},
                                                int threads = 1);

}  // namespace r2r::mc

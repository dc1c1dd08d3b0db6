#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "r2r/rng.hpp"

namespace r2r::chain {

// Constants the mixing bound is built from. decay_rate is the per-step/n
// tail exponent, mixing_constant the n log n prefactor; the two are tied by
// mixing_constant * decay_rate > 1.
struct BoundConstants {
    double decay_rate = 0.6526;
    double mixing_constant = 1.5324;
    int truncation_level = 8;
    double eigen_shift = 1.0 / 16.0;
    double cauchy_schwarz_factor = 2.8284271247461903;  // sqrt(8)
};

// Queue-size birth rate q(l) and death rate p(l), the displayed closed
// forms:
//   q(1) = 1/n, q(2) = (3n-1)/n^2, q(l) = (l-1)(n-l+1)/n^2  (l >= 3)
//   p(1) = (n-2)/n^2, p(2) = (2n-6)/n^2, p(l) = l(n-l-1)/n^2 (l >= 3)
double q_rate(int l, int n);
double p_rate(int l, int n);

// Size process of the queue: starts at infinity, drops to 1 at the first
// i-or-j move, absorbs at 0 when a special card moves while the queue is
// exactly that singleton.
using YValue = int;
inline constexpr YValue y_infinity = std::numeric_limits<int>::max();

YValue y_step(YValue state, Xoshiro256StarStar& rng, int n);

// Dense matrix over the ordered states [0, 1, ..., 7, inf]; stochastic for
// the truncated chain, generator for its scaled differences and the limit.
struct TransitionMatrix {
    enum class Kind { stochastic, generator };

    Kind kind;
    int size = 0;
    std::optional<int> deck_size;  // absent for the limit matrix
    std::vector<double> entries;   // row-major
    std::vector<std::string> labels;

    double at(int r, int c) const { return entries[static_cast<size_t>(r) * size + c]; }
    double& at(int r, int c) { return entries[static_cast<size_t>(r) * size + c]; }

    // Both factories validate the row-sum invariant (1 within 1e-12 for
    // stochastic, 0 for generators) and sign constraints.
    static TransitionMatrix stochastic(int size, std::vector<double> entries,
                                       std::optional<int> deck_size = std::nullopt,
                                       std::vector<std::string> labels = {});
    static TransitionMatrix generator(int size, std::vector<double> entries,
                                      std::optional<int> deck_size = std::nullopt,
                                      std::vector<std::string> labels = {});
};

// Truncated 9-state chain: transitions to size 8 are rerouted to infinity.
// Requires n >= 9 so every displayed probability is a probability.
TransitionMatrix build_ktilde(int n);

// n * (Ktilde_n - I); rows sum to zero. Entries are exact integer ratios
// over n, so e.g. the (1 -> 0) entry is exactly 1 for every n.
TransitionMatrix scaled_generator(int n);

// Entrywise limit of scaled_generator(n) as printed, an integer matrix.
TransitionMatrix build_c();

// Max-entry distance between scaled_generator(n) and the limit; decays as
// 92/n (the slowest entry is the diagonal of state 7).
double verify_limit(int n);

struct EigenvalueReport {
    double lambda = 0;
    std::string method;
    int iterations = 0;
    double residual = 0;
    double power_estimate = 0;
    double poly_estimate = 0;
};

// Second largest eigenvalue of an absorbing chain, computed as the Perron
// root of the block with the absorbing state deleted. Stochastic input: the
// block itself is substochastic and nonnegative. Generator input G: the
// block of I + G/16 is nonnegative (diagonal minimum 1/16), its Perron root
// r gives back 16 (r - 1). Power iteration (Rayleigh tolerance 1e-12, cap
// 1e6 iterations) cross-checked against a Newton-polished root of the
// characteristic polynomial; the two must agree to 1e-8.
EigenvalueReport second_largest_eigenvalue_report(const TransitionMatrix& m);
double second_largest_eigenvalue(const TransitionMatrix& m);

// Exact distribution of the truncated chain after t steps from infinity.
std::vector<double> ytilde_distribution(int n, int t);

// sqrt of the sum of squared masses on states {1..7, inf} (state 0 left
// out); the l^2 quantity the eigenvalue comparison is made against.
double restricted_l2_norm(const std::vector<double>& dist);

struct DominanceCell {
    int t = 0;
    int m = 0;  // threshold: compares P(Y > m) against P(Ytilde > m)
    double empirical = 0;
    double exact = 0;
    double z = 0;  // signed (empirical - exact) / se
};

struct DominanceResult {
    double max_violation = 0;  // worst signed empirical - exact
    double max_z = 0;
    int at_t = 0;
    int at_m = 0;
    std::uint64_t samples = 0;
    std::vector<DominanceCell> grid;
};

// Monte Carlo CDF of the untruncated size process against the exact CDF of
// the truncated chain on the ordered 9-state projection, across a grid of
// times. Dominance means every signed violation stays within noise.
DominanceResult dominance_check(int n, int t_max, std::uint64_t samples, SeedSpec seed,
                                int grid_points = 10);

struct L2Diagnostic {
    double sup_ratio = 0;  // sup_k (restricted l2 norm at k) / lambda^k
    int argmax_k = 0;
    double lambda = 0;
    bool cauchy_schwarz_ok = false;  // P(Ytilde_k > 0) <= sqrt(8) * l2 norm, all k
};

// Measures the l^2-norm-vs-eigenvalue comparison instead of assuming it:
// the truncated chain is not normal, so the ratio to lambda^k can exceed 1
// by a bounded factor. The Cauchy-Schwarz side is an identity and must hold
// exactly.
L2Diagnostic l2_ratio_diagnostic(int n, int k_max);

double survival_bound(int n, int k, const BoundConstants& c = {});

// (n-1) e^{-a t / n}, the analytic worst-case TV bound at time t.
double analytic_tv_bound(int n, std::int64_t t, const BoundConstants& c = {});

// Smallest t with (n-1) e^{-a t / n} <= eps.
std::int64_t mixing_bound(int n, double eps, const BoundConstants& c = {});

}  // namespace r2r::chain

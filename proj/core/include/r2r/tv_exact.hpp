#pragma once

#include <cstdint>
#include <vector>

#include "r2r/deck.hpp"

namespace r2r::tv {

// Exact distribution over all n! decks, indexed by lexicographic rank.
// The default size cap keeps a single vector at 8! doubles; callers that
// really want more must raise the cap explicitly.
inline constexpr int kDefaultMaxN = 8;

struct DistOverSn {
    int n = 0;
    std::vector<double> weights;

    static DistOverSn point_mass(const Deck& deck);
    static DistOverSn uniform(int n);
};

// Applies the n^2-move averaging operator `steps` times. Partitions the
// source ranks across `threads` workers; partial outputs are combined in
// fixed index order, so a given thread count is fully deterministic.
DistOverSn evolve(const DistOverSn& dist, int steps, int threads = 1,
                  int max_n = kDefaultMaxN);

// Half l^1 distance, compensated summation.
double total_variation(const DistOverSn& mu, const DistOverSn& nu);

// Distance from uniform after t steps, started at the identity deck. The
// walk multiplies by independent uniform moves, so every start state gives
// the same curve; the start-state invariance test makes that checkable.
double d_exact(int n, int t, int max_n = kDefaultMaxN);
std::vector<double> d_exact_curve(int n, int t_max, int max_n = kDefaultMaxN);

// TV between the time-t laws started from the identity and from the
// identity with cards 1 and 2 swapped.
double adjacent_tv_exact(int n, int t, int max_n = kDefaultMaxN);
std::vector<double> adjacent_tv_curve(int n, int t_max, int max_n = kDefaultMaxN);

// Least t with d_exact(n, t) <= eps.
int mixing_time_exact(int n, double eps, int max_n = kDefaultMaxN);

}  // namespace r2r::tv

#pragma once

#include <cstdint>
#include <vector>

#include "r2r/rng.hpp"

namespace r2r {

// Cards are the labels 1..n.
using Card = std::int32_t;

// A single insertion move: remove card `a` and re-insert it immediately to
// the right of card `b`; the diagonal case a == b re-inserts at the leftmost
// position.
struct Shuffle {
    Card a = 0;
    Card b = 0;

    friend bool operator==(const Shuffle&, const Shuffle&) = default;
    bool moves(Card c) const { return a == c; }
};

using ShufflePath = std::vector<Shuffle>;

// A deck is the left-to-right order of the n cards; always a permutation of
// {1..n}. Position of card c (1-based) is the permutation value.
class Deck {
  public:
    explicit Deck(std::vector<Card> order);
    static Deck identity(int n);

    int size() const { return static_cast<int>(order_.size()); }
    const std::vector<Card>& order() const { return order_; }
    int position_of(Card c) const;  // 1-based

    friend bool operator==(const Deck&, const Deck&) = default;

  private:
    struct unchecked_tag {};
    Deck(std::vector<Card> order, unchecked_tag) : order_(std::move(order)) {}
    std::vector<Card> order_;

    friend Deck apply_shuffle(const Deck&, Shuffle);
    friend Deck swap_cards(const Deck&, Card, Card);
    friend Deck unrank_deck(std::uint64_t, int);
};

// In-place splice on a raw order vector; the workhorse for simulation loops.
void apply_shuffle_inplace(std::vector<Card>& order, Shuffle s);

Deck apply_shuffle(const Deck& deck, Shuffle s);

// Trajectory x_0 = deck, x_t = deck M_1 ... M_t; length k+1.
std::vector<Deck> apply_path(const Deck& deck, const ShufflePath& path);

// Uniform over all n^2 moves: a drawn first, then b.
Shuffle random_shuffle(Xoshiro256StarStar& rng, int n);

ShufflePath random_path(Xoshiro256StarStar& rng, int n, int k);

// Relabel a move through the transposition (i j).
Shuffle transpose_relabel(Shuffle s, Card i, Card j);

// Exchange the positions of cards i and j.
Deck swap_cards(const Deck& deck, Card i, Card j);

// Lexicographic index of the order sequence (factorial number system).
// Supports n <= 20 (the largest n with n! representable in 64 bits).
std::uint64_t rank_deck(const Deck& deck);
Deck unrank_deck(std::uint64_t r, int n);

std::uint64_t factorial(int n);

}  // namespace r2r

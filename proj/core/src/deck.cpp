#include "r2r/deck.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace r2r {

namespace {

void check_label(Card c, int n, const char* what) {
    if (c < 1 || c > n)
        throw std::invalid_argument(std::string(what) + " label " + std::to_string(c) +
                                    " outside 1.." + std::to_string(n));
}

}  // namespace

Deck::Deck(std::vector<Card> order) : order_(std::move(order)) {
    const int n = static_cast<int>(order_.size());
    std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
    for (Card c : order_) {
        check_label(c, n, "card");
        if (seen[static_cast<size_t>(c)]) //
            throw std::invalid_argument("duplicate card label " + std::to_string(c));
        seen[static_cast<size_t>(c)] = 1;
    }
}

Deck Deck::identity(int n) {
    if (n < 1) throw std::invalid_argument("deck size must be >= 1");
    std::vector<Card> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i + 1;
    return Deck(std::move(order), unchecked_tag{});
}

int Deck::position_of(Card c) const {
    auto it = std::find(order_.begin(), order_.end(), c);
    if (it == order_.end())
        throw std::invalid_argument("card " + std::to_string(c) + " not in deck");
    return static_cast<int>(it - order_.begin()) + 1;
}

void apply_shuffle_inplace(std::vector<Card>& order, Shuffle s) {
    const int n = static_cast<int>(order.size());
    check_label(s.a, n, "shuffle a");
    check_label(s.b, n, "shuffle b");
    auto it = std::find(order.begin(), order.end(), s.a);
    order.erase(it);
    if (s.a == s.b) {
        order.insert(order.begin(), s.a);
    } else {
        // destination is located after removal; this is what makes the move
        // well defined for every a != b
        auto dst = std::find(order.begin(), order.end(), s.b);
        order.insert(dst + 1, s.a);
    }
}

Deck apply_shuffle(const Deck& deck, Shuffle s) {
    std::vector<Card> order = deck.order();
    apply_shuffle_inplace(order, s);
    return Deck(std::move(order), Deck::unchecked_tag{});
}

std::vector<Deck> apply_path(const Deck& deck, const ShufflePath& path) {
    std::vector<Deck> trajectory;
    trajectory.reserve(path.size() + 1);
    trajectory.push_back(deck);
    for (Shuffle s : path) trajectory.push_back(apply_shuffle(trajectory.back(), s));
    return trajectory;
}

Shuffle random_shuffle(Xoshiro256StarStar& rng, int n) {
    if (n < 1) throw std::invalid_argument("deck size must be >= 1");
    const auto a = static_cast<Card>(1 + rng.below(static_cast<std::uint64_t>(n)));
    const auto b = static_cast<Card>(1 + rng.below(static_cast<std::uint64_t>(n)));
    return Shuffle{a, b};
}

ShufflePath random_path(Xoshiro256StarStar& rng, int n, int k) {
    ShufflePath path;
    path.reserve(static_cast<size_t>(k));
    for (int t = 0; t < k; ++t) path.push_back(random_shuffle(rng, n));
    return path;
}

Shuffle transpose_relabel(Shuffle s, Card i, Card j) {
    if (i == j) throw std::invalid_argument("transposition needs i != j");
    auto pi = [i, j](Card c) { return c == i ? j : (c == j ? i : c); };
    return Shuffle{pi(s.a), pi(s.b)};
}

Deck swap_cards(const Deck& deck, Card i, Card j) {
    if (i == j) throw std::invalid_argument("swap_cards needs i != j");
    std::vector<Card> order = deck.order();
    const int n = static_cast<int>(order.size());
    check_label(i, n, "card");
    check_label(j, n, "card");
    auto pi = std::find(order.begin(), order.end(), i);
    auto pj = std::find(order.begin(), order.end(), j);
    std::iter_swap(pi, pj);
    return Deck(std::move(order), Deck::unchecked_tag{});
}

std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw std::invalid_argument("factorial supports 0..20");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t rank_deck(const Deck& deck) {
    const auto& order = deck.order();
    const int n = deck.size();
    if (n > 20) throw std::invalid_argument("rank supports n <= 20");
    std::uint64_t r = 0;
    for (int i = 0; i < n; ++i) {
        std::uint64_t smaller_right = 0;
        for (int j = i + 1; j < n; ++j)
            if (order[static_cast<size_t>(j)] < order[static_cast<size_t>(i)]) ++smaller_right;
        r = r * static_cast<std::uint64_t>(n - i) + smaller_right;
    }
    return r;
}

Deck unrank_deck(std::uint64_t r, int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("unrank supports 1 <= n <= 20");
    if (r >= factorial(n))
        throw std::invalid_argument("rank " + std::to_string(r) + " >= n! for n = " +
                                    std::to_string(n));
    std::vector<Card> remaining(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) remaining[static_cast<size_t>(i)] = i + 1;
    std::vector<Card> order;
    order.reserve(static_cast<size_t>(n));
    std::uint64_t f = factorial(n);
    for (int i = 0; i < n; ++i) {
        f /= static_cast<std::uint64_t>(n - i);
        const auto digit = static_cast<size_t>(r / f);
        r %= f;
        order.push_back(remaining[digit]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return Deck(std::move(order), Deck::unchecked_tag{});
}

}  // namespace r2r

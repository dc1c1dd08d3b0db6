#include "r2r/coupling.hpp"

#include <algorithm>
#include <stdexcept>

namespace r2r {

QueueState queue_step(const QueueState& q, Shuffle s, SpecialPair pair, CouplingVariant v) {
    if (pair.i == pair.j) throw std::invalid_argument("special pair needs i != j");
    QueueState next = q;
    if (s.a == pair.j) {
        next.members = {pair.i};
        return next;
    }
    if (s.a == pair.i) {
        next.members = {pair.j};
        return next;
    }
    const bool member = v.queue_membership == QueueMembership::literal
                            ? q.contains(s.b)
                            : (s.b != s.a && q.contains(s.b));
    if (member)
        next.members.insert(s.a);
    else
        next.members.erase(s.a);
    return next;
}

std::vector<QueueState> queue_trajectory(const ShufflePath& path, SpecialPair pair,
                                         CouplingVariant v) {
    std::vector<QueueState> states;
    states.reserve(path.size() + 1);
    states.emplace_back();
    for (Shuffle s : path) states.push_back(queue_step(states.back(), s, pair, v));
    return states;
}

void GoodTimeScanner::feed(Shuffle s) {
    ++t_;
    if (pair_.is_special(s.a)) {
        // This move completes the previous i-or-j move if the queue (state
        // before this move) is a singleton and the other card moves now.
        if (prev_special_t_ != 0 && queue_.size() == 1 && s.a != prev_special_card_) {
            if (variant_.good_time_rule == GoodTimeRule::strict || !prev_cross_) {
                last_good_ = prev_special_t_;
                good_.push_back(prev_special_t_);
            }
        }
        prev_special_t_ = t_;
        prev_special_card_ = s.a;
        prev_cross_ = (s.b == pair_.other(s.a));
        queue_.reset_to(pair_.other(s.a));
    } else {
        const bool member = variant_.queue_membership == QueueMembership::literal
                                ? queue_.contains(s.b)
                                : (s.b != s.a && queue_.contains(s.b));
        if (member)
            queue_.insert(s.a);
        else
            queue_.erase(s.a);
    }
}

namespace {

int deck_size_for(const ShufflePath& path, SpecialPair pair) {
    Card n = std::max(pair.i, pair.j);
    for (Shuffle s : path) n = std::max({n, s.a, s.b});
    return n;
}

}  // namespace

std::vector<int> good_times(const ShufflePath& path, SpecialPair pair, CouplingVariant v) {
    GoodTimeScanner scanner(deck_size_for(path, pair), pair, v);
    for (Shuffle s : path) scanner.feed(s);
    return scanner.all_good();
}

std::optional<int> last_good_time(const ShufflePath& path, SpecialPair pair,
                                  CouplingVariant v) {
    GoodTimeScanner scanner(deck_size_for(path, pair), pair, v);
    for (Shuffle s : path) scanner.feed(s);
    return scanner.last_good();
}

ShufflePath theta(const ShufflePath& path, SpecialPair pair, CouplingVariant v) {
    const std::optional<int> T = last_good_time(path, pair, v);
    // times 1..T-1 are relabeled; T = inf relabels the whole path
    const size_t limit = T ? static_cast<size_t>(*T - 1) : path.size();
    ShufflePath out = path;
    for (size_t idx = 0; idx < limit; ++idx)
        out[idx] = transpose_relabel(out[idx], pair.i, pair.j);
    return out;
}

CoupledOutcome run_coupled(const Deck& x, SpecialPair pair, const ShufflePath& path,
                           CouplingVariant v) {
    const std::vector<int> good = good_times(path, pair, v);
    const std::optional<int> T =
        good.empty() ? std::nullopt : std::optional<int>(good.back());

    const size_t relabel_limit = T ? static_cast<size_t>(*T - 1) : path.size();

    std::vector<Card> top = x.order();
    std::vector<Card> bottom = swap_cards(x, pair.i, pair.j).order();
    for (size_t idx = 0; idx < path.size(); ++idx) {
        apply_shuffle_inplace(top, path[idx]);
        const Shuffle mirrored = idx < relabel_limit
                                     ? transpose_relabel(path[idx], pair.i, pair.j)
                                     : path[idx];
        apply_shuffle_inplace(bottom, mirrored);
    }

    CoupledOutcome out{T, top == bottom, Deck(top), Deck(bottom), good};
    return out;
}

}  // namespace r2r

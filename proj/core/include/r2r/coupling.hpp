#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "r2r/deck.hpp"

namespace r2r {

// The pair of cards whose transposition separates the two coupled decks.
struct SpecialPair {
    Card i = 0;
    Card j = 0;

    bool is_special(Card c) const { return c == i || c == j; }
    Card other(Card c) const { return c == i ? j : i; }
};

// Two independently documented readings of the construction.
//
// good_time_rule:
//   strict  - a good time is any i-or-j move completed by the next i-or-j
//             move at which the queue is a singleton and the other card
//             moves.
//   amended - additionally excludes M_{i,j} / M_{j,i} as the candidate
//             move. The strict rule admits paths where the two trajectories
//             fail to meet even though a good time precedes the horizon
//             (see run_coupled tests for a four-card witness); the amended
//             rule removes exactly those moves and keeps the i<->j symmetry
//             the involution needs.
//
// queue_membership: how the insertion target b is tested when card a is
//   re-inserted. self_exclusive tests b in Q \ {a}, which matches the
//   displaced-block meaning of the queue (a leftmost re-insert of a queue
//   member aligns it in both decks, so it must leave the queue). literal
//   tests b in Q.
enum class GoodTimeRule { strict, amended };
enum class QueueMembership { literal, self_exclusive };

struct CouplingVariant {
    GoodTimeRule good_time_rule = GoodTimeRule::amended;
    QueueMembership queue_membership = QueueMembership::self_exclusive;
};

// Set of cards currently displaced between the coupled decks. Once the first
// i-or-j move has happened the set always contains exactly one of {i, j}.
struct QueueState {
    std::set<Card> members;

    bool contains(Card c) const { return members.count(c) != 0; }
    std::size_t size() const { return members.size(); }
    friend bool operator==(const QueueState&, const QueueState&) = default;
};

QueueState queue_step(const QueueState& q, Shuffle s, SpecialPair pair, CouplingVariant v);

// Q_0 = empty set, Q_{t+1} = queue_step(Q_t, M_{t+1}); length k+1.
std::vector<QueueState> queue_trajectory(const ShufflePath& path, SpecialPair pair,
                                         CouplingVariant v);

// 1-based times t that qualify as good under the variant's rule.
std::vector<int> good_times(const ShufflePath& path, SpecialPair pair, CouplingVariant v);

// Largest good time, or nullopt when there is none (serialized as "inf").
std::optional<int> last_good_time(const ShufflePath& path, SpecialPair pair,
                                  CouplingVariant v);

// Swaps the roles of i and j in every move strictly before the last good
// time T (all moves when T is infinite). An involution on path space that
// preserves T, which is what makes the construction measure preserving.
ShufflePath theta(const ShufflePath& path, SpecialPair pair, CouplingVariant v);

struct CoupledOutcome {
    std::optional<int> T;  // nullopt = no good time
    bool coalesced = false;
    Deck x_final;
    Deck x_prime_final;
    std::vector<int> good_times;
};

// Runs x under the path and x' = (i j)x under theta(path); reports the last
// good time and whether the trajectories meet at the horizon.
CoupledOutcome run_coupled(const Deck& x, SpecialPair pair, const ShufflePath& path,
                           CouplingVariant v);

namespace detail {

// Flat-array queue with O(1) membership and amortized O(1) resets; the
// simulation loops use this instead of QueueState's std::set.
class FastQueue {
  public:
    explicit FastQueue(int n) : present_(static_cast<size_t>(n) + 1, 0) {}

    bool contains(Card c) const { return present_[static_cast<size_t>(c)] != 0; }
    int size() const { return static_cast<int>(members_.size()); }

    void insert(Card c) {
        if (!contains(c)) {
            present_[static_cast<size_t>(c)] = 1;
            members_.push_back(c);
        }
    }
    void erase(Card c) {
        if (contains(c)) {
            present_[static_cast<size_t>(c)] = 0;
            members_.erase(std::find(members_.begin(), members_.end(), c));
        }
    }
    void reset_to(Card c) {
        for (Card m : members_) present_[static_cast<size_t>(m)] = 0;
        members_.clear();
        insert(c);
    }
    const std::vector<Card>& members() const { return members_; }

  private:
    std::vector<std::uint8_t> present_;
    std::vector<Card> members_;
};

}  // namespace detail

// One-pass online detector for good times; needs no deck state, so tail
// estimates run in O(k) per trajectory. Feed moves in order (times 1..k).
class GoodTimeScanner {
  public:
    GoodTimeScanner(int n, SpecialPair pair, CouplingVariant v)
        : pair_(pair), variant_(v), queue_(n) {}

    void feed(Shuffle s);

    std::optional<int> last_good() const { return last_good_; }
    const std::vector<int>& all_good() const { return good_; }
    int time() const { return t_; }
    int queue_size() const { return queue_.size(); }

  private:
    SpecialPair pair_;
    CouplingVariant variant_;
    detail::FastQueue queue_;
    int t_ = 0;
    int prev_special_t_ = 0;  // 0 = none yet
    Card prev_special_card_ = 0;
    bool prev_cross_ = false;  // previous special move was M_{i,j} or M_{j,i}
    std::optional<int> last_good_;
    std::vector<int> good_;
};

}  // namespace r2r

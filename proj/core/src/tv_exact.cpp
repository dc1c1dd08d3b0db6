#include "r2r/tv_exact.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace r2r::tv {

namespace {

void check_size(int n, int max_n) {
    if (n < 1) throw std::invalid_argument("deck size must be >= 1");
    if (n > max_n)
        throw std::length_error("exact evolution over " + std::to_string(n) +
                                "! states exceeds the cap n <= " + std::to_string(max_n));
}

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0;
    double comp = 0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Precomputed one-step map: successor rank of every deck under every move.
class Evolver {
  public:
    explicit Evolver(int n)
        : nfact_(factorial(n)),
          moves_(static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n)),
          table_(nfact_ * moves_) {
        std::vector<Card> scratch;
        for (std::uint64_t r = 0; r < nfact_; ++r) {
            const Deck deck = unrank_deck(r, n);
            std::uint64_t s = 0;
            for (Card a = 1; a <= n; ++a)
                for (Card b = 1; b <= n; ++b, ++s) {
                    scratch = deck.order();
                    apply_shuffle_inplace(scratch, Shuffle{a, b});
                    table_[r * moves_ + s] =
                        static_cast<std::uint32_t>(rank_deck(Deck(scratch)));
                }
        }
    }

    std::vector<double> step(const std::vector<double>& current, int threads) const {
        if (threads < 1) threads = 1;
        const double inv_moves = 1.0 / static_cast<double>(moves_);
        std::vector<std::vector<double>> partials(
            static_cast<size_t>(threads), std::vector<double>(nfact_, 0.0));
        auto worker = [&](int w) {
            auto& out = partials[static_cast<size_t>(w)];
            const std::uint64_t chunk = (nfact_ + threads - 1) / threads;
            const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
            const std::uint64_t end = std::min(nfact_, begin + chunk);
            for (std::uint64_t r = begin; r < end; ++r) {
                const double mass = current[r] * inv_moves;
                if (mass == 0.0) continue;
                const std::uint32_t* succ = table_.data() + r * moves_;
                for (std::uint64_t s = 0; s < moves_; ++s) out[succ[s]] += mass;
            }
        };
        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
            for (auto& t : pool) t.join();
        }
        // partials are combined in fixed index order, so the result depends
        // only on the thread count, not on scheduling
        std::vector<double> next(nfact_, 0.0);
        for (std::uint64_t r = 0; r < nfact_; ++r) {
            double acc = 0;
            for (int w = 0; w < threads; ++w) acc += partials[static_cast<size_t>(w)][r];
            next[r] = acc;
        }
        return next;
    }

  private:
    std::uint64_t nfact_;
    std::uint64_t moves_;
    std::vector<std::uint32_t> table_;
};

}  // namespace

DistOverSn DistOverSn::point_mass(const Deck& deck) {
    const int n = deck.size();
    DistOverSn d{n, std::vector<double>(factorial(n), 0.0)};
    d.weights[rank_deck(deck)] = 1.0;
    return d;
}

DistOverSn DistOverSn::uniform(int n) {
    const auto nfact = factorial(n);
    return DistOverSn{n, std::vector<double>(nfact, 1.0 / static_cast<double>(nfact))};
}

DistOverSn evolve(const DistOverSn& dist, int steps, int threads, int max_n) {
    check_size(dist.n, max_n);
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (dist.weights.size() != factorial(dist.n))
        throw std::invalid_argument("weight vector does not match n!");
    if (steps == 0) return dist;

    const Evolver evolver(dist.n);
    std::vector<double> current = dist.weights;
    for (int step = 0; step < steps; ++step) current = evolver.step(current, threads);
    return DistOverSn{dist.n, std::move(current)};
}

double total_variation(const DistOverSn& mu, const DistOverSn& nu) {
    if (mu.n != nu.n || mu.weights.size() != nu.weights.size())
        throw std::invalid_argument("distributions live on different deck sizes");
    CompensatedSum acc;
    for (size_t i = 0; i < mu.weights.size(); ++i)
        acc.add(std::abs(mu.weights[i] - nu.weights[i]));
    return 0.5 * acc.value();
}

double d_exact(int n, int t, int max_n) {
    check_size(n, max_n);
    const DistOverSn evolved = evolve(DistOverSn::point_mass(Deck::identity(n)), t, 1, max_n);
    return total_variation(evolved, DistOverSn::uniform(n));
}

std::vector<double> d_exact_curve(int n, int t_max, int max_n) {
    check_size(n, max_n);
    const Evolver evolver(n);
    const DistOverSn uni = DistOverSn::uniform(n);
    DistOverSn dist = DistOverSn::point_mass(Deck::identity(n));
    std::vector<double> curve;
    curve.reserve(static_cast<size_t>(t_max) + 1);
    curve.push_back(total_variation(dist, uni));
    for (int t = 1; t <= t_max; ++t) {
        dist.weights = evolver.step(dist.weights, 1);
        curve.push_back(total_variation(dist, uni));
    }
    return curve;
}

namespace {

Deck adjacent_start(int n) {
    if (n < 2) throw std::invalid_argument("adjacent start needs n >= 2");
    return swap_cards(Deck::identity(n), 1, 2);
}

}  // namespace

double adjacent_tv_exact(int n, int t, int max_n) {
    check_size(n, max_n);
    const DistOverSn a = evolve(DistOverSn::point_mass(Deck::identity(n)), t, 1, max_n);
    const DistOverSn b = evolve(DistOverSn::point_mass(adjacent_start(n)), t, 1, max_n);
    return total_variation(a, b);
}

std::vector<double> adjacent_tv_curve(int n, int t_max, int max_n) {
    check_size(n, max_n);
    const Evolver evolver(n);
    DistOverSn a = DistOverSn::point_mass(Deck::identity(n));
    DistOverSn b = DistOverSn::point_mass(adjacent_start(n));
    std::vector<double> curve;
    curve.reserve(static_cast<size_t>(t_max) + 1);
    curve.push_back(total_variation(a, b));
    for (int t = 1; t <= t_max; ++t) {
        a.weights = evolver.step(a.weights, 1);
        b.weights = evolver.step(b.weights, 1);
        curve.push_back(total_variation(a, b));
    }
    return curve;
}

int mixing_time_exact(int n, double eps, int max_n) {
    check_size(n, max_n);
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
    const Evolver evolver(n);
    DistOverSn dist = DistOverSn::point_mass(Deck::identity(n));
    const DistOverSn uni = DistOverSn::uniform(n);
    constexpr int kCap = 100000;
    for (int t = 0; t <= kCap; ++t) {
        if (total_variation(dist, uni) <= eps) return t;
        dist.weights = evolver.step(dist.weights, 1);
    }
    throw std::runtime_error("mixing time search exceeded step cap");
}

}  // namespace r2r::tv

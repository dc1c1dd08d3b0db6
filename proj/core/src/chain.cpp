#include "r2r/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace r2r::chain {

namespace {

constexpr int kStates = 9;  // [0, 1, ..., 7, inf]
constexpr int kInfIndex = 8;

std::vector<std::string> chain_labels() {
    return {"0", "1", "2", "3", "4", "5", "6", "7", "inf"};
}

// Integer numerators of q, p over n^2; exact in double for every n we use.
std::int64_t q_numerator(int l, std::int64_t n) {
    if (l == 1) return n;
    if (l == 2) return 3 * n - 1;
    return static_cast<std::int64_t>(l - 1) * (n - l + 1);
}

std::int64_t p_numerator(int l, std::int64_t n) {
    if (l == 1) return n - 2;
    if (l == 2) return 2 * n - 6;
    return static_cast<std::int64_t>(l) * (n - l - 1);
}

void validate_rows(const TransitionMatrix& m) {
    const double target = m.kind == TransitionMatrix::Kind::stochastic ? 1.0 : 0.0;
    for (int r = 0; r < m.size; ++r) {
        double sum = 0;
        for (int c = 0; c < m.size; ++c) {
            const double e = m.at(r, c);
            if (m.kind == TransitionMatrix::Kind::stochastic) {
                if (e < 0) throw std::invalid_argument("stochastic entry < 0");
            } else if (r != c && e < 0) {
                throw std::invalid_argument("generator off-diagonal < 0");
            }
            sum += e;
        }
        if (std::abs(sum - target) > 1e-12)
            throw std::invalid_argument("row sum off by " + std::to_string(sum - target));
    }
}

}  // namespace

double q_rate(int l, int n) {
    if (l < 1) throw std::invalid_argument("q_rate needs l >= 1");
    if (l > n) throw std::invalid_argument("q_rate needs l <= n");
    return static_cast<double>(q_numerator(l, n)) / (static_cast<double>(n) * n);
}

double p_rate(int l, int n) {
    if (l < 1) throw std::invalid_argument("p_rate needs l >= 1");
    if (l > n) throw std::invalid_argument("p_rate needs l <= n");
    return static_cast<double>(p_numerator(l, n)) / (static_cast<double>(n) * n);
}

YValue y_step(YValue state, Xoshiro256StarStar& rng, int n) {
    if (n < 3) throw std::invalid_argument("y_step needs n >= 3");
    if (state == 0) return 0;
    const double u = rng.u01();
    if (state == y_infinity) return u < 2.0 / n ? 1 : y_infinity;
    if (state < 0 || state > n - 1)
        throw std::invalid_argument("y state outside 0..n-1");
    const double down = q_rate(state, n);
    const double up = state < n - 1 ? p_rate(state, n) : 0.0;
    const double reset = state >= 3 ? 2.0 / n : 0.0;
    if (u < down) return state - 1;
    if (u < down + up) return state + 1;
    if (u < down + up + reset) return 1;
    return state;
}

TransitionMatrix TransitionMatrix::stochastic(int size, std::vector<double> entries,
                                              std::optional<int> deck_size,
                                              std::vector<std::string> labels) {
    if (static_cast<int>(entries.size()) != size * size)
        throw std::invalid_argument("entry count does not match size");
    if (labels.empty())
        for (int i = 0; i < size; ++i) labels.push_back(std::to_string(i));
    TransitionMatrix m{Kind::stochastic, size, deck_size, std::move(entries),
                       std::move(labels)};
    validate_rows(m);
    return m;
}

TransitionMatrix TransitionMatrix::generator(int size, std::vector<double> entries,
                                             std::optional<int> deck_size,
                                             std::vector<std::string> labels) {
    if (static_cast<int>(entries.size()) != size * size)
        throw std::invalid_argument("entry count does not match size");
    if (labels.empty())
        for (int i = 0; i < size; ++i) labels.push_back(std::to_string(i));
    TransitionMatrix m{Kind::generator, size, deck_size, std::move(entries),
                       std::move(labels)};
    validate_rows(m);
    return m;
}

TransitionMatrix build_ktilde(int n) {
    if (n < 9) throw std::invalid_argument("truncated chain needs n >= 9");
    const auto n2 = static_cast<double>(n) * n;
    std::vector<double> e(kStates * kStates, 0.0);
    auto at = [&](int r, int c) -> double& {
        return e[static_cast<size_t>(r) * kStates + c];
    };
    at(0, 0) = 1.0;
    for (int l = 1; l <= 7; ++l) {
        std::int64_t used = 0;
        const std::int64_t qn = q_numerator(l, n);
        const std::int64_t pn = p_numerator(l, n);
        at(l, l - 1) += static_cast<double>(qn) / n2;
        used += qn;
        const int birth_target = l == 7 ? kInfIndex : l + 1;  // reroute 8 -> inf
        at(l, birth_target) += static_cast<double>(pn) / n2;
        used += pn;
        if (l >= 3) {
            at(l, 1) += static_cast<double>(2 * n) / n2;
            used += 2 * n;
        }
        at(l, l) += static_cast<double>(static_cast<std::int64_t>(n) * n - used) / n2;
    }
    at(kInfIndex, 1) = static_cast<double>(2 * n) / n2;
    at(kInfIndex, kInfIndex) =
        static_cast<double>(static_cast<std::int64_t>(n) * n - 2 * n) / n2;
    return TransitionMatrix::stochastic(kStates, std::move(e), n, chain_labels());
}

TransitionMatrix scaled_generator(int n) {
    if (n < 9) throw std::invalid_argument("truncated chain needs n >= 9");
    // built directly from the integer numerators over n, not as n*(K - I),
    // so entries like the (1 -> 0) rate are exact
    const auto nd = static_cast<double>(n);
    std::vector<double> e(kStates * kStates, 0.0);
    auto at = [&](int r, int c) -> double& {
        return e[static_cast<size_t>(r) * kStates + c];
    };
    for (int l = 1; l <= 7; ++l) {
        std::int64_t used = 0;
        const std::int64_t qn = q_numerator(l, n);
        const std::int64_t pn = p_numerator(l, n);
        at(l, l - 1) += static_cast<double>(qn) / nd;
        used += qn;
        const int birth_target = l == 7 ? kInfIndex : l + 1;
        at(l, birth_target) += static_cast<double>(pn) / nd;
        used += pn;
        if (l >= 3) {
            at(l, 1) += 2.0;
            used += 2 * n;
        }
        at(l, l) = -static_cast<double>(used) / nd;
    }
    at(kInfIndex, 1) = 2.0;
    at(kInfIndex, kInfIndex) = -2.0;
    return TransitionMatrix::generator(kStates, std::move(e), n, chain_labels());
}

TransitionMatrix build_c() {
    // clang-format off
    const std::vector<double> c = {
        0, 0, 0, 0, 0,  0,   0,   0,  0,
        1,-2, 1, 0, 0,  0,   0,   0,  0,
        0, 3,-5, 2, 0,  0,   0,   0,  0,
        0, 2, 2,-7, 3,  0,   0,   0,  0,
        0, 2, 0, 3,-9,  4,   0,   0,  0,
        0, 2, 0, 0, 4,-11,   5,   0,  0,
        0, 2, 0, 0, 0,  5, -13,   6,  0,
        0, 2, 0, 0, 0,  0,   6, -15,  7,
        0, 2, 0, 0, 0,  0,   0,   0, -2,
    };
    // clang-format on
    return TransitionMatrix::generator(kStates, c, std::nullopt, chain_labels());
}

double verify_limit(int n) {
    const TransitionMatrix g = scaled_generator(n);
    const TransitionMatrix c = build_c();
    double worst = 0;
    for (int r = 0; r < kStates; ++r)
        for (int col = 0; col < kStates; ++col)
            worst = std::max(worst, std::abs(g.at(r, col) - c.at(r, col)));
    return worst;
}

namespace {

// Characteristic polynomial coefficients of an N x N matrix by the
// Faddeev-LeVerrier recurrence; returns c so that
// p(x) = c[0] x^N + c[1] x^{N-1} + ... + c[N], c[0] = 1.
std::vector<double> characteristic_polynomial(const std::vector<double>& a, int n) {
    std::vector<double> coeff(static_cast<size_t>(n) + 1, 0.0);
    coeff[0] = 1.0;
    std::vector<double> m(a.size(), 0.0);  // M_0 = 0
    for (int k = 1; k <= n; ++k) {
        // M_k = A * M_{k-1} + c_{k-1} I
        std::vector<double> next(a.size(), 0.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0;
                for (int t = 0; t < n; ++t)
                    acc += a[static_cast<size_t>(r) * n + t] * m[static_cast<size_t>(t) * n + c];
                next[static_cast<size_t>(r) * n + c] = acc;
            }
        for (int d = 0; d < n; ++d)
            next[static_cast<size_t>(d) * n + d] += coeff[static_cast<size_t>(k) - 1];
        // c_k = -tr(A * M_k) / k
        double trace = 0;
        for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t)
                trace += a[static_cast<size_t>(r) * n + t] * next[static_cast<size_t>(t) * n + r];
        coeff[static_cast<size_t>(k)] = -trace / k;
        m = std::move(next);
    }
    return coeff;
}

double poly_eval(const std::vector<double>& c, double x) {
    double v = 0;
    for (double ci : c) v = v * x + ci;
    return v;
}

double poly_deriv_eval(const std::vector<double>& c, double x) {
    const int n = static_cast<int>(c.size()) - 1;
    double v = 0;
    for (int i = 0; i < n; ++i) v = v * x + c[static_cast<size_t>(i)] * (n - i);
    return v;
}

}  // namespace

EigenvalueReport second_largest_eigenvalue_report(const TransitionMatrix& mat) {
    const int n = mat.size;
    if (n < 2) throw std::invalid_argument("need at least 2 states");

    // the first state must be absorbing: e_0 row for stochastic input, zero
    // row for a generator
    for (int c = 0; c < n; ++c) {
        const double expect = (mat.kind == TransitionMatrix::Kind::stochastic && c == 0)
                                  ? 1.0
                                  : 0.0;
        if (std::abs(mat.at(0, c) - expect) > 1e-12)
            throw std::invalid_argument("first state is not absorbing");
    }

    const bool generator = mat.kind == TransitionMatrix::Kind::generator;
    const int m = n - 1;

    // Work on J = I + G_sub / scale, whose Perron root maps affinely back to
    // the wanted eigenvalue. Generators use the fixed scale 16 (diagonal
    // minimum 1/16 for the size chain). A stochastic block is first turned
    // into the generator M_sub - I and scaled by its own diagonal magnitude;
    // iterating the raw substochastic block directly would stall, since its
    // top two eigenvalues are only O(1/n) apart.
    double scale = 16.0;
    double base = 0.0;  // lambda = base + scale * (perron - 1)
    if (!generator) {
        base = 1.0;
        scale = 0.0;
        for (int r = 0; r < m; ++r) scale = std::max(scale, 1.0 - mat.at(r + 1, r + 1));
        if (scale == 0.0) {  // block is the identity
            EigenvalueReport rep;
            rep.lambda = rep.power_estimate = rep.poly_estimate = 1.0;
            rep.method = "power+poly";
            rep.iterations = 0;
            return rep;
        }
    }

    std::vector<double> block(static_cast<size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            const double g = mat.at(r + 1, c + 1) - (generator ? 0.0 : (r == c ? 1.0 : 0.0));
            block[static_cast<size_t>(r) * m + c] = (r == c ? 1.0 : 0.0) + g / scale;
        }

    // Perron-Frobenius applies only if the shifted block is entrywise
    // nonnegative; for the generators used here the diagonal minimum is 1/16.
    for (double v : block)
        if (v < 0) throw std::invalid_argument("shifted block has a negative entry");

    std::vector<double> v(static_cast<size_t>(m), 1.0 / m);
    std::vector<double> w(static_cast<size_t>(m), 0.0);
    double rayleigh = 0;
    double prev = std::numeric_limits<double>::infinity();
    int iterations = 0;
    constexpr int kMaxIterations = 1000000;
    while (true) {
        ++iterations;
        double wsum = 0;
        for (int r = 0; r < m; ++r) {
            double acc = 0;
            for (int c = 0; c < m; ++c)
                acc += block[static_cast<size_t>(r) * m + c] * v[static_cast<size_t>(c)];
            w[static_cast<size_t>(r)] = acc;
            wsum += acc;
        }
        double num = 0, den = 0;
        for (int r = 0; r < m; ++r) {
            num += v[static_cast<size_t>(r)] * w[static_cast<size_t>(r)];
            den += v[static_cast<size_t>(r)] * v[static_cast<size_t>(r)];
        }
        rayleigh = num / den;
        if (wsum == 0) {  // nilpotent 1x1 block (e.g. absorbing in one step)
            rayleigh = 0;
            break;
        }
        for (int r = 0; r < m; ++r) v[static_cast<size_t>(r)] = w[static_cast<size_t>(r)] / wsum;
        if (std::abs(rayleigh - prev) < 1e-12) break;
        prev = rayleigh;
        if (iterations >= kMaxIterations)
            throw std::runtime_error("power iteration did not converge");
    }

    double residual = 0;
    for (int r = 0; r < m; ++r) {
        double acc = 0;
        for (int c = 0; c < m; ++c)
            acc += block[static_cast<size_t>(r) * m + c] * v[static_cast<size_t>(c)];
        residual = std::max(residual, std::abs(acc - rayleigh * v[static_cast<size_t>(r)]));
    }

    // independent route: Newton on the characteristic polynomial, seeded by
    // the power estimate
    const std::vector<double> coeff = characteristic_polynomial(block, m);
    double root = rayleigh;
    for (int it = 0; it < 200; ++it) {
        const double f = poly_eval(coeff, root);
        const double df = poly_deriv_eval(coeff, root);
        if (df == 0) break;
        const double step = f / df;
        root -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(root))) break;
    }

    auto to_lambda = [&](double perron) { return base + scale * (perron - 1.0); };

    if (std::abs(to_lambda(root) - to_lambda(rayleigh)) > 1e-8)
        throw std::runtime_error("eigenvalue methods disagree: power " +
                                 std::to_string(to_lambda(rayleigh)) + " vs poly " +
                                 std::to_string(to_lambda(root)));
    EigenvalueReport rep;
    rep.lambda = to_lambda(rayleigh);
    rep.method = "power+poly";
    rep.iterations = iterations;
    rep.residual = residual;
    rep.power_estimate = to_lambda(rayleigh);
    rep.poly_estimate = to_lambda(root);
    return rep;
}

double second_largest_eigenvalue(const TransitionMatrix& m) {
    return second_largest_eigenvalue_report(m).lambda;
}

std::vector<double> ytilde_distribution(int n, int t) {
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    const TransitionMatrix k = build_ktilde(n);
    // long double accumulation keeps the mass drift well under 1e-12 even
    // after 10^4 steps
    std::vector<long double> dist(kStates, 0.0L);
    dist[kInfIndex] = 1.0L;
    std::vector<long double> next(kStates, 0.0L);
    for (int step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0L);
        for (int r = 0; r < kStates; ++r) {
            const long double mass = dist[static_cast<size_t>(r)];
            if (mass == 0.0L) continue;
            for (int c = 0; c < kStates; ++c)
                next[static_cast<size_t>(c)] +=
                    mass * static_cast<long double>(k.at(r, c));
        }
        std::swap(dist, next);
    }
    std::vector<double> out(kStates);
    for (int i = 0; i < kStates; ++i) out[static_cast<size_t>(i)] = static_cast<double>(dist[static_cast<size_t>(i)]);
    return out;
}

double restricted_l2_norm(const std::vector<double>& dist) {
    if (dist.size() != kStates) throw std::invalid_argument("expected 9 states");
    double acc = 0;
    for (int i = 1; i < kStates; ++i) acc += dist[static_cast<size_t>(i)] * dist[static_cast<size_t>(i)];
    return std::sqrt(acc);
}

DominanceResult dominance_check(int n, int t_max, std::uint64_t samples, SeedSpec seed,
                                int grid_points) {
    if (n < 9) throw std::invalid_argument("dominance check needs n >= 9");
    if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
    if (grid_points < 1) grid_points = 1;

    const int step = std::max(1, t_max / grid_points);
    std::vector<int> times;
    for (int t = 0; t <= t_max; t += step) times.push_back(t);
    if (times.back() != t_max) times.push_back(t_max);

    // exact truncated-chain tail probabilities at each grid time
    const TransitionMatrix k = build_ktilde(n);
    std::vector<std::vector<double>> exact_tail(times.size(), std::vector<double>(8, 0.0));
    {
        std::vector<long double> dist(kStates, 0.0L);
        dist[kInfIndex] = 1.0L;
        std::vector<long double> next(kStates, 0.0L);
        size_t gi = 0;
        for (int t = 0; t <= t_max; ++t) {
            if (gi < times.size() && times[gi] == t) {
                for (int m = 0; m <= 7; ++m) {
                    long double tail = 0;
                    for (int s = m + 1; s < kStates; ++s) tail += dist[static_cast<size_t>(s)];
                    exact_tail[gi][static_cast<size_t>(m)] = static_cast<double>(tail);
                }
                ++gi;
            }
            std::fill(next.begin(), next.end(), 0.0L);
            for (int r = 0; r < kStates; ++r) {
                const long double mass = dist[static_cast<size_t>(r)];
                if (mass == 0.0L) continue;
                for (int c = 0; c < kStates; ++c)
                    next[static_cast<size_t>(c)] += mass * static_cast<long double>(k.at(r, c));
            }
            std::swap(dist, next);
        }
    }

    // Monte Carlo of the untruncated size process; bucket 0..7 = value,
    // 8 = finite values above 7, 9 = infinity. All buckets above m count
    // toward P(Y > m).
    std::vector<std::vector<std::uint64_t>> counts(times.size(),
                                                   std::vector<std::uint64_t>(10, 0));
    for (std::uint64_t i = 0; i < samples; ++i) {
        Xoshiro256StarStar rng = seed.stream(i);
        YValue y = y_infinity;
        size_t gi = 0;
        for (int t = 0; t <= t_max; ++t) {
            if (gi < times.size() && times[gi] == t) {
                const int bucket = y == y_infinity ? 9 : (y <= 7 ? y : 8);
                counts[gi][static_cast<size_t>(bucket)] += 1;
                ++gi;
            }
            if (t < t_max) y = y_step(y, rng, n);
        }
    }

    DominanceResult result;
    result.samples = samples;
    for (size_t gi = 0; gi < times.size(); ++gi) {
        std::uint64_t above = 0;
        for (int b = 0; b <= 9; ++b) above += counts[gi][static_cast<size_t>(b)];
        // walk thresholds from m = 0 upward, removing buckets <= m
        for (int m = 0; m <= 7; ++m) {
            above -= counts[gi][static_cast<size_t>(m)];
            const double emp = static_cast<double>(above) / static_cast<double>(samples);
            const double ex = exact_tail[gi][static_cast<size_t>(m)];
            const double se = std::sqrt(std::max(ex * (1.0 - ex), 0.0) /
                                        static_cast<double>(samples));
            const double diff = emp - ex;
            const double z = se > 0 ? diff / se : (diff > 0 ? std::numeric_limits<double>::infinity() : 0.0);
            result.grid.push_back({times[gi], m, emp, ex, z});
            if (diff > result.max_violation) result.max_violation = diff;
            if (z > result.max_z) {
                result.max_z = z;
                result.at_t = times[gi];
                result.at_m = m;
            }
        }
    }
    return result;
}

L2Diagnostic l2_ratio_diagnostic(int n, int k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    const TransitionMatrix k = build_ktilde(n);
    const double lambda = second_largest_eigenvalue(k);

    L2Diagnostic diag;
    diag.lambda = lambda;
    diag.cauchy_schwarz_ok = true;

    std::vector<long double> dist(kStates, 0.0L);
    dist[kInfIndex] = 1.0L;
    std::vector<long double> next(kStates, 0.0L);
    double lambda_pow = 1.0;
    for (int step = 1; step <= k_max; ++step) {
        std::fill(next.begin(), next.end(), 0.0L);
        for (int r = 0; r < kStates; ++r) {
            const long double mass = dist[static_cast<size_t>(r)];
            if (mass == 0.0L) continue;
            for (int c = 0; c < kStates; ++c)
                next[static_cast<size_t>(c)] += mass * static_cast<long double>(k.at(r, c));
        }
        std::swap(dist, next);
        lambda_pow *= lambda;

        double norm_sq = 0, survive = 0;
        for (int s = 1; s < kStates; ++s) {
            const auto w = static_cast<double>(dist[static_cast<size_t>(s)]);
            norm_sq += w * w;
            survive += w;
        }
        const double norm = std::sqrt(norm_sq);
        const double ratio = norm / lambda_pow;
        if (ratio > diag.sup_ratio) {
            diag.sup_ratio = ratio;
            diag.argmax_k = step;
        }
        if (survive > std::sqrt(8.0) * norm * (1.0 + 1e-14)) diag.cauchy_schwarz_ok = false;
    }
    return diag;
}

double survival_bound(int n, int k, const BoundConstants& c) {
    if (n < 2) throw std::invalid_argument("survival bound needs n >= 2");
    return std::exp(-c.decay_rate * static_cast<double>(k) / n);
}

double analytic_tv_bound(int n, std::int64_t t, const BoundConstants& c) {
    return (n - 1) * std::exp(-c.decay_rate * static_cast<double>(t) / n);
}

std::int64_t mixing_bound(int n, double eps, const BoundConstants& c) {
    if (n < 2) throw std::invalid_argument("mixing bound needs n >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
    if (static_cast<double>(n - 1) <= eps) return 0;
    auto t = static_cast<std::int64_t>(
        std::ceil(n / c.decay_rate * std::log((n - 1) / eps)));
    if (t < 0) t = 0;
    while (analytic_tv_bound(n, t, c) > eps) ++t;
    while (t > 0 && analytic_tv_bound(n, t - 1, c) <= eps) --t;
    return t;
}

}  // namespace r2r::chain

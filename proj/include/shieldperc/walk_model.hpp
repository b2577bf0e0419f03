#ifndef SHIELDPERC_WALK_MODEL_HPP
#define SHIELDPERC_WALK_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shieldperc/errors.hpp"

namespace shieldperc {

// Exact computations for the difference chain of two independent uniform
// oriented walks on Z^d (steps in {e_1,...,e_d}), plus the closed-form
// collision bounds built from it.

class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 2) throw std::domain_error("lattice dimension must be >= 2, got " + std::to_string(d));
    }
    int value() const { return d_; }

private:
    int d_;
};

// --- transition probabilities of h_n = ||S_n - S_n'||_1 -------------------

// Valid transitions: 0 -> {0,2} and, conditionally on having entered state 2
// by a single e_i - e_j displacement, 2 -> {0,2,4}.
inline double h_transition(Dimension dim, int from, int to) {
    const double d = dim.value();
    if (from != 0 && from != 2)
        throw std::domain_error("h_transition: from-state must be 0 or 2");
    if (to != 0 && to != 2 && to != 4)
        throw std::domain_error("h_transition: to-state must be 0, 2 or 4");
    if (from == 0) {
        if (to == 0) return 1.0 / d;
        if (to == 2) return 1.0 - 1.0 / d;
        return 0.0;
    }
    if (to == 0) return 1.0 / (d * d);
    if (to == 2) return (3.0 * d - 4.0) / (d * d);
    return (d * d - 3.0 * d + 3.0) / (d * d);
}

// --- exact DP over canonicalized difference states ------------------------

// Canonical state: the difference vector's coordinates sorted descending.
// The step law is coordinate-exchangeable, so this loses nothing and
// compresses the state space exponentially.

inline constexpr std::size_t kDefaultStateCap = 5'000'000;

template <class Scalar = double>
struct WalkDistribution {
    int step = 0;
    std::map<std::vector<int>, Scalar> mass;
    Scalar absorbed_mass{0};
    // absorbed_at[k] is the mass absorbed exactly at step k (index 0 unused
    // when absorbing at the origin from step 1 on).
    std::vector<Scalar> absorbed_at;

    Scalar total() const {
        Scalar t = absorbed_mass;
        for (const auto& [v, m] : mass) t += m;
        return t;
    }
};

namespace detail {

template <class Scalar>
std::map<std::vector<int>, Scalar> advance_difference(
    const std::map<std::vector<int>, Scalar>& cur, int d,
    bool skip_stay_at_origin, std::size_t state_cap, int step_for_error) {
    const Scalar unit = Scalar(1) / Scalar(d * d);
    const std::vector<int> origin(static_cast<std::size_t>(d), 0);
    std::map<std::vector<int>, Scalar> nxt;
    std::vector<int> w;
    for (const auto& [v, m] : cur) {
        const bool at_origin = (v == origin);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (skip_stay_at_origin && at_origin && i == j) continue;
                w = v;
                ++w[static_cast<std::size_t>(i)];
                --w[static_cast<std::size_t>(j)];
                std::sort(w.begin(), w.end(), std::greater<int>());
                nxt[w] += m * unit;
            }
        }
        if (nxt.size() > state_cap)
            throw resource_error("difference-walk DP exceeded state cap of " +
                                 std::to_string(state_cap) + " states at step " +
                                 std::to_string(step_for_error));
    }
    return nxt;
}

}  // namespace detail

template <class Scalar = double>
WalkDistribution<Scalar> evolve_difference_walk(Dimension dim, int steps,
                                                bool absorb_at_origin = false,
                                                std::size_t state_cap = kDefaultStateCap) {
    if (steps < 0) throw std::domain_error("evolve_difference_walk: steps must be >= 0");
    const int d = dim.value();
    const std::vector<int> origin(static_cast<std::size_t>(d), 0);

    WalkDistribution<Scalar> dist;
    dist.mass[origin] = Scalar(1);
    dist.absorbed_at.assign(static_cast<std::size_t>(steps) + 1, Scalar(0));
    for (int k = 1; k <= steps; ++k) {
        dist.mass = detail::advance_difference(dist.mass, d, false, state_cap, k);
        if (absorb_at_origin) {
            auto it = dist.mass.find(origin);
            if (it != dist.mass.end()) {
                dist.absorbed_at[static_cast<std::size_t>(k)] = it->second;
                dist.absorbed_mass += it->second;
                dist.mass.erase(it);
            }
        }
        dist.step = k;
    }
    return dist;
}

// --- first-passage distributions ------------------------------------------

template <class Scalar = double>
struct TauDistribution {
    int d;
    int k_min;                   // 1 for tau, 0 for tau-hat
    std::vector<Scalar> probs;   // probs[i] = P(T = k_min + i)
    double tail_bound;           // upper bound on P(k_max < T < infinity)
};

// k!/d^k for 1 <= k <= d; (1/d)^{jd} (jd)!/(j!)^d with j = floor(k/d) for
// k > d.  Upper bound on max_{x in H_k} P(S_k = x), hence on P(S_k = S_k').
inline double max_pointmass(Dimension dim, int k) {
    if (k < 1) throw std::domain_error("max_pointmass: k must be >= 1");
    const int d = dim.value();
    const double ld = std::log(static_cast<double>(d));
    if (k <= d) return std::exp(std::lgamma(k + 1.0) - k * ld);
    const long j = k / d;
    const double jd = static_cast<double>(j) * d;
    return std::exp(-jd * ld + std::lgamma(jd + 1.0) - d * std::lgamma(j + 1.0));
}

namespace detail {

// Per-term Stirling constant: (1/d)^{jd} (jd)!/(j!)^d <= C(d) j^{(1-d)/2}.
inline double stirling_term_constant(int d) {
    return std::sqrt(2.0 * M_PI * d) * std::exp(1.0 / (12.0 * d)) /
           std::pow(2.0 * M_PI, d / 2.0);
}

// Bound on sum_{j >= J} j^{(1-d)/2} by the first term plus an integral.
inline double power_tail(int d, long J) {
    const double s = (static_cast<double>(d) - 1.0) / 2.0;
    return std::pow(static_cast<double>(J), -s) +
           std::pow(static_cast<double>(J), 1.0 - s) / (s - 1.0);
}

}  // namespace detail

// Upper bound on sum_{k > k_max} max_pointmass(d, k); finite only for d >= 4.
inline double tau_tail_bound(Dimension dim, int k_max) {
    const int d = dim.value();
    if (d < 4) return 1.0;
    double sum = 0.0;
    const double c = d * detail::stirling_term_constant(d);
    int k = k_max + 1;
    for (;; ++k) {
        const long j = k / d;
        if (j >= 1 && k % d == 0) {
            const double rem = c * detail::power_tail(d, j);
            if (rem < 1e-3 * sum || j > 100000) return sum + rem;
        }
        sum += max_pointmass(dim, k);
    }
}

template <class Scalar = double>
TauDistribution<Scalar> tau_distribution(Dimension dim, int k_max,
                                         std::size_t state_cap = kDefaultStateCap) {
    if (k_max < 1) throw std::domain_error("tau_distribution: k_max must be >= 1");
    auto dist = evolve_difference_walk<Scalar>(dim, k_max, true, state_cap);
    TauDistribution<Scalar> out{dim.value(), 1, {}, 0.0};
    for (int k = 1; k <= k_max; ++k)
        out.probs.push_back(dist.absorbed_at[static_cast<std::size_t>(k)]);
    out.tail_bound = std::min(tau_tail_bound(dim, k_max),
                              1.0 - static_cast<double>(dist.absorbed_mass));
    return out;
}

// tau-hat = inf{k >= 0 : S_k = S_k', S_{k+1} = S_{k+1}'}.  The DP tracks the
// full difference state; at each step k the origin mass times 1/d is the
// newly successful portion, and the surviving origin mass must leave.
template <class Scalar = double>
TauDistribution<Scalar> tau_hat_distribution(Dimension dim, int k_max,
                                             std::size_t state_cap = kDefaultStateCap) {
    if (k_max < 0) throw std::domain_error("tau_hat_distribution: k_max must be >= 0");
    const int d = dim.value();
    const std::vector<int> origin(static_cast<std::size_t>(d), 0);
    const Scalar inv_d = Scalar(1) / Scalar(d);

    TauDistribution<Scalar> out{d, 0, {}, 0.0};
    std::map<std::vector<int>, Scalar> cur;
    cur[origin] = Scalar(1);
    Scalar captured{0};
    for (int k = 0; k <= k_max; ++k) {
        Scalar succ{0};
        auto it = cur.find(origin);
        if (it != cur.end()) succ = it->second * inv_d;
        out.probs.push_back(succ);
        captured += succ;
        if (k == k_max) break;
        cur = detail::advance_difference(cur, d, /*skip_stay_at_origin=*/true,
                                         state_cap, k + 1);
    }
    out.tail_bound = std::min(tau_tail_bound(dim, k_max) / d,
                              1.0 - static_cast<double>(captured));
    return out;
}

// --- collision-bound series and closed forms ------------------------------

enum class SeriesPolicy {
    truncated,       // exact terms, stop on rigorous Stirling tail < tol
    stirling_bound,  // closed-form upper bound C(d) * zeta((d-1)/2)
};

struct SeriesResult {
    double value = 0.0;
    double tail_error = 0.0;
    long terms_used = 0;
};

namespace detail {

// Riemann zeta via truncated sum plus Euler-Maclaurin correction; ample
// accuracy for s >= 1.5.
inline double zeta_em(double s) {
    const int n = 1000;
    double sum = 0.0;
    for (int k = n; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double nn = static_cast<double>(n);
    return sum + std::pow(nn, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(nn, -s) +
           s / 12.0 * std::pow(nn, -s - 1.0);
}

}  // namespace detail

// sum_{j >= 1} (1/d)^{jd - offset} (jd)!/(j!)^d; offset = 1 in B(d), 0 in
// g(d).  Truncation stops when the Stirling-bounded tail (not the last
// term) drops below tol.
inline SeriesResult collision_series(int d, int offset, double tol,
                                     SeriesPolicy policy = SeriesPolicy::truncated,
                                     long max_terms = 80'000'000) {
    if (d < 4) throw std::domain_error("collision_series requires d >= 4");
    if (tol <= 0.0) throw std::domain_error("collision_series: tol must be positive");
    const double scale = std::pow(static_cast<double>(d), offset);
    const double c = scale * detail::stirling_term_constant(d);

    if (policy == SeriesPolicy::stirling_bound) {
        return SeriesResult{c * detail::zeta_em((d - 1.0) / 2.0), 0.0, 0};
    }

    // term at j = 1 is (1/d)^{d - offset} d!
    double term = std::exp(std::lgamma(d + 1.0) -
                           (d - offset) * std::log(static_cast<double>(d)));
    double sum = 0.0, comp = 0.0;  // Kahan
    for (long j = 1;; ++j) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        const double tail = c * detail::power_tail(d, j + 1);
        if (tail < tol) return SeriesResult{sum, tail, j};
        if (j >= max_terms)
            throw resource_error(
                "collision_series: tail bound " + std::to_string(tail) +
                " has not reached tol " + std::to_string(tol) + " after " +
                std::to_string(j) + " terms (d=" + std::to_string(d) + ")");
        double ratio = 1.0;
        for (int i = 1; i <= d; ++i)
            ratio *= static_cast<double>(j * static_cast<long>(d) + i) /
                     (static_cast<double>(j + 1) * d);
        term *= ratio;
    }
}

// t(x) = ((d^2+1)x - d - 1)/(d^2 x - d); maps the p_d bound B to a p_2
// bound, monotone nondecreasing for x > 1/d.
inline double t_of(Dimension dim, double x) {
    const double d = dim.value();
    return ((d * d + 1.0) * x - d - 1.0) / (d * d * x - d);
}

struct CollisionBounds {
    int d;
    double B;         // upper bound on p_d
    double p2_upper;  // t(B)
    double g;         // upper bound on rho_d >= p_c
    long series_terms_used;
    double tail_error;
};

namespace detail {

inline double factorial_block(int d, int extra_power) {
    // sum_{k=5}^{d} k!/d^{k + extra_power}
    double sum = 0.0;
    const double ld = std::log(static_cast<double>(d));
    for (int k = 5; k <= d; ++k)
        sum += std::exp(std::lgamma(k + 1.0) - (k + extra_power) * ld);
    return sum;
}

}  // namespace detail

inline CollisionBounds collision_bounds(Dimension dim, double tol = 1e-18,
                                        SeriesPolicy policy = SeriesPolicy::truncated,
                                        long max_terms = 80'000'000) {
    const int di = dim.value();
    if (di < 4) throw std::domain_error("collision_bounds requires d >= 4 (p_2 < 1)");
    const double d = di;
    const double a = (3.0 * d - 4.0) / (d * d);
    const double b = (d * d - 3.0 * d + 3.0) / (d * d);
    const double r = 1.0 - 1.0 / d;

    double B = 1.0 / d + r / (d * d) + (1.0 / (d * d)) * a * r +
               (1.0 / (d * d)) * (a * a + b * 4.0 / (d * d)) * r +
               detail::factorial_block(di, 0);
    const auto sb = collision_series(di, 1, tol, policy, max_terms);
    B += sb.value;

    double g = 1.0 / d + 1.0 / (d * d * d) - 1.0 / (d * d * d * d) +
               (1.0 / (d * d * d)) * a * r +
               (1.0 / (d * d * d)) * (a * a + b * 4.0 / (d * d) + r / (d * d)) * r +
               detail::factorial_block(di, 1);
    const auto sg = collision_series(di, 0, tol, policy, max_terms);
    g += sg.value;

    return CollisionBounds{di, B, t_of(dim, B), g,
                           sb.terms_used + sg.terms_used,
                           sb.tail_error + sg.tail_error};
}

}  // namespace shieldperc

#endif

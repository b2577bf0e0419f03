#ifndef SHIELDPERC_PERCOLATION_SIM_HPP
#define SHIELDPERC_PERCOLATION_SIM_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shieldperc/errors.hpp"
#include "shieldperc/rng.hpp"
#include "shieldperc/walk_model.hpp"

namespace shieldperc {

using bigint = boost::multiprecision::cpp_int;

// Seeded Monte Carlo on a finite box of Z^d: bond configurations with a
// one-edge halo (so shielded status of every interior vertex is exact),
// oriented shielded-path counting, cluster statistics, and paired-walk
// sampling.

// Interior vertices have coordinates in {0,...,n}^d.  Edges are indexed by
// (lower endpoint, axis) over the extended box {-1,...,n+1}^d, which
// materializes every edge incident to an interior vertex.
class LatticeConfig {
public:
    LatticeConfig(Dimension dim, int n, double p, std::uint64_t seed,
                  std::uint64_t stream_id, std::uint64_t edge_cap = 1'000'000'000ull)
        : d_(dim.value()), n_(n), p_(p), seed_(seed), stream_(stream_id) {
        if (n < 0) throw std::domain_error("LatticeConfig: box extent must be >= 0");
        if (p < 0.0 || p > 1.0) throw std::domain_error("LatticeConfig: p must be in [0,1]");
        side_ = static_cast<std::uint64_t>(n_) + 3;  // coordinates -1..n+1
        std::uint64_t verts = 1;
        for (int i = 0; i < d_; ++i) {
            if (verts > edge_cap / side_ + 1)
                throw resource_error("LatticeConfig: box of extent " + std::to_string(n) +
                                     " in dimension " + std::to_string(d_) +
                                     " exceeds edge cap " + std::to_string(edge_cap));
            verts *= side_;
        }
        n_edges_ = verts * static_cast<std::uint64_t>(d_);
        if (n_edges_ > edge_cap)
            throw resource_error("LatticeConfig: " + std::to_string(n_edges_) +
                                 " edges exceed cap " + std::to_string(edge_cap));
        bits_.assign(static_cast<std::size_t>((n_edges_ + 63) / 64), 0ull);
        for (std::uint64_t e = 0; e < n_edges_; ++e)
            if (to_unit_double(counter_hash(seed_, stream_, e)) < p_)
                bits_[static_cast<std::size_t>(e >> 6)] |= 1ull << (e & 63);
    }

    int d() const { return d_; }
    int extent() const { return n_; }
    double p() const { return p_; }

    // v has coordinates in [-1, n+1]; the edge from v to v + e_axis must
    // have v_axis <= n (both endpoints inside the extended box).
    bool edge_open(const std::vector<int>& v, int axis) const {
        const std::uint64_t e = vertex_index(v) * d_ + static_cast<std::uint64_t>(axis);
        return (bits_[static_cast<std::size_t>(e >> 6)] >> (e & 63)) & 1ull;
    }

    // Exact for vertices with all coordinates in [0, n].
    bool is_shielded(const std::vector<int>& v) const {
        std::vector<int> w = v;
        for (int i = 0; i < d_; ++i) {
            if (edge_open(v, i)) return false;
            --w[static_cast<std::size_t>(i)];
            const bool open = edge_open(w, i);
            ++w[static_cast<std::size_t>(i)];
            if (open) return false;
        }
        return true;
    }

    std::uint64_t open_edge_count() const {
        std::uint64_t c = 0;
        for (std::uint64_t w : bits_) c += static_cast<std::uint64_t>(__builtin_popcountll(w));
        return c;
    }
    std::uint64_t edge_count() const { return n_edges_; }

private:
    std::uint64_t vertex_index(const std::vector<int>& v) const {
        std::uint64_t idx = 0;
        for (int i = 0; i < d_; ++i) {
            const int c = v[static_cast<std::size_t>(i)] + 1;  // shift -1..n+1 to 0..n+2
            idx = idx * side_ + static_cast<std::uint64_t>(c);
        }
        return idx;
    }

    int d_;
    int n_;
    double p_;
    std::uint64_t seed_, stream_, side_, n_edges_;
    std::vector<std::uint64_t> bits_;
};

inline LatticeConfig sample_configuration(Dimension dim, int n, double p,
                                          std::uint64_t seed, std::uint64_t stream_id,
                                          std::uint64_t edge_cap = 1'000'000'000ull) {
    return LatticeConfig(dim, n, p, seed, stream_id, edge_cap);
}

// Number of oriented n-step paths from the origin all of whose n+1 vertices
// are shielded.  Layered DP over the simplex; exact big-integer count.
inline bigint count_oriented_shielded_paths(const LatticeConfig& config, int n) {
    const int d = config.d();
    if (n > config.extent())
        throw std::domain_error("count_oriented_shielded_paths: box extent " +
                                std::to_string(config.extent()) +
                                " does not cover horizon " + std::to_string(n));
    std::map<std::vector<int>, bigint> layer;
    {
        std::vector<int> origin(static_cast<std::size_t>(d), 0);
        if (config.is_shielded(origin)) layer[origin] = 1;
    }
    for (int k = 1; k <= n && !layer.empty(); ++k) {
        std::map<std::vector<int>, bigint> nxt;
        for (const auto& [v, c] : layer) {
            std::vector<int> w = v;
            for (int i = 0; i < d; ++i) {
                ++w[static_cast<std::size_t>(i)];
                if (config.is_shielded(w)) nxt[w] += c;
                --w[static_cast<std::size_t>(i)];
            }
        }
        layer.swap(nxt);
    }
    bigint total = 0;
    for (const auto& [v, c] : layer) total += c;
    return total;
}

struct MomentEstimate {
    int d, n;
    double p;
    long trials;
    double mean_n;        // empirical E N_n
    double se_mean;
    double mean_n2;       // empirical E N_n^2
    double se_mean2;
    double survival;      // empirical P(N_n >= 1)
    double se_survival;
    double expected_mean; // q^{2d} (d q^{2d-1})^n
    double paley_zygmund; // mean_n^2 / mean_n2 (0 when degenerate)
};

inline MomentEstimate estimate_moments(Dimension dim, int n, double p, long trials,
                                       std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("estimate_moments: trials must be >= 1");
    const int d = dim.value();
    double s1 = 0, s2 = 0, s4 = 0;
    long surv = 0;
    for (long t = 0; t < trials; ++t) {
        const LatticeConfig cfg(dim, n, p, seed, static_cast<std::uint64_t>(t));
        const double x = static_cast<double>(count_oriented_shielded_paths(cfg, n));
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
        if (x >= 1.0) ++surv;
    }
    const double T = static_cast<double>(trials);
    MomentEstimate out;
    out.d = d;
    out.n = n;
    out.p = p;
    out.trials = trials;
    out.mean_n = s1 / T;
    out.mean_n2 = s2 / T;
    out.se_mean = std::sqrt(std::max(0.0, s2 / T - out.mean_n * out.mean_n) / T);
    out.se_mean2 = std::sqrt(std::max(0.0, s4 / T - out.mean_n2 * out.mean_n2) / T);
    out.survival = static_cast<double>(surv) / T;
    out.se_survival = std::sqrt(out.survival * (1.0 - out.survival) / T);
    const double q = 1.0 - p;
    out.expected_mean = std::pow(q, 2.0 * d) * std::pow(d * std::pow(q, 2.0 * d - 1.0),
                                                        static_cast<double>(n));
    out.paley_zygmund = out.mean_n2 > 0.0 ? out.mean_n * out.mean_n / out.mean_n2 : 0.0;
    return out;
}

struct ComponentReport {
    std::map<std::uint64_t, long> histogram;  // component size -> count
    std::uint64_t largest = 0;
    std::uint64_t shielded_vertices = 0;
    bool spanning = false;  // some component touches two opposite interior faces
};

// Union-find over shielded interior vertices under nearest-neighbor
// adjacency.
inline ComponentReport shielded_components(const LatticeConfig& config) {
    const int d = config.d();
    const int n = config.extent();
    const std::uint64_t side = static_cast<std::uint64_t>(n) + 1;
    std::uint64_t n_int = 1;
    for (int i = 0; i < d; ++i) n_int *= side;

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n_int), 0);
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    for (std::uint64_t idx = 0; idx < n_int; ++idx) {
        std::uint64_t r = idx;
        for (int i = d - 1; i >= 0; --i) {
            v[static_cast<std::size_t>(i)] = static_cast<int>(r % side);
            r /= side;
        }
        mask[static_cast<std::size_t>(idx)] = config.is_shielded(v) ? 1 : 0;
    }

    std::vector<std::uint64_t> parent(static_cast<std::size_t>(n_int));
    std::iota(parent.begin(), parent.end(), 0ull);
    std::function<std::uint64_t(std::uint64_t)> find = [&](std::uint64_t a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    std::uint64_t stride = 1;
    for (int axis = d - 1; axis >= 0; --axis) {
        for (std::uint64_t idx = 0; idx < n_int; ++idx) {
            if (!mask[static_cast<std::size_t>(idx)]) continue;
            const std::uint64_t coord = (idx / stride) % side;
            if (coord + 1 < side && mask[static_cast<std::size_t>(idx + stride)]) {
                const std::uint64_t a = find(idx), b = find(idx + stride);
                if (a != b) parent[static_cast<std::size_t>(a)] = b;
            }
        }
        stride *= side;
    }

    ComponentReport rep;
    std::map<std::uint64_t, std::uint64_t> size_of;
    for (std::uint64_t idx = 0; idx < n_int; ++idx)
        if (mask[static_cast<std::size_t>(idx)]) {
            ++size_of[find(idx)];
            ++rep.shielded_vertices;
        }
    for (const auto& [root, sz] : size_of) {
        ++rep.histogram[sz];
        rep.largest = std::max(rep.largest, sz);
    }
    // spanning: one component holds a vertex on face coord_axis = 0 and one
    // on coord_axis = n, for some axis
    stride = 1;
    for (int axis = d - 1; axis >= 0 && !rep.spanning; --axis) {
        std::map<std::uint64_t, int> touch;  // root -> bitmask {low, high}
        for (std::uint64_t idx = 0; idx < n_int; ++idx) {
            if (!mask[static_cast<std::size_t>(idx)]) continue;
            const std::uint64_t coord = (idx / stride) % side;
            if (coord == 0) touch[find(idx)] |= 1;
            if (coord + 1 == side) touch[find(idx)] |= 2;
        }
        for (const auto& [root, bits] : touch)
            if (bits == 3) {
                rep.spanning = true;
                break;
            }
        stride *= side;
    }
    return rep;
}

// --- paired oriented walks ------------------------------------------------

struct MgfPoint {
    int horizon;
    double mean;
    double se;
};

struct PairedWalkSummary {
    int d;
    int horizon;
    long trials;
    double q;                 // weight base used for the MGF estimate
    double p_hat;             // fraction of trials with a collision by horizon
    double se_p_hat;
    std::map<int, long> z_hist;
    std::map<int, long> o_hist;
    std::vector<MgfPoint> mgf;  // empirical E q^{-#O_k - (2d-1)#Z_k} at checkpoints
};

inline PairedWalkSummary paired_walk_sample(Dimension dim, int horizon, long trials,
                                            std::uint64_t seed, double q = 0.0,
                                            std::vector<int> checkpoints = {}) {
    if (horizon < 1) throw std::domain_error("paired_walk_sample: horizon must be >= 1");
    if (trials < 1) throw std::domain_error("paired_walk_sample: trials must be >= 1");
    const int d = dim.value();
    if (checkpoints.empty()) checkpoints.push_back(horizon);
    for (int c : checkpoints)
        if (c < 1 || c > horizon)
            throw std::domain_error("paired_walk_sample: checkpoint outside horizon");

    PairedWalkSummary out;
    out.d = d;
    out.horizon = horizon;
    out.trials = trials;
    out.q = q;
    const bool weigh = q > 0.0;
    const double lw = weigh ? -std::log(q) : 0.0;  // weight = exp(lw * (#O + (2d-1)#Z))
    std::vector<double> wsum(checkpoints.size(), 0.0), wsum2(checkpoints.size(), 0.0);
    long collided = 0;

    std::vector<int> diff(static_cast<std::size_t>(d));
    for (long t = 0; t < trials; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        std::fill(diff.begin(), diff.end(), 0);
        int norm = 0, z = 0, o = 0;
        bool hit = false;
        std::size_t ci = 0;
        for (int k = 1; k <= horizon; ++k) {
            const int i = rng.next_index(d);
            const int j = rng.next_index(d);
            if (i != j) {
                auto bump = [&](int axis, int delta) {
                    int& c = diff[static_cast<std::size_t>(axis)];
                    norm -= std::abs(c);
                    c += delta;
                    norm += std::abs(c);
                };
                bump(i, +1);
                bump(j, -1);
            }
            if (norm == 0) {
                ++z;
                hit = true;
            } else if (norm == 2) {
                ++o;
            }
            while (ci < checkpoints.size() && checkpoints[ci] == k) {
                if (weigh) {
                    const double w = std::exp(lw * (o + (2.0 * d - 1.0) * z));
                    wsum[ci] += w;
                    wsum2[ci] += w * w;
                }
                ++ci;
            }
        }
        if (hit) ++collided;
        ++out.z_hist[z];
        ++out.o_hist[o];
    }

    const double T = static_cast<double>(trials);
    out.p_hat = static_cast<double>(collided) / T;
    out.se_p_hat = std::sqrt(out.p_hat * (1.0 - out.p_hat) / T);
    if (weigh)
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            const double m = wsum[i] / T;
            out.mgf.push_back(
                {checkpoints[i], m,
                 std::sqrt(std::max(0.0, wsum2[i] / T - m * m) / T)});
        }
    return out;
}

}  // namespace shieldperc

#endif

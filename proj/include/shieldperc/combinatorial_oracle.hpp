#ifndef SHIELDPERC_COMBINATORIAL_ORACLE_HPP
#define SHIELDPERC_COMBINATORIAL_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shieldperc/errors.hpp"
#include "shieldperc/walk_model.hpp"

namespace shieldperc {

// Exhaustive small-instance verification of the edge-counting combinatorics
// behind the second-moment bound, plus path-class enumeration.

// Oriented path of n steps from the origin, stored as step axes in [0, d).
using StepSeq = std::vector<int>;

inline std::vector<std::vector<int>> path_vertices(int d, const StepSeq& steps) {
    std::vector<std::vector<int>> vs;
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    vs.push_back(v);
    for (int s : steps) {
        ++v[static_cast<std::size_t>(s)];
        vs.push_back(v);
    }
    return vs;
}

inline std::vector<StepSeq> enumerate_oriented_paths(int d, int n) {
    std::vector<StepSeq> out;
    StepSeq cur(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.push_back(cur);
        int i = n - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == d - 1)
            cur[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
    }
    return out;
}

// Number of lattice edges with at least one endpoint in the set.
inline long adjacent_edge_count(Dimension dim,
                                const std::vector<std::vector<int>>& vertex_set) {
    if (vertex_set.empty())
        throw std::domain_error("adjacent_edge_count: vertex set must be nonempty");
    const int d = dim.value();
    std::set<std::pair<std::vector<int>, int>> edges;  // (lower endpoint, axis)
    for (const auto& v : vertex_set) {
        std::vector<int> w = v;
        for (int i = 0; i < d; ++i) {
            edges.insert({v, i});
            --w[static_cast<std::size_t>(i)];
            edges.insert({w, i});
            ++w[static_cast<std::size_t>(i)];
        }
    }
    return static_cast<long>(edges.size());
}

struct PathPairStats {
    int d, n;
    int Z_count, O_count, O1_count, O2_count;
    long E_count, E1_count, E2_count;
};

namespace detail {

// Encodes a vertex with coordinates in [-1, n+1] into an integer key.
struct PairGeometry {
    int d, n;
    std::int64_t base;
    std::int64_t vertex_code(const std::vector<int>& v) const {
        std::int64_t c = 0;
        for (int i = 0; i < d; ++i) c = c * base + (v[static_cast<std::size_t>(i)] + 1);
        return c;
    }
};

struct EdgeRec {
    std::int64_t code;  // vertex_code(lower) * d + axis
    std::int64_t a, b;  // endpoint codes
    bool operator<(const EdgeRec& o) const { return code < o.code; }
};

// Sorted list of edges adjacent to the path, with endpoint codes.
inline std::vector<EdgeRec> path_edges(const PairGeometry& geo,
                                       const std::vector<std::vector<int>>& vs) {
    std::set<std::pair<std::vector<int>, int>> seen;
    std::vector<EdgeRec> out;
    for (const auto& v : vs) {
        std::vector<int> w = v;
        for (int i = 0; i < geo.d; ++i) {
            if (seen.insert({v, i}).second) {
                ++w[static_cast<std::size_t>(i)];
                out.push_back({geo.vertex_code(v) * geo.d + i, geo.vertex_code(v),
                               geo.vertex_code(w)});
                --w[static_cast<std::size_t>(i)];
            }
            --w[static_cast<std::size_t>(i)];
            if (seen.insert({w, i}).second)
                out.push_back({geo.vertex_code(w) * geo.d + i, geo.vertex_code(w),
                               geo.vertex_code(v)});
            ++w[static_cast<std::size_t>(i)];
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Per-path data computed once so pair sweeps do no repeated set work.
struct PreparedPath {
    std::vector<std::vector<int>> vertices;
    std::vector<std::int64_t> vcodes;  // vcodes[k] = code of vertex k
    std::vector<detail::EdgeRec> edges;
};

inline PreparedPath prepare_path(Dimension dim, int n, const StepSeq& steps) {
    const int d = dim.value();
    const detail::PairGeometry geo{d, n, n + 3};
    PreparedPath pp;
    pp.vertices = path_vertices(d, steps);
    for (const auto& v : pp.vertices) pp.vcodes.push_back(geo.vertex_code(v));
    pp.edges = detail::path_edges(geo, pp.vertices);
    return pp;
}

inline PathPairStats pair_stats(Dimension dim, const PreparedPath& pa,
                                const PreparedPath& pb) {
    const int d = dim.value();
    const int n = static_cast<int>(pa.vertices.size()) - 1;

    PathPairStats st{d, n, 0, 0, 0, 0, 0, 0, 0};
    std::vector<bool> in_z(static_cast<std::size_t>(n) + 1, false);
    in_z[0] = true;  // both paths start at the origin
    std::vector<bool> in_o(static_cast<std::size_t>(n) + 1, false);
    for (int k = 1; k <= n; ++k) {
        int dist = 0;
        for (int i = 0; i < d; ++i)
            dist += std::abs(
                pa.vertices[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] -
                pb.vertices[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        if (dist == 0) {
            in_z[static_cast<std::size_t>(k)] = true;
            ++st.Z_count;
        } else if (dist == 2) {
            in_o[static_cast<std::size_t>(k)] = true;
            ++st.O_count;
        }
    }
    for (int k = 1; k <= n; ++k) {
        if (!in_o[static_cast<std::size_t>(k)]) continue;
        if (k <= n - 1 && in_z[static_cast<std::size_t>(k) + 1])
            ++st.O1_count;
        else
            ++st.O2_count;
    }

    // coincidence-vertex codes (k in Z union {0})
    std::vector<std::int64_t> coin;
    for (int k = 0; k <= n; ++k)
        if (in_z[static_cast<std::size_t>(k)])
            coin.push_back(pa.vcodes[static_cast<std::size_t>(k)]);

    std::size_t i = 0, j = 0;
    while (i < pa.edges.size() && j < pb.edges.size()) {
        if (pa.edges[i].code < pb.edges[j].code) {
            ++i;
        } else if (pb.edges[j].code < pa.edges[i].code) {
            ++j;
        } else {
            ++st.E_count;
            bool touches = false;
            for (std::int64_t c : coin)
                if (pa.edges[i].a == c || pa.edges[i].b == c) {
                    touches = true;
                    break;
                }
            ++(touches ? st.E1_count : st.E2_count);
            ++i;
            ++j;
        }
    }
    return st;
}

inline PathPairStats pair_stats(Dimension dim, const StepSeq& steps_a,
                                const StepSeq& steps_b) {
    if (steps_a.size() != steps_b.size())
        throw std::domain_error("pair_stats: paths must have equal length");
    const int n = static_cast<int>(steps_a.size());
    return pair_stats(dim, prepare_path(dim, n, steps_a),
                      prepare_path(dim, n, steps_b));
}

struct EdgeBoundReport {
    int d, n;
    long instances_checked = 0;
    long violations = 0;
    long e2_equality_cases = 0;  // pairs with E2 = O2 (tightness of the injection)
    long min_slack = -1;         // min over pairs of bound - E_count
};

// Sweeps all d^{2n} ordered path pairs and checks, for each:
//   E1 = 2d + (2d-1) Z + O1 (exact), E2 <= O2, E <= 2d + (2d-1) Z + O.
inline EdgeBoundReport verify_edge_bound(Dimension dim, int n,
                                         long pair_cap = 100'000'000) {
    const int d = dim.value();
    if (n < 1) throw std::domain_error("verify_edge_bound: n must be >= 1");
    double pairs_est = std::pow(static_cast<double>(d), 2.0 * n);
    if (pairs_est > static_cast<double>(pair_cap))
        throw resource_error("verify_edge_bound: d^{2n} = " +
                             std::to_string(pairs_est) + " pairs exceed cap " +
                             std::to_string(pair_cap));
    std::vector<PreparedPath> paths;
    for (const auto& s : enumerate_oriented_paths(d, n))
        paths.push_back(prepare_path(dim, n, s));
    EdgeBoundReport rep;
    rep.d = d;
    rep.n = n;
    for (const auto& a : paths)
        for (const auto& b : paths) {
            const auto st = pair_stats(dim, a, b);
            ++rep.instances_checked;
            const long bound = 2 * d + (2 * d - 1) * st.Z_count + st.O_count;
            const bool ok1 =
                st.E1_count == 2 * d + (2 * d - 1) * st.Z_count + st.O1_count;
            const bool ok2 = st.E2_count <= st.O2_count;
            const bool ok = st.E_count <= bound;
            if (!(ok1 && ok2 && ok)) ++rep.violations;
            if (st.E2_count == st.O2_count) ++rep.e2_equality_cases;
            const long slack = bound - st.E_count;
            if (rep.min_slack < 0 || slack < rep.min_slack) rep.min_slack = slack;
        }
    return rep;
}

// --- path-class enumeration -----------------------------------------------

namespace detail {

inline int l1_dist(const std::vector<int>& a, const std::vector<int>& b) {
    int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline long count_paths_backtrack(int d, int n, bool xi_class) {
    std::vector<std::vector<int>> stack;
    stack.push_back(std::vector<int>(static_cast<std::size_t>(d), 0));
    long count = 0;
    std::function<void()> rec = [&]() {
        if (static_cast<int>(stack.size()) == n + 1) {
            ++count;
            return;
        }
        const auto cur = stack.back();  // copy: push_back below reallocates
        for (int i = 0; i < d; ++i) {
            for (int delta : {+1, -1}) {
                std::vector<int> nxt = cur;
                nxt[static_cast<std::size_t>(i)] += delta;
                bool ok = true;
                // exclude all previously visited vertices; for the
                // restricted class also anything adjacent to a predecessor
                // other than the current endpoint
                for (std::size_t t = 0; t + 1 < stack.size() && ok; ++t) {
                    const int dist = l1_dist(nxt, stack[t]);
                    if (dist == 0 || (xi_class && dist == 1)) ok = false;
                }
                if (!ok) continue;
                stack.push_back(nxt);
                rec();
                stack.pop_back();
            }
        }
    };
    rec();
    return count;
}

}  // namespace detail

// Paths whose vertices are distinct, consecutive vertices adjacent, and no
// vertex adjacent to any predecessor except its immediate one.
inline long enumerate_xi(Dimension dim, int n) {
    const int d = dim.value();
    if (n < 1) throw std::domain_error("enumerate_xi: n must be >= 1");
    if ((d == 2 && n > 12) || (d == 3 && n > 8) || (d >= 4 && n > 6))
        throw resource_error("enumerate_xi: instance (d=" + std::to_string(d) +
                             ", n=" + std::to_string(n) + ") beyond enumeration cap");
    return detail::count_paths_backtrack(d, n, true);
}

// n-step vertex self-avoiding walks from the origin.
inline long enumerate_saw(Dimension dim, int n) {
    const int d = dim.value();
    if (n < 1) throw std::domain_error("enumerate_saw: n must be >= 1");
    if ((d == 2 && n > 12) || (d == 3 && n > 8) || (d >= 4 && n > 6))
        throw resource_error("enumerate_saw: instance (d=" + std::to_string(d) +
                             ", n=" + std::to_string(n) + ") beyond enumeration cap");
    return detail::count_paths_backtrack(d, n, false);
}

// --- exact second-moment identities ---------------------------------------

namespace detail {

template <class Scalar>
Scalar int_pow(Scalar base, long e) {
    Scalar r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// sum over ordered pairs (gamma, gamma') of q^{2(2d + n(2d-1)) - E_count}.
template <class Scalar>
Scalar pair_sum_second_moment(Dimension dim, int n, const Scalar& q) {
    const int d = dim.value();
    std::vector<PreparedPath> paths;
    for (const auto& s : enumerate_oriented_paths(d, n))
        paths.push_back(prepare_path(dim, n, s));
    const long full = 2L * (2 * d + static_cast<long>(n) * (2 * d - 1));
    Scalar sum(0);
    for (const auto& a : paths)
        for (const auto& b : paths) {
            const auto st = pair_stats(dim, a, b);
            sum += detail::int_pow(q, full - st.E_count);
        }
    return sum;
}

// E N_n^2 by direct expectation over every configuration of the edges
// adjacent to the simplex {x >= 0, sum x_i <= n}.  Exact in rational mode.
template <class Scalar>
Scalar brute_force_second_moment(Dimension dim, int n, const Scalar& q,
                                 int edge_cap = 28) {
    const int d = dim.value();
    // simplex vertices, grouped implicitly by layer through path DP below
    std::vector<std::vector<int>> simplex;
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> gen = [&](int pos, int rem) {
        if (pos == d) {
            simplex.push_back(v);
            return;
        }
        for (int c = 0; c <= rem; ++c) {
            v[static_cast<std::size_t>(pos)] = c;
            gen(pos + 1, rem - c);
        }
    };
    gen(0, n);

    // canonical edges adjacent to the simplex
    std::vector<std::pair<std::vector<int>, int>> edges;
    {
        std::set<std::pair<std::vector<int>, int>> seen;
        for (const auto& s : simplex) {
            std::vector<int> w = s;
            for (int i = 0; i < d; ++i) {
                if (seen.insert({s, i}).second) edges.push_back({s, i});
                --w[static_cast<std::size_t>(i)];
                if (seen.insert({w, i}).second) edges.push_back({w, i});
                ++w[static_cast<std::size_t>(i)];
            }
        }
    }
    const int E = static_cast<int>(edges.size());
    if (E > edge_cap)
        throw resource_error("brute_force_second_moment: " + std::to_string(E) +
                             " edges exceed cap " + std::to_string(edge_cap) +
                             " (2^E configurations)");

    // per-path mask of all edges incident to its vertices; the path is
    // shielded iff no such edge is open
    std::vector<std::uint64_t> path_masks;
    auto vertex_edge_mask = [&](const std::vector<int>& x) {
        std::uint64_t m = 0;
        std::vector<int> w = x;
        for (int i = 0; i < d; ++i)
            for (int delta : {0, -1}) {
                w[static_cast<std::size_t>(i)] += delta;
                for (int e = 0; e < E; ++e)
                    if (edges[static_cast<std::size_t>(e)].first == w &&
                        edges[static_cast<std::size_t>(e)].second == i)
                        m |= 1ull << e;
                w[static_cast<std::size_t>(i)] -= delta;
            }
        return m;
    };
    for (const auto& steps : enumerate_oriented_paths(d, n)) {
        std::uint64_t m = 0;
        for (const auto& x : path_vertices(d, steps)) m |= vertex_edge_mask(x);
        path_masks.push_back(m);
    }

    // bucket N^2 by number of open edges
    std::vector<std::uint64_t> bucket(static_cast<std::size_t>(E) + 1, 0);
    const std::uint64_t origin_mask = vertex_edge_mask(std::vector<int>(
        static_cast<std::size_t>(d), 0));
    const std::uint64_t n_cfg = 1ull << E;
    for (std::uint64_t cfg = 0; cfg < n_cfg; ++cfg) {
        if (cfg & origin_mask) continue;  // origin not shielded -> N = 0
        std::uint64_t cnt = 0;
        for (std::uint64_t m : path_masks)
            if (!(cfg & m)) ++cnt;
        bucket[static_cast<std::size_t>(__builtin_popcountll(cfg))] += cnt * cnt;
    }

    const Scalar p = Scalar(1) - q;
    Scalar sum(0);
    for (int k = 0; k <= E; ++k) {
        if (!bucket[static_cast<std::size_t>(k)]) continue;
        sum += Scalar(bucket[static_cast<std::size_t>(k)]) *
               detail::int_pow(p, k) * detail::int_pow(q, E - k);
    }
    return sum;
}

}  // namespace shieldperc

#endif

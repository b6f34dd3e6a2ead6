#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splittree/graph.hpp"

namespace splittree::oracle {

// Brute-force implementations of the definitions the fast code is tested
// against. Everything here is exponential or near-exponential and capped at
// desk scale on purpose.

struct vertex_bipartition {
    std::vector<int> side_a, side_b; // side_a contains the minimum vertex
    bool operator<(const vertex_bipartition& o) const { return side_a < o.side_a; }
    bool operator==(const vertex_bipartition& o) const { return side_a == o.side_a; }
};

namespace detail {

inline std::vector<uint32_t> adj_masks(const graph& g) {
    int n = g.vertex_count();
    std::vector<uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (auto [u, v] : g.edges()) {
        adj[static_cast<std::size_t>(u)] |= uint32_t(1) << v;
        adj[static_cast<std::size_t>(v)] |= uint32_t(1) << u;
    }
    return adj;
}

inline bool mask_is_split(const std::vector<uint32_t>& adj, int n, uint32_t a) {
    const uint32_t full = n == 32 ? ~uint32_t(0) : ((uint32_t(1) << n) - 1);
    const uint32_t b = full & ~a;
    if (std::popcount(a) < 2 || std::popcount(b) < 2) return false;
    uint32_t fa = 0, fb = 0; // frontiers: vertices with a neighbour across
    for (int v = 0; v < n; ++v) {
        uint32_t bit = uint32_t(1) << v;
        if ((a & bit) && (adj[static_cast<std::size_t>(v)] & b)) fa |= bit;
        if ((b & bit) && (adj[static_cast<std::size_t>(v)] & a)) fb |= bit;
    }
    for (int v = 0; v < n; ++v)
        if (fa & (uint32_t(1) << v))
            if ((adj[static_cast<std::size_t>(v)] & fb) != fb) return false;
    return true;
}

inline vertex_bipartition from_mask(int n, uint32_t a) {
    vertex_bipartition bp;
    for (int v = 0; v < n; ++v)
        (((a >> v) & 1) ? bp.side_a : bp.side_b).push_back(v);
    if (bp.side_a.empty() || (!bp.side_b.empty() && bp.side_b[0] < bp.side_a[0]))
        std::swap(bp.side_a, bp.side_b);
    return bp;
}

} // namespace detail

// All splits of g by 2^n enumeration. Requires n <= 16 and g connected.
inline std::set<vertex_bipartition> enumerate_splits_bruteforce(const graph& g) {
    int n = g.vertex_count();
    if (n > 16) throw std::invalid_argument("enumerate_splits_bruteforce: n > 16");
    std::set<vertex_bipartition> out;
    if (n < 4) return out;
    auto adj = detail::adj_masks(g);
    for (uint32_t a = 1; a < (uint32_t(1) << n); ++a) {
        if (!(a & 1)) continue; // canonical side holds vertex 0
        if (detail::mask_is_split(adj, n, a)) out.insert(detail::from_mask(n, a));
    }
    return out;
}

inline bool is_prime_bruteforce(const graph& g) {
    return enumerate_splits_bruteforce(g).empty();
}

inline bool is_clique(const graph& g) {
    int n = g.vertex_count();
    return g.edge_count() == n * (n - 1) / 2;
}

inline bool is_star(const graph& g) {
    int n = g.vertex_count();
    if (n < 3 || g.edge_count() != n - 1) return false;
    int hubs = 0;
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) == n - 1) ++hubs;
        else if (g.degree(v) != 1) return false;
    }
    return hubs == 1;
}

inline bool is_degenerate(const graph& g) { return is_clique(g) || is_star(g); }

// One split component of the recursive decomposition. vertex_label[i] is the
// original vertex id, or -(marker id)-1 for marker vertices introduced by
// splits; markers are matched in pairs across components.
struct split_component {
    graph g;
    std::vector<int> vertex_label;
};

struct recursive_decomposition {
    std::vector<split_component> components;
    // pairs of (component index, local vertex) matched by a split edge
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> matchings;
};

namespace detail {

inline void decompose_rec(const graph& g, std::vector<int> labels, int& next_marker,
                          recursive_decomposition& out) {
    int n = g.vertex_count();
    auto splits = enumerate_splits_bruteforce(g);
    if (splits.empty() || is_degenerate(g)) {
        out.components.push_back({g, std::move(labels)});
        return;
    }
    // deterministic choice: lexicographically smallest canonical side
    const vertex_bipartition& sp = *splits.begin();
    const std::vector<int>& A = sp.side_a;
    const std::vector<int>& B = sp.side_b;
    std::vector<int> in_a(static_cast<std::size_t>(n), 0), local(static_cast<std::size_t>(n), -1);
    for (int v : A) in_a[static_cast<std::size_t>(v)] = 1;
    for (std::size_t i = 0; i < A.size(); ++i) local[static_cast<std::size_t>(A[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < B.size(); ++i) local[static_cast<std::size_t>(B[i])] = static_cast<int>(i);

    int marker = next_marker++;
    int a_mark = static_cast<int>(A.size());
    int b_mark = static_cast<int>(B.size());
    std::vector<std::pair<int, int>> ea, eb;
    for (auto [u, v] : g.edges()) {
        if (in_a[static_cast<std::size_t>(u)] && in_a[static_cast<std::size_t>(v)])
            ea.emplace_back(local[static_cast<std::size_t>(u)], local[static_cast<std::size_t>(v)]);
        else if (!in_a[static_cast<std::size_t>(u)] && !in_a[static_cast<std::size_t>(v)])
            eb.emplace_back(local[static_cast<std::size_t>(u)], local[static_cast<std::size_t>(v)]);
    }
    // frontier vertices become the marker's neighbourhood
    std::set<int> fa, fb;
    for (auto [u, v] : g.edges()) {
        if (in_a[static_cast<std::size_t>(u)] != in_a[static_cast<std::size_t>(v)]) {
            int au = in_a[static_cast<std::size_t>(u)] ? u : v;
            int bv = in_a[static_cast<std::size_t>(u)] ? v : u;
            fa.insert(local[static_cast<std::size_t>(au)]);
            fb.insert(local[static_cast<std::size_t>(bv)]);
        }
    }
    for (int v : fa) ea.emplace_back(v, a_mark);
    for (int v : fb) eb.emplace_back(v, b_mark);

    std::vector<int> la, lb;
    for (int v : A) la.push_back(labels[static_cast<std::size_t>(v)]);
    la.push_back(-marker - 1);
    for (int v : B) lb.push_back(labels[static_cast<std::size_t>(v)]);
    lb.push_back(-marker - 1);

    decompose_rec(graph::from_edges(a_mark + 1, ea), std::move(la), next_marker, out);
    decompose_rec(graph::from_edges(b_mark + 1, eb), std::move(lb), next_marker, out);
}

} // namespace detail

// Recursive split decomposition with recorded marker matchings; n <= 14.
inline recursive_decomposition decompose_recursive(const graph& g) {
    if (g.vertex_count() > 14) throw std::invalid_argument("decompose_recursive: n > 14");
    if (!is_connected(g)) throw std::invalid_argument("decompose_recursive: disconnected graph");
    recursive_decomposition out;
    std::vector<int> labels(static_cast<std::size_t>(g.vertex_count()));
    for (int v = 0; v < g.vertex_count(); ++v) labels[static_cast<std::size_t>(v)] = v;
    int next_marker = 0;
    detail::decompose_rec(g, std::move(labels), next_marker, out);
    // pair up marker occurrences (each marker id appears in exactly two components)
    std::map<int, std::vector<std::pair<int, int>>> occur;
    for (int c = 0; c < static_cast<int>(out.components.size()); ++c) {
        const auto& comp = out.components[static_cast<std::size_t>(c)];
        for (int v = 0; v < comp.g.vertex_count(); ++v)
            if (comp.vertex_label[static_cast<std::size_t>(v)] < 0)
                occur[comp.vertex_label[static_cast<std::size_t>(v)]].push_back({c, v});
    }
    for (auto& [id, occ] : occur) {
        if (occ.size() != 2) throw std::logic_error("decompose_recursive: unmatched marker");
        out.matchings.push_back({occ[0], occ[1]});
    }
    return out;
}

// Rebuild the original graph from a recursive decomposition by joining the
// components along their matchings (the graph-level counterpart of node-join:
// the complete join runs between the two sides of each split edge).
inline graph reassemble(const recursive_decomposition& dec) {
    int k = static_cast<int>(dec.components.size());
    auto lab = [&](int c, int v) {
        return dec.components[static_cast<std::size_t>(c)].vertex_label[static_cast<std::size_t>(v)];
    };
    std::vector<std::set<std::pair<int, int>>> pot(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c)
        for (auto [u, v] : dec.components[static_cast<std::size_t>(c)].g.edges()) {
            int a = lab(c, u), b = lab(c, v);
            pot[static_cast<std::size_t>(c)].insert({std::min(a, b), std::max(a, b)});
        }
    std::vector<int> find(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) find[static_cast<std::size_t>(c)] = c;
    auto root = [&](int c) {
        while (find[static_cast<std::size_t>(c)] != c) c = find[static_cast<std::size_t>(c)];
        return c;
    };
    for (const auto& [occ1, occ2] : dec.matchings) {
        int m = lab(occ1.first, occ1.second);
        int p1 = root(occ1.first), p2 = root(occ2.first);
        if (p1 == p2) throw std::logic_error("reassemble: matching inside one component");
        auto extract = [&](int p) {
            std::vector<int> nbrs;
            auto& es = pot[static_cast<std::size_t>(p)];
            for (auto it = es.begin(); it != es.end();) {
                if (it->first == m || it->second == m) {
                    nbrs.push_back(it->first == m ? it->second : it->first);
                    it = es.erase(it);
                } else {
                    ++it;
                }
            }
            return nbrs;
        };
        std::vector<int> n1 = extract(p1), n2 = extract(p2);
        pot[static_cast<std::size_t>(p1)].insert(pot[static_cast<std::size_t>(p2)].begin(),
                                                 pot[static_cast<std::size_t>(p2)].end());
        pot[static_cast<std::size_t>(p2)].clear();
        find[static_cast<std::size_t>(p2)] = p1;
        for (int a : n1)
            for (int b : n2)
                pot[static_cast<std::size_t>(p1)].insert({std::min(a, b), std::max(a, b)});
    }
    int n = 0;
    for (const auto& comp : dec.components)
        for (int l : comp.vertex_label) n = std::max(n, l + 1);
    std::vector<std::pair<int, int>> out;
    for (auto [a, b] : pot[static_cast<std::size_t>(root(0))])
        if (a >= 0 && b >= 0) out.emplace_back(a, b);
    return graph::from_edges(n, out);
}

// Random connected graph: random recursive tree plus random extra edges,
// deterministic per seed.
inline graph random_connected_graph(int n, long long m, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_connected_graph: n < 1");
    long long maxm = static_cast<long long>(n) * (n - 1) / 2;
    if (m < n - 1 || m > maxm)
        throw std::invalid_argument("random_connected_graph: infeasible (n, m)");
    std::mt19937_64 rng(seed);
    std::set<std::pair<int, int>> es;
    for (int v = 1; v < n; ++v) {
        int p = static_cast<int>(rng() % static_cast<uint64_t>(v));
        es.insert({p, v});
    }
    if (m > maxm / 2 && n > 2) {
        std::vector<std::pair<int, int>> all;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (!es.count({u, v})) all.emplace_back(u, v);
        std::shuffle(all.begin(), all.end(), rng);
        for (std::size_t i = 0; es.size() < static_cast<std::size_t>(m); ++i) es.insert(all[i]);
    } else {
        while (es.size() < static_cast<std::size_t>(m)) {
            int u = static_cast<int>(rng() % static_cast<uint64_t>(n));
            int v = static_cast<int>(rng() % static_cast<uint64_t>(n));
            if (u == v) continue;
            es.insert({std::min(u, v), std::max(u, v)});
        }
    }
    return graph::from_edges(n, {es.begin(), es.end()});
}

// Every connected labeled graph on n <= 6 vertices, by edge-bitmask enumeration.
template <typename Fn>
inline void for_each_connected_graph(int n, Fn&& fn) {
    if (n > 6) throw std::invalid_argument("for_each_connected_graph: n > 6");
    std::vector<std::pair<int, int>> slots;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) slots.emplace_back(u, v);
    uint32_t lim = uint32_t(1) << slots.size();
    for (uint32_t mask = 0; mask < lim; ++mask) {
        std::vector<std::pair<int, int>> es;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (mask & (uint32_t(1) << i)) es.push_back(slots[i]);
        graph g = graph::from_edges(n, es);
        if (is_connected(g)) fn(g);
    }
}

inline long long count_connected_graphs(int n) {
    long long c = 0;
    for_each_connected_graph(n, [&](const graph&) { ++c; });
    return c;
}

} // namespace splittree::oracle

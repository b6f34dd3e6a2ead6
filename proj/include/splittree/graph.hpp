#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace splittree {

// Simple undirected graph on vertices 0..n-1. Immutable after construction.
class graph {
public:
    graph() = default;

    explicit graph(int n) : n_(n), adj_(static_cast<std::size_t>(n)) {
        if (n < 0) throw std::invalid_argument("graph: negative vertex count");
    }

    static graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        graph g(n);
        for (auto [u, v] : edges) g.add_edge_checked(u, v);
        g.finalize();
        return g;
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    std::span<const int> neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }

    bool adjacent(int u, int v) const {
        const auto& a = adj_[static_cast<std::size_t>(u)];
        return std::binary_search(a.begin(), a.end(), v);
    }

    // Edges as (u, v) with u < v, sorted lexicographically.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool operator==(const graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    friend graph parse_edge_list(std::istream& in);

    void add_edge_checked(int u, int v) {
        if (u < 0 || u >= n_ || v < 0 || v >= n_)
            throw std::out_of_range("graph: vertex id out of range");
        if (u == v) throw std::invalid_argument("graph: self-loop");
        if (u > v) std::swap(u, v);
        edges_.emplace_back(u, v);
    }

    void finalize() {
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw std::invalid_argument("graph: duplicate edge");
        for (auto [u, v] : edges_) {
            adj_[static_cast<std::size_t>(u)].push_back(v);
            adj_[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
    }

    int n_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<std::pair<int, int>> edges_;
};

// Parse failures carry a category so callers can distinguish them.
class parse_error : public std::runtime_error {
public:
    enum class code { bad_header, malformed_line, vertex_out_of_range, self_loop, duplicate_edge };

    parse_error(code c, const std::string& what) : std::runtime_error(what), code_(c) {}
    code kind() const { return code_; }

private:
    code code_;
};

namespace detail {

inline bool parse_int(std::string_view tok, int& out) {
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && p == tok.data() + tok.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

} // namespace detail

// Edge-list format: header "n m", then m lines "u v", '#' starts a comment line.
inline graph parse_edge_list(std::istream& in) {
    std::string line;
    auto next_tokens = [&](std::vector<std::string_view>& toks, std::string& store) -> bool {
        while (std::getline(in, line)) {
            std::string_view sv(line);
            if (auto pos = sv.find('#'); pos != std::string_view::npos) sv = sv.substr(0, pos);
            store = std::string(sv);
            toks = detail::split_ws(store);
            if (!toks.empty()) return true;
        }
        return false;
    };

    std::vector<std::string_view> toks;
    std::string store;
    if (!next_tokens(toks, store))
        throw parse_error(parse_error::code::bad_header, "edge list: missing header line");
    int n = 0, m = 0;
    if (toks.size() != 2 || !detail::parse_int(toks[0], n) || !detail::parse_int(toks[1], m) ||
        n < 0 || m < 0)
        throw parse_error(parse_error::code::bad_header, "edge list: header must be \"n m\"");

    graph g(n);
    for (int e = 0; e < m; ++e) {
        if (!next_tokens(toks, store))
            throw parse_error(parse_error::code::malformed_line,
                              "edge list: expected " + std::to_string(m) + " edges, got " +
                                  std::to_string(e));
        int u = 0, v = 0;
        if (toks.size() != 2 || !detail::parse_int(toks[0], u) || !detail::parse_int(toks[1], v))
            throw parse_error(parse_error::code::malformed_line,
                              "edge list: malformed edge line \"" + store + "\"");
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw parse_error(parse_error::code::vertex_out_of_range,
                              "edge list: vertex id out of range in \"" + store + "\"");
        if (u == v)
            throw parse_error(parse_error::code::self_loop, "edge list: self-loop in \"" + store + "\"");
        if (u > v) std::swap(u, v);
        g.edges_.emplace_back(u, v);
    }
    if (next_tokens(toks, store))
        throw parse_error(parse_error::code::malformed_line, "edge list: trailing content");
    auto edges = std::move(g.edges_);
    g.edges_.clear();
    try {
        g = graph::from_edges(n, edges);
    } catch (const std::invalid_argument& ex) {
        throw parse_error(parse_error::code::duplicate_edge, ex.what());
    }
    return g;
}

inline graph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_edge_list(in);
}

// Canonical text form; parse(serialize(g)) == g, byte-exact round-trip.
inline std::string serialize_edge_list(const graph& g) {
    std::string out = std::to_string(g.vertex_count()) + " " + std::to_string(g.edge_count()) + "\n";
    for (auto [u, v] : g.edges()) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

// Partition of 0..n-1 into maximal connected sets, each sorted, list sorted by minimum.
inline std::vector<std::vector<int>> connected_components(const graph& g) {
    int n = g.vertex_count();
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> members;
        std::queue<int> q;
        q.push(s);
        comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            members.push_back(v);
            for (int w : g.neighbors(v))
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = static_cast<int>(out.size());
                    q.push(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

inline bool is_connected(const graph& g) {
    return g.vertex_count() <= 1 || connected_components(g).size() == 1;
}

} // namespace splittree

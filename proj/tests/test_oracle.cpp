#include <doctest.h>

#include "splittree/oracle.hpp"

using namespace splittree;
using namespace splittree::oracle;

static graph path(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
    return graph::from_edges(n, es);
}

static graph cycle(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i) es.emplace_back(i, (i + 1) % n);
    return graph::from_edges(n, es);
}

static graph clique(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.emplace_back(i, j);
    return graph::from_edges(n, es);
}

TEST_CASE("enumerate_splits_bruteforce examples") {
    auto p4 = enumerate_splits_bruteforce(path(4));
    REQUIRE(p4.size() == 1);
    CHECK(p4.begin()->side_a == std::vector<int>{0, 1});
    CHECK(p4.begin()->side_b == std::vector<int>{2, 3});

    CHECK(enumerate_splits_bruteforce(clique(4)).size() == 3);
    CHECK(enumerate_splits_bruteforce(cycle(5)).empty());
}

TEST_CASE("is_prime_bruteforce examples") {
    CHECK(is_prime_bruteforce(cycle(5)));
    CHECK_FALSE(is_prime_bruteforce(path(4)));
    CHECK(is_prime_bruteforce(path(3))); // no bipartition with both sides >= 2
}

TEST_CASE("decompose_recursive examples") {
    auto dp4 = decompose_recursive(path(4));
    REQUIRE(dp4.components.size() == 2);
    for (const auto& c : dp4.components) {
        CHECK(c.g.vertex_count() == 3);
        CHECK(is_star(c.g));
    }
    REQUIRE(dp4.matchings.size() == 1);
    // the markers are matched across their degree-1 positions
    for (auto occ : {dp4.matchings[0].first, dp4.matchings[0].second}) {
        const auto& comp = dp4.components[static_cast<std::size_t>(occ.first)];
        CHECK(comp.g.degree(occ.second) == 1);
        CHECK(comp.vertex_label[static_cast<std::size_t>(occ.second)] < 0);
    }

    auto dk4 = decompose_recursive(clique(4));
    REQUIRE(dk4.components.size() == 1);
    CHECK(is_clique(dk4.components[0].g));

    auto dc5 = decompose_recursive(cycle(5));
    REQUIRE(dc5.components.size() == 1);
    CHECK(is_prime_bruteforce(dc5.components[0].g));
}

TEST_CASE("decompose_recursive: components classify and reassemble") {
    for (uint64_t seed = 0; seed < 40; ++seed) {
        int n = 4 + static_cast<int>(seed % 7);
        long long maxm = static_cast<long long>(n) * (n - 1) / 2;
        long long m = (n - 1) + static_cast<long long>(seed % (maxm - n + 2));
        graph g = random_connected_graph(n, m, seed * 13 + 1);
        auto dec = decompose_recursive(g);
        for (const auto& c : dec.components) {
            bool ok = is_degenerate(c.g) || is_prime_bruteforce(c.g);
            CHECK(ok);
        }
        CHECK(reassemble(dec) == g);
    }
}

TEST_CASE("random_connected_graph shape") {
    graph g = random_connected_graph(10, 20, 5);
    CHECK(g.vertex_count() == 10);
    CHECK(g.edge_count() == 20);
    CHECK(is_connected(g));
    // deterministic per seed
    CHECK(random_connected_graph(10, 20, 5) == g);
    CHECK_FALSE(random_connected_graph(10, 20, 6) == g);
    // dense request near the maximum
    graph d = random_connected_graph(8, 27, 1);
    CHECK(d.edge_count() == 27);
    CHECK(is_connected(d));
    CHECK_THROWS_AS(random_connected_graph(5, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_connected_graph(5, 11, 0), std::invalid_argument);
}

TEST_CASE("enumerate_connected_graphs counts") {
    CHECK(count_connected_graphs(2) == 1);
    CHECK(count_connected_graphs(3) == 4);
    CHECK(count_connected_graphs(4) == 38);
}

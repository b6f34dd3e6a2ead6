#include <doctest.h>

#include "splittree/builder.hpp"
#include "splittree/oracle.hpp"
#include "splittree/tree_io.hpp"

using namespace splittree;

TEST_CASE("json export is lossless") {
    for (uint64_t seed = 0; seed < 12; ++seed) {
        int n = 2 + static_cast<int>(seed % 8);
        long long maxm = static_cast<long long>(n) * (n - 1) / 2;
        graph g = oracle::random_connected_graph(
            n, std::min<long long>(n + 2, maxm), seed * 3 + 1);
        auto res = build_split_tree(g);
        nlohmann::json j = to_json(res.tree);
        split_tree back = from_json(j);
        CHECK(back.accessibility_graph() == g);
        CHECK(back.canonical_form() == res.tree.canonical_form());
        // serialization identity
        CHECK(to_json(back) == j);
        auto rep = back.check_reduced();
        CHECK(rep.ok);
    }
}

TEST_CASE("json schema shape") {
    auto res = build_split_tree(parse_edge_list("4 3\n0 1\n1 2\n2 3\n"));
    nlohmann::json j = to_json(res.tree);
    CHECK(j.at("n") == 4);
    CHECK(j.contains("root_leaf"));
    REQUIRE(j.at("nodes").size() == 2);
    for (const auto& jn : j.at("nodes")) {
        CHECK(jn.at("kind") == "star");
        CHECK(jn.contains("centre"));
        for (const auto& jm : jn.at("markers")) {
            CHECK(jm.contains("opposite"));
            CHECK_FALSE(jm.contains("adj")); // omitted for degenerate labels
        }
    }
}

TEST_CASE("dot output mentions every leaf and node") {
    auto res = build_split_tree(parse_edge_list("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"));
    std::string dot = to_dot(res.tree);
    CHECK(dot.find("graph splittree") != std::string::npos);
    for (int v = 0; v < 4; ++v)
        CHECK(dot.find("v" + std::to_string(v)) != std::string::npos);
    CHECK(dot.find("cluster_") != std::string::npos);
    CHECK(dot.find("label=\"clique\"") != std::string::npos);
}

#include <doctest.h>

#include <map>
#include <random>

#include "splittree/disjoint_sets.hpp"

using namespace splittree;

TEST_CASE("make_set, find, owners") {
    disjoint_sets ds;
    CHECK(ds.make_set(0) == 0);
    CHECK(ds.find(0) == 0);
    CHECK(ds.make_set(1, 42) == 1);
    CHECK(ds.owner_of(1) == 42);
    CHECK_THROWS_AS(ds.make_set(0), std::invalid_argument);
    CHECK_THROWS_AS(ds.find(9), std::invalid_argument);
}

TEST_CASE("unite merges and updates owners") {
    disjoint_sets ds;
    ds.make_set(0, 10);
    ds.make_set(1, 11);
    ds.unite(0, 1, 12);
    CHECK(ds.find(0) == ds.find(1));
    CHECK(ds.owner_of(0) == 12);
    CHECK(ds.owner_of(1) == 12);
    // union of already-merged sets only updates the owner
    ds.unite(0, 1, 13);
    CHECK(ds.owner_of(1) == 13);
    // owner stable under interleaved finds
    ds.make_set(2, 7);
    ds.unite(2, 0, 9);
    CHECK(ds.owner_of(2) == 9);
    CHECK(ds.find(1) == ds.find(2));
    CHECK(ds.owner_of(1) == 9);
}

TEST_CASE("randomized model check against a naive partition") {
    std::mt19937_64 rng(2024);
    disjoint_sets ds;
    std::map<int, int> naive_rep; // element -> class id
    std::map<int, int> class_owner;
    int next_class = 0;
    int n = 0;
    for (int op = 0; op < 10000; ++op) {
        int what = static_cast<int>(rng() % 3);
        if (what == 0 || n == 0) {
            int owner = static_cast<int>(rng() % 50);
            ds.make_set(n, owner);
            naive_rep[n] = next_class;
            class_owner[next_class] = owner;
            ++next_class;
            ++n;
        } else if (what == 1) {
            int a = static_cast<int>(rng() % static_cast<uint64_t>(n));
            int b = static_cast<int>(rng() % static_cast<uint64_t>(n));
            int owner = static_cast<int>(rng() % 50);
            ds.unite(a, b, owner);
            int ca = naive_rep[a], cb = naive_rep[b];
            for (auto& [e, c] : naive_rep)
                if (c == cb) c = ca;
            class_owner[ca] = owner;
        } else {
            int a = static_cast<int>(rng() % static_cast<uint64_t>(n));
            int b = static_cast<int>(rng() % static_cast<uint64_t>(n));
            CHECK((ds.find(a) == ds.find(b)) == (naive_rep[a] == naive_rep[b]));
            CHECK(ds.owner_of(a) == class_owner[naive_rep[a]]);
        }
    }
}

TEST_CASE("amortized cost stays near-linear in operations") {
    disjoint_sets ds;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ds.make_set(i);
    std::mt19937_64 rng(7);
    long long k = 0;
    for (int i = 0; i < n - 1; ++i) {
        ds.unite(static_cast<int>(rng() % n), static_cast<int>(rng() % n), 0);
        ++k;
    }
    for (int i = 0; i < 4 * n; ++i) {
        ds.find(static_cast<int>(rng() % n));
        ++k;
    }
    // with union by rank + compression the traversal work is O(alpha * k + n);
    // alpha is tiny, so a loose constant witnesses the bound
    auto c = ds.counts();
    CHECK(c.find_steps <= 5 * (k + ds.counts().unions * 2) + 2 * n);
}

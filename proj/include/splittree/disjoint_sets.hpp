#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace splittree {

// Union-find over dense integer elements, union by rank + path compression.
// Each set root carries an owner handle (the tree node owning the children-set).
// Elements cannot be removed; stale elements simply stop being referenced.
class disjoint_sets {
public:
    struct op_counts {
        long long finds = 0;
        long long unions = 0;
        long long make_sets = 0;
        long long find_steps = 0; // parent dereferences inside find, for the cost model
    };

    static constexpr int32_t no_owner = -1;

    int32_t make_set(int32_t x, int32_t owner = no_owner) {
        if (x < 0) throw std::invalid_argument("disjoint_sets: negative element");
        if (x < size() && parent_[static_cast<std::size_t>(x)] != unused)
            throw std::invalid_argument("disjoint_sets: duplicate element");
        if (x >= size()) {
            parent_.resize(static_cast<std::size_t>(x) + 1, unused);
            rank_.resize(static_cast<std::size_t>(x) + 1, 0);
            owner_.resize(static_cast<std::size_t>(x) + 1, no_owner);
        }
        parent_[static_cast<std::size_t>(x)] = x;
        owner_[static_cast<std::size_t>(x)] = owner;
        ++counts_.make_sets;
        return x;
    }

    // Next unused slot; convenient when elements have no external identity.
    int32_t make_set_auto(int32_t owner = no_owner) { return make_set(size(), owner); }

    int32_t find(int32_t x) const {
        check(x);
        ++counts_.finds;
        int32_t r = x;
        while (parent_[static_cast<std::size_t>(r)] != r) {
            ++counts_.find_steps;
            r = parent_[static_cast<std::size_t>(r)];
        }
        while (parent_[static_cast<std::size_t>(x)] != r) {
            int32_t next = parent_[static_cast<std::size_t>(x)];
            parent_[static_cast<std::size_t>(x)] = r;
            x = next;
        }
        return r;
    }

    // Merge the sets of a and b; the surviving root's owner becomes new_owner.
    // Already-merged inputs are a no-op apart from the owner update.
    int32_t unite(int32_t a, int32_t b, int32_t new_owner) {
        int32_t ra = find(a), rb = find(b);
        ++counts_.unions;
        if (ra == rb) {
            owner_[static_cast<std::size_t>(ra)] = new_owner;
            return ra;
        }
        if (rank_[static_cast<std::size_t>(ra)] < rank_[static_cast<std::size_t>(rb)])
            std::swap(ra, rb);
        parent_[static_cast<std::size_t>(rb)] = ra;
        if (rank_[static_cast<std::size_t>(ra)] == rank_[static_cast<std::size_t>(rb)])
            ++rank_[static_cast<std::size_t>(ra)];
        owner_[static_cast<std::size_t>(ra)] = new_owner;
        owner_[static_cast<std::size_t>(rb)] = no_owner; // owner lives only at roots
        return ra;
    }

    int32_t owner_of(int32_t x) const { return owner_[static_cast<std::size_t>(find(x))]; }

    void set_owner(int32_t x, int32_t owner) { owner_[static_cast<std::size_t>(find(x))] = owner; }

    bool contains(int32_t x) const {
        return x >= 0 && x < size() && parent_[static_cast<std::size_t>(x)] != unused;
    }

    int32_t size() const { return static_cast<int32_t>(parent_.size()); }

    const op_counts& counts() const { return counts_; }
    void reset_counts() { counts_ = {}; }

private:
    static constexpr int32_t unused = -2;

    void check(int32_t x) const {
        if (!contains(x)) throw std::invalid_argument("disjoint_sets: unknown element");
    }

    mutable std::vector<int32_t> parent_;
    std::vector<uint8_t> rank_;
    std::vector<int32_t> owner_;
    mutable op_counts counts_;
};

} // namespace splittree

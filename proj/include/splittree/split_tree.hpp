#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splittree/disjoint_sets.hpp"
#include "splittree/graph.hpp"
#include "splittree/oracle.hpp"

namespace splittree {

inline void st_check(bool cond, const char* msg) {
    if (!cond) throw std::logic_error(std::string("split_tree invariant: ") + msg);
}

using ext_id = int32_t;
using node_id = int32_t;
constexpr int32_t k_none = -1;

enum class node_kind : uint8_t { clique, star, prime };

inline const char* to_string(node_kind k) {
    switch (k) {
    case node_kind::clique: return "clique";
    case node_kind::star: return "star";
    default: return "prime";
    }
}

// Reference to a tree entity: an internal node or a leaf.
struct tref {
    int32_t v = std::numeric_limits<int32_t>::min();

    static tref none() { return {}; }
    static tref node(node_id id) { return tref{id}; }
    static tref leaf(ext_id id) { return tref{-id - 1}; }

    bool is_none() const { return v == std::numeric_limits<int32_t>::min(); }
    bool is_node() const { return v >= 0; }
    bool is_leaf() const { return !is_none() && v < 0; }
    node_id node() const { return v; }
    ext_id leaf() const { return -v - 1; }

    bool operator==(const tref&) const = default;
};

// Per-entity scratch used by spanning-subtree traversals; stamped by generation
// so nothing needs clearing between insertions.
struct span_state {
    uint32_t active_gen = 0;
    uint32_t visit_gen = 0;
    uint32_t removed_gen = 0; // trimmed from T' or pruned as perfect
    tref span_parent = tref::none();
    int32_t vis_children = 0;
    tref one_child = tref::none();
};

// An extremity: either a leaf of the tree (vertex >= 0) or a marker vertex of
// some node's label. Opposite pointers pair the two extremities of each
// tree-edge. Markers do not track their owning node; only root markers carry a
// node pointer (kept in `node`). Label adjacency exists only in prime labels
// and uses tombstones: dead entries stay in `adj`, `degree` is authoritative.
struct ext {
    ext_id opposite = k_none;
    int32_t vertex = k_none; // >= 0 for leaves
    node_id node = k_none;   // owning node, maintained for root markers only
    uint32_t perfect_gen = 0;
    int32_t degree = 0;
    std::vector<ext_id> adj;
    int32_t adj_dead = 0;
    ext_id prev = k_none, next = k_none; // intrusive marker list of the owning node
    bool alive = true;

    // tree-entity fields (leaves only)
    tref parent = tref::none();
    bool parent_direct = false;
    int32_t uf_slot = k_none;
    span_state mk;

    bool is_leaf() const { return vertex >= 0; }
};

struct tree_node {
    node_kind kind = node_kind::clique;
    ext_id root_marker = k_none;
    ext_id centre = k_none;        // star labels
    ext_id first_marker = k_none;  // intrusive marker list
    ext_id last_marker = k_none;
    int32_t marker_count = 0;
    ext_id last_in_sigma = k_none; // prime labels
    ext_id universal = k_none;     // prime labels, optional
    bool alive = true;

    tref parent = tref::none();
    bool parent_direct = false;
    int32_t uf_slot = k_none;       // membership slot in the parent's children-set
    int32_t children_slot = k_none; // some slot inside this node's own children-set (prime)
    span_state mk;
    uint32_t scratch_gen = 0;
    int32_t scratch_idx = k_none;

    int32_t child_count() const { return marker_count - 1; }
};

struct reduced_report {
    bool ok = true;
    std::vector<std::string> problems;
    std::vector<std::string> notes;

    void fail(std::string p) {
        ok = false;
        problems.push_back(std::move(p));
    }
};

struct join_result {
    long long new_label_edges = 0;
    ext_id reused_marker = k_none; // special star path: the parent marker that stands in for the centre
    ext_id died_centre = k_none;   // special star path: the centre that was absorbed
    bool special = false;
};

// A bipartition of the vertex set, canonicalized so side_a holds vertex 0.
struct bipartition {
    std::vector<int> side_a, side_b;
    bool operator<(const bipartition& o) const { return side_a < o.side_a; }
    bool operator==(const bipartition& o) const { return side_a == o.side_a; }
};

// Rooted graph-labelled tree specialized to split decomposition: leaves are
// graph vertices, internal nodes carry clique/star/prime labels. The root is
// the leaf of the first inserted vertex. Children of prime nodes live in
// union-find children-sets whose roots point back at the owning node; children
// of degenerate nodes keep direct parent pointers. Dead ("fake") nodes and
// markers stay in the arenas and are skipped everywhere.
class split_tree {
public:
    split_tree() = default;

    // ---- basic access ----------------------------------------------------

    int leaf_count() const { return static_cast<int>(leaf_of_vertex_.size()); }
    ext_id root_leaf() const { return root_leaf_; }

    ext_id leaf_of_vertex(int v) const {
        ext_id l = leaf_of_vertex_.at(static_cast<std::size_t>(v));
        st_check(l != k_none, "leaf_of_vertex: vertex not in the tree");
        return l;
    }

    const ext& at(ext_id e) const { return exts_[static_cast<std::size_t>(e)]; }
    ext& at(ext_id e) { return exts_[static_cast<std::size_t>(e)]; }
    const tree_node& node_at(node_id u) const { return nodes_[static_cast<std::size_t>(u)]; }
    tree_node& node_at(node_id u) { return nodes_[static_cast<std::size_t>(u)]; }

    int32_t ext_arena_size() const { return static_cast<int32_t>(exts_.size()); }
    int32_t node_arena_size() const { return static_cast<int32_t>(nodes_.size()); }

    disjoint_sets& sets() { return sets_; }
    const disjoint_sets& sets() const { return sets_; }

    uint32_t generation() const { return generation_; }
    uint32_t next_generation() { return ++generation_; }

    long long node_splits() const { return node_splits_; }
    long long node_joins() const { return node_joins_; }

    int live_node_count() const {
        int c = 0;
        for (const auto& nd : nodes_)
            if (nd.alive) ++c;
        return c;
    }

    int fake_node_count() const { return static_cast<int>(nodes_.size()) - live_node_count(); }

    std::vector<node_id> live_nodes() const {
        std::vector<node_id> out;
        for (node_id u = 0; u < node_arena_size(); ++u)
            if (nodes_[static_cast<std::size_t>(u)].alive) out.push_back(u);
        return out;
    }

    int live_marker_count() const {
        int c = 0;
        for (node_id u : live_nodes()) c += node_at(u).marker_count;
        return c;
    }

    std::vector<ext_id> markers_of(node_id u) const {
        std::vector<ext_id> out;
        for (ext_id m = node_at(u).first_marker; m != k_none; m = at(m).next) out.push_back(m);
        return out;
    }

    // Entity on the far side of extremity e's tree-edge.
    tref across(ext_id e) const {
        ext_id o = at(e).opposite;
        st_check(o != k_none, "across: dangling opposite");
        if (at(o).is_leaf()) return tref::leaf(o);
        st_check(at(o).node != k_none, "across: opposite marker has no node pointer");
        return tref::node(at(o).node);
    }

    // The extremity an entity presents to its parent edge.
    ext_id up_ext(tref t) const {
        return t.is_leaf() ? t.leaf() : node_at(t.node()).root_marker;
    }

    bool parent_is_direct(tref t) const {
        return t.is_leaf() ? at(t.leaf()).parent_direct : node_at(t.node()).parent_direct;
    }

    // Parent of a node or leaf: the direct pointer when active, otherwise the
    // owner of the union-find set the entity belongs to.
    tref resolve_parent(tref t) const {
        const tref direct = t.is_leaf() ? at(t.leaf()).parent : node_at(t.node()).parent;
        const bool active = parent_is_direct(t);
        if (active) return direct;
        const int32_t slot = t.is_leaf() ? at(t.leaf()).uf_slot : node_at(t.node()).uf_slot;
        if (slot == k_none) return tref::none(); // the root leaf
        node_id owner = sets_.owner_of(slot);
        st_check(owner != k_none && node_at(owner).alive, "resolve_parent: stale children-set owner");
        return tref::node(owner);
    }

    // ---- construction primitives ------------------------------------------

    ext_id new_leaf(int vertex) {
        if (vertex >= static_cast<int>(leaf_of_vertex_.size()))
            leaf_of_vertex_.resize(static_cast<std::size_t>(vertex) + 1, k_none);
        st_check(leaf_of_vertex_[static_cast<std::size_t>(vertex)] == k_none, "duplicate leaf vertex");
        ext_id e = alloc_ext();
        at(e).vertex = vertex;
        leaf_of_vertex_[static_cast<std::size_t>(vertex)] = e;
        if (root_leaf_ == k_none) root_leaf_ = e;
        return e;
    }

    node_id new_node(node_kind k) {
        nodes_.emplace_back();
        nodes_.back().kind = k;
        return static_cast<node_id>(nodes_.size()) - 1;
    }

    ext_id new_marker(node_id u) {
        ext_id e = alloc_ext();
        append_marker(u, e);
        return e;
    }

    void set_opposite(ext_id a, ext_id b) {
        at(a).opposite = b;
        at(b).opposite = a;
    }

    void set_root_marker(node_id u, ext_id m) {
        tree_node& nd = node_at(u);
        if (nd.root_marker != k_none && at(nd.root_marker).alive && at(nd.root_marker).node == u)
            at(nd.root_marker).node = k_none;
        nd.root_marker = m;
        at(m).node = u;
    }

    void append_marker(node_id u, ext_id m) {
        tree_node& nd = node_at(u);
        at(m).prev = nd.last_marker;
        at(m).next = k_none;
        if (nd.last_marker != k_none) at(nd.last_marker).next = m;
        nd.last_marker = m;
        if (nd.first_marker == k_none) nd.first_marker = m;
        ++nd.marker_count;
    }

    void detach_marker(node_id u, ext_id m) {
        tree_node& nd = node_at(u);
        if (at(m).prev != k_none) at(at(m).prev).next = at(m).next;
        if (at(m).next != k_none) at(at(m).next).prev = at(m).prev;
        if (nd.first_marker == m) nd.first_marker = at(m).next;
        if (nd.last_marker == m) nd.last_marker = at(m).prev;
        at(m).prev = at(m).next = k_none;
        --nd.marker_count;
    }

    // Move every marker still listed in src into dst, O(1).
    void splice_markers(node_id dst, node_id src) {
        tree_node& d = node_at(dst);
        tree_node& s = node_at(src);
        if (s.first_marker == k_none) return;
        if (d.last_marker != k_none) {
            at(d.last_marker).next = s.first_marker;
            at(s.first_marker).prev = d.last_marker;
        } else {
            d.first_marker = s.first_marker;
        }
        d.last_marker = s.last_marker;
        d.marker_count += s.marker_count;
        s.first_marker = s.last_marker = k_none;
        s.marker_count = 0;
    }

    // Label degree of marker m inside node u.
    int32_t label_degree(node_id u, ext_id m) const {
        const tree_node& nd = node_at(u);
        switch (nd.kind) {
        case node_kind::clique: return nd.marker_count - 1;
        case node_kind::star: return m == nd.centre ? nd.marker_count - 1 : 1;
        default: return at(m).degree;
        }
    }

    template <typename Fn>
    void for_each_label_neighbor(node_id u, ext_id m, Fn&& fn) const {
        const tree_node& nd = node_at(u);
        if (nd.kind == node_kind::prime) {
            for (ext_id t : at(m).adj)
                if (at(t).alive) fn(t);
        } else if (nd.kind == node_kind::clique) {
            for (ext_id t = nd.first_marker; t != k_none; t = at(t).next)
                if (t != m) fn(t);
        } else if (m == nd.centre) {
            for (ext_id t = nd.first_marker; t != k_none; t = at(t).next)
                if (t != m) fn(t);
        } else {
            fn(nd.centre);
        }
    }

    // ---- parent/children wiring -------------------------------------------

    void set_parent_direct(tref child, tref parent) {
        if (child.is_leaf()) {
            at(child.leaf()).parent = parent;
            at(child.leaf()).parent_direct = true;
        } else {
            node_at(child.node()).parent = parent;
            node_at(child.node()).parent_direct = true;
        }
    }

    // Put child into the children-set of prime node u (fresh slot; any previous
    // slot simply goes stale) and stop using its direct pointer.
    void register_child_in_set(node_id u, tref child) {
        tree_node& nd = node_at(u);
        st_check(nd.kind == node_kind::prime, "register_child_in_set: owner not prime");
        int32_t slot = sets_.make_set_auto(u);
        if (nd.children_slot == k_none)
            nd.children_slot = slot;
        else
            nd.children_slot = sets_.unite(nd.children_slot, slot, u);
        if (child.is_leaf()) {
            at(child.leaf()).uf_slot = slot;
            at(child.leaf()).parent_direct = false;
            at(child.leaf()).parent = tref::none();
        } else {
            node_at(child.node()).uf_slot = slot;
            node_at(child.node()).parent_direct = false;
            node_at(child.node()).parent = tref::none();
        }
    }

    void attach_child(tref child, tref parent) {
        if (parent.is_node() && node_at(parent.node()).kind == node_kind::prime)
            register_child_in_set(parent.node(), child);
        else
            set_parent_direct(child, parent);
    }

    // Give every label-edge of a degenerate node an explicit adjacency list and
    // flip the node to (non-degenerate) prime bookkeeping. Returns the number
    // of label-edges written, which counts as created label-edges.
    long long materialize_label(node_id u) {
        tree_node& nd = node_at(u);
        st_check(nd.kind != node_kind::prime, "materialize_label: already prime");
        long long edges = 0;
        if (nd.kind == node_kind::clique) {
            std::vector<ext_id> ms = markers_of(u);
            for (ext_id m : ms) {
                at(m).adj.clear();
                at(m).adj_dead = 0;
                for (ext_id t : ms)
                    if (t != m) at(m).adj.push_back(t);
                at(m).degree = static_cast<int32_t>(at(m).adj.size());
            }
            edges = static_cast<long long>(ms.size()) * (static_cast<long long>(ms.size()) - 1) / 2;
        } else {
            ext_id c = nd.centre;
            at(c).adj.clear();
            at(c).adj_dead = 0;
            for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
                if (m == c) continue;
                at(c).adj.push_back(m);
                at(m).adj.assign(1, c);
                at(m).adj_dead = 0;
                at(m).degree = 1;
                ++edges;
            }
            at(c).degree = static_cast<int32_t>(at(c).adj.size());
        }
        nd.kind = node_kind::prime;
        nd.centre = k_none;
        nd.last_in_sigma = k_none;
        nd.universal = k_none;
        return edges;
    }

    // Degenerate node turning prime: move its children out of direct pointers
    // into a fresh children-set.
    void adopt_children_into_set(node_id u) {
        tree_node& nd = node_at(u);
        st_check(nd.kind == node_kind::prime, "adopt_children_into_set: not prime");
        st_check(nd.children_slot == k_none, "adopt_children_into_set: set already exists");
        for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
            if (m == nd.root_marker) continue;
            register_child_in_set(u, across(m));
        }
    }

    void add_label_edge(ext_id a, ext_id b) {
        at(a).adj.push_back(b);
        at(b).adj.push_back(a);
        ++at(a).degree;
        ++at(b).degree;
    }

    void kill_marker(ext_id m) {
        ext& e = at(m);
        for (ext_id t : e.adj) {
            if (!at(t).alive) continue;
            --at(t).degree;
            ++at(t).adj_dead;
            if (at(t).adj_dead > at(t).degree) compact_adj(t);
        }
        e.adj.clear();
        e.adj_dead = 0;
        e.degree = 0;
        e.alive = false;
        e.opposite = k_none;
        e.node = k_none;
    }

    // ---- node-split --------------------------------------------------------
    //
    // Splits degenerate node v along (A, V(v) \ A). v is reused for the B side
    // plus a fresh marker q; the new node holds A plus a fresh marker r. Only
    // A-side structure is touched. Returns (new A-side node, reused v).
    std::pair<node_id, node_id> node_split(node_id v, const std::vector<ext_id>& a_side) {
        tree_node& nd = node_at(v);
        st_check(nd.alive, "node_split: dead node");
        if (nd.kind == node_kind::prime)
            throw std::invalid_argument("node_split: node is prime");
        int32_t asz = static_cast<int32_t>(a_side.size());
        if (asz < 2 || asz > nd.marker_count - 2)
            throw std::invalid_argument("node_split: side sizes must both be at least 2");

        ++node_splits_;
        const node_kind vkind = nd.kind;
        const ext_id old_centre = nd.centre;
        bool centre_in_a = false;
        bool root_in_a = false;
        for (ext_id m : a_side) {
            st_check(at(m).alive && !at(m).is_leaf(), "node_split: bad A-side marker");
            if (m == old_centre) centre_in_a = true;
            if (m == nd.root_marker) root_in_a = true;
        }

        node_id ua = new_node(vkind);
        for (ext_id m : a_side) {
            detach_marker(v, m);
            append_marker(ua, m);
        }
        ext_id q = new_marker(v);  // stays in v, faces the A side
        ext_id r = new_marker(ua); // in the new node, faces v
        set_opposite(q, r);

        // label shapes of the two sides
        if (vkind == node_kind::clique) {
            node_at(ua).kind = node_kind::clique;
            node_at(v).kind = node_kind::clique;
        } else {
            node_at(ua).kind = node_kind::star;
            node_at(v).kind = node_kind::star;
            if (centre_in_a) {
                node_at(ua).centre = old_centre;
                node_at(v).centre = q;
            } else {
                node_at(ua).centre = r;
                node_at(v).centre = old_centre;
            }
        }

        if (root_in_a) {
            // A side keeps the old root marker and takes v's place under the parent.
            ext_id old_root = node_at(v).root_marker; // still recorded on v
            set_root_marker(ua, old_root);
            node_at(ua).parent = node_at(v).parent;
            node_at(ua).parent_direct = node_at(v).parent_direct;
            if (!node_at(ua).parent_direct && node_at(v).uf_slot != k_none) {
                int32_t owner = sets_.owner_of(node_at(v).uf_slot);
                int32_t slot = sets_.make_set_auto(k_none);
                sets_.unite(slot, node_at(v).uf_slot, owner);
                node_at(ua).uf_slot = slot;
            }
            set_root_marker(v, q);
            node_at(v).parent = tref::node(ua);
            node_at(v).parent_direct = true;
            for (ext_id m : a_side) {
                if (m == old_root) continue;
                set_parent_direct(across(m), tref::node(ua));
            }
        } else {
            set_root_marker(ua, r);
            node_at(ua).parent = tref::node(v);
            node_at(ua).parent_direct = true;
            for (ext_id m : a_side) set_parent_direct(across(m), tref::node(ua));
        }
        return {ua, v};
    }

    // ---- node-join ---------------------------------------------------------
    //
    // Joins child u_prime into its parent u (u is reused). The result is
    // tracked as prime, standing for non-degenerate. When u_prime is a star
    // whose root marker has degree one, the cheaper path moves only the
    // centre's other neighbours and reuses u's edge extremity as the centre's
    // stand-in.
    join_result node_join(node_id u, node_id u_prime) {
        st_check(node_at(u).alive && node_at(u_prime).alive, "node_join: dead node");
        {
            tref p = resolve_parent(tref::node(u_prime));
            if (!(p.is_node() && p.node() == u))
                throw std::invalid_argument("node_join: u_prime is not a child of u");
        }
        ++node_joins_;
        join_result res;
        ext_id qp = node_at(u_prime).root_marker;
        ext_id q = at(qp).opposite;

        if (node_at(u).kind != node_kind::prime) {
            res.new_label_edges += materialize_label(u);
            adopt_children_into_set(u);
        }

        const bool special =
            node_at(u_prime).kind == node_kind::star && qp != node_at(u_prime).centre;

        if (special) {
            res.special = true;
            res.reused_marker = q;
            ext_id cp = node_at(u_prime).centre;
            res.died_centre = cp;
            // move the centre's other neighbours (the degree-1 markers except qp)
            std::vector<ext_id> moved;
            for (ext_id m = node_at(u_prime).first_marker; m != k_none; m = at(m).next)
                if (m != qp && m != cp) moved.push_back(m);
            for (ext_id t : moved) {
                detach_marker(u_prime, t);
                append_marker(u, t);
                at(t).adj.assign(1, q);
                at(t).adj_dead = 0;
                at(t).degree = 1;
                at(q).adj.push_back(t);
                ++at(q).degree;
                ++res.new_label_edges;
                register_child_in_set(u, across(t));
            }
            // q takes over the centre's tree-edge; the centre and old root die.
            ext_id below_centre = at(cp).opposite;
            register_child_in_set(u, at(below_centre).is_leaf()
                                         ? tref::leaf(below_centre)
                                         : tref::node(at(below_centre).node));
            set_opposite(q, below_centre);
            detach_marker(u_prime, cp);
            detach_marker(u_prime, qp);
            kill_marker(cp);
            kill_marker(qp);
        } else {
            if (node_at(u_prime).kind != node_kind::prime)
                res.new_label_edges += materialize_label(u_prime);
            // children of u_prime migrate: one set union if it had a children-set,
            // otherwise per-child registration
            if (node_at(u_prime).children_slot != k_none) {
                node_at(u).children_slot =
                    sets_.unite(node_at(u).children_slot, node_at(u_prime).children_slot, u);
            } else {
                for (ext_id m = node_at(u_prime).first_marker; m != k_none; m = at(m).next) {
                    if (m == qp) continue;
                    register_child_in_set(u, across(m));
                }
            }
            // complete join between the two neighbourhoods
            std::vector<ext_id> nq, nqp;
            for (ext_id t : at(q).adj)
                if (at(t).alive) nq.push_back(t);
            for (ext_id t : at(qp).adj)
                if (at(t).alive) nqp.push_back(t);
            for (ext_id a : nq)
                for (ext_id b : nqp) {
                    add_label_edge(a, b);
                    ++res.new_label_edges;
                }
            detach_marker(u_prime, qp);
            detach_marker(u, q);
            splice_markers(u, u_prime);
            kill_marker(q);
            kill_marker(qp);
        }
        node_at(u_prime).alive = false;
        node_at(u_prime).first_marker = k_none;
        node_at(u_prime).marker_count = 0;
        node_at(u_prime).root_marker = k_none;
        return res;
    }

    // ---- oracle-grade views -------------------------------------------------

    // Owning node for every live marker, by full scan. Leaves map to k_none.
    std::vector<node_id> build_marker_owner_map() const {
        std::vector<node_id> owner(exts_.size(), k_none);
        for (node_id u : live_nodes())
            for (ext_id m = node_at(u).first_marker; m != k_none; m = at(m).next) {
                st_check(owner[static_cast<std::size_t>(m)] == k_none, "marker listed twice");
                owner[static_cast<std::size_t>(m)] = u;
            }
        return owner;
    }

    // Leaves accessible from extremity q through q's own tree-edge (the set A(q)).
    std::vector<int> accessible_set(ext_id q, const std::vector<node_id>& owner) const {
        std::vector<int> out;
        ext_id o = at(q).opposite;
        if (o == k_none) return out;
        if (at(o).is_leaf()) {
            out.push_back(at(o).vertex);
            return out;
        }
        std::set<ext_id> seen; // markers reached in "arrived via tree-edge" state
        std::vector<ext_id> stack{o};
        seen.insert(o);
        while (!stack.empty()) {
            ext_id m = stack.back();
            stack.pop_back();
            node_id w = owner[static_cast<std::size_t>(m)];
            for_each_label_neighbor(w, m, [&](ext_id t) {
                ext_id to = at(t).opposite;
                if (at(to).is_leaf()) {
                    out.push_back(at(to).vertex);
                } else if (seen.insert(to).second) {
                    stack.push_back(to);
                }
            });
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Leaves on the far side of q's tree-edge (the set L(q)).
    std::vector<int> leaves_beyond(ext_id q, const std::vector<node_id>& owner) const {
        std::vector<int> out;
        ext_id o = at(q).opposite;
        if (o == k_none) return out;
        if (at(o).is_leaf()) {
            out.push_back(at(o).vertex);
            return out;
        }
        // walk tree entities away from q
        std::vector<std::pair<node_id, ext_id>> stack{{owner[static_cast<std::size_t>(o)], o}};
        while (!stack.empty()) {
            auto [w, in_marker] = stack.back();
            stack.pop_back();
            for (ext_id m = node_at(w).first_marker; m != k_none; m = at(m).next) {
                if (m == in_marker) continue;
                ext_id to = at(m).opposite;
                if (at(to).is_leaf())
                    out.push_back(at(to).vertex);
                else
                    stack.push_back({owner[static_cast<std::size_t>(to)], to});
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Accessibility graph: one alternating search per leaf.
    graph accessibility_graph() const {
        int n = 0;
        for (ext_id l : leaf_of_vertex_)
            if (l != k_none) ++n;
        std::vector<std::pair<int, int>> edges;
        if (n <= 1) return graph::from_edges(n, edges);
        auto owner = build_marker_owner_map();
        for (int v = 0; v < static_cast<int>(leaf_of_vertex_.size()); ++v) {
            ext_id l = leaf_of_vertex_[static_cast<std::size_t>(v)];
            if (l == k_none) continue;
            for (int w : accessible_set(l, owner))
                if (v < w) edges.emplace_back(v, w);
        }
        return graph::from_edges(n, edges);
    }

    // Label kind by shape rather than by the stored tag: nodes marked prime
    // (standing for non-degenerate) may carry a complete or star-shaped label
    // after manual node-joins.
    std::pair<node_kind, ext_id> effective_kind(node_id u) const {
        const tree_node& nd = node_at(u);
        if (nd.kind != node_kind::prime) return {nd.kind, nd.centre};
        const int32_t cnt = nd.marker_count;
        int full = 0, ones = 0;
        ext_id hub = k_none;
        for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
            if (at(m).degree == cnt - 1) {
                ++full;
                hub = m;
            } else if (at(m).degree == 1) {
                ++ones;
            }
        }
        if (full == cnt) return {node_kind::clique, k_none};
        if (full == 1 && ones == cnt - 1) return {node_kind::star, hub};
        return {node_kind::prime, k_none};
    }

    // The label of node u as a plain graph plus the marker ids in index order.
    std::pair<graph, std::vector<ext_id>> label_graph(node_id u) const {
        std::vector<ext_id> ms = markers_of(u);
        std::map<ext_id, int> idx;
        for (std::size_t i = 0; i < ms.size(); ++i) idx[ms[i]] = static_cast<int>(i);
        std::vector<std::pair<int, int>> edges;
        for (ext_id m : ms)
            for_each_label_neighbor(u, m, [&](ext_id t) {
                if (m < t) edges.emplace_back(idx[m], idx[t]);
            });
        return {graph::from_edges(static_cast<int>(ms.size()), edges), ms};
    }

    // ---- canonical form ------------------------------------------------------
    //
    // Deterministic serialization independent of arena handles and of the
    // stored root: re-rooted at the leaf of vertex 0, children ordered by the
    // minimum leaf id in their subtree, markers named by the minimum leaf id
    // beyond their tree-edge.
    std::string canonical_form() const {
        int n = leaf_count();
        if (n == 0) return "G0;";
        ext_id l0 = leaf_of_vertex(0);
        std::string body;
        if (at(l0).opposite == k_none) {
            body = "L0";
        } else {
            auto owner = build_marker_owner_map();
            body = canon_rec(at(l0).opposite, owner).first;
        }
        return "G" + std::to_string(n) + ";" + body;
    }

    // ---- split enumeration ----------------------------------------------------
    //
    // All splits represented by the tree: internal tree-edge bipartitions plus
    // every non-trivial label bipartition of each degenerate node. Capped at 64
    // leaves (test-scale; label subsets are enumerated explicitly).
    std::set<bipartition> splits_from_tree() const {
        int n = leaf_count();
        st_check(n <= 64, "splits_from_tree: capped at 64 leaves");
        std::set<uint64_t> sides; // canonical side: the one containing vertex 0
        auto owner = build_marker_owner_map();
        const uint64_t full = n == 64 ? ~uint64_t(0) : ((uint64_t(1) << n) - 1);

        auto mask_beyond = [&](ext_id q) {
            uint64_t m = 0;
            for (int v : leaves_beyond(q, owner)) m |= uint64_t(1) << v;
            return m;
        };
        auto add_side = [&](uint64_t a) {
            uint64_t b = full & ~a;
            int ca = std::popcount(a), cb = std::popcount(b);
            if (ca < 2 || cb < 2) return;
            sides.insert((a & 1) ? a : b);
        };

        for (node_id u : live_nodes()) {
            std::vector<ext_id> ms = markers_of(u);
            std::vector<uint64_t> beyond;
            for (ext_id m : ms) beyond.push_back(mask_beyond(m));
            // internal tree-edges, from the child side only (root marker) to avoid dups
            for (std::size_t i = 0; i < ms.size(); ++i) {
                ext_id o = at(ms[i]).opposite;
                if (!at(o).is_leaf() && ms[i] == node_at(u).root_marker) add_side(beyond[i]);
            }
            if (node_at(u).kind == node_kind::prime) continue;
            int k = static_cast<int>(ms.size());
            st_check(k <= 30, "splits_from_tree: degenerate label too large to enumerate");
            for (uint32_t sub = 1; sub + 1 < (uint32_t(1) << k); ++sub) {
                int c = std::popcount(sub);
                if (c < 2 || c > k - 2) continue;
                uint64_t a = 0;
                for (int i = 0; i < k; ++i)
                    if (sub & (uint32_t(1) << i)) a |= beyond[static_cast<std::size_t>(i)];
                add_side(a);
            }
        }

        std::set<bipartition> out;
        for (uint64_t a : sides) {
            bipartition bp;
            for (int v = 0; v < n; ++v)
                ((a >> v) & 1 ? bp.side_a : bp.side_b).push_back(v);
            out.insert(std::move(bp));
        }
        return out;
    }

    // ---- validation -----------------------------------------------------------

    reduced_report check_reduced() const {
        reduced_report rep;
        int n = leaf_count();
        std::vector<node_id> owner;
        try {
            owner = build_marker_owner_map();
        } catch (const std::exception& ex) {
            rep.fail(ex.what());
            return rep;
        }

        long long total_markers = 0;
        int entities = 0, tree_edges = 0;
        for (int v = 0; v < static_cast<int>(leaf_of_vertex_.size()); ++v) {
            ext_id l = leaf_of_vertex_[static_cast<std::size_t>(v)];
            if (l == k_none) {
                rep.fail("vertex without leaf");
                continue;
            }
            ++entities;
            if (!at(l).alive || at(l).vertex != v) rep.fail("leaf record corrupt");
            if (n >= 2 && at(l).opposite == k_none) rep.fail("leaf with no tree-edge");
        }

        for (node_id u : live_nodes()) {
            ++entities;
            const tree_node& nd = node_at(u);
            total_markers += nd.marker_count;
            if (nd.marker_count < 3) rep.fail("live node with fewer than 3 markers");
            int walked = 0;
            bool saw_root = false, saw_centre = false;
            for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
                ++walked;
                if (!at(m).alive) rep.fail("dead marker in list");
                if (at(m).is_leaf()) rep.fail("leaf inside marker list");
                ext_id o = at(m).opposite;
                if (o == k_none || !at(o).alive || at(o).opposite != m) {
                    rep.fail("opposite pointers not involutive");
                    continue;
                }
                if (!at(o).is_leaf()) {
                    node_id w = owner[static_cast<std::size_t>(o)];
                    if (w == k_none || !node_at(w).alive) rep.fail("edge into dead structure");
                }
                if (m == nd.root_marker) saw_root = true;
                if (m == nd.centre) saw_centre = true;
            }
            if (walked != nd.marker_count) rep.fail("marker_count mismatch");
            if (nd.root_marker == k_none || !saw_root) rep.fail("missing root marker");
            if (nd.root_marker != k_none && at(nd.root_marker).node != u)
                rep.fail("root marker node pointer wrong");
            if (nd.kind == node_kind::star && (nd.centre == k_none || !saw_centre))
                rep.fail("star without centre");
            if (nd.kind == node_kind::prime) {
                if (nd.last_in_sigma != k_none &&
                    (!at(nd.last_in_sigma).alive ||
                     owner[static_cast<std::size_t>(nd.last_in_sigma)] != u))
                    rep.fail("last_in_sigma points outside node");
                for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
                    int live_deg = 0;
                    for (ext_id t : at(m).adj) {
                        if (!at(t).alive) continue;
                        ++live_deg;
                        if (owner[static_cast<std::size_t>(t)] != u)
                            rep.fail("label edge crosses nodes");
                        bool back = false;
                        for (ext_id z : at(t).adj)
                            if (z == m) back = true;
                        if (!back) rep.fail("label adjacency not symmetric");
                    }
                    if (live_deg != at(m).degree) rep.fail("label degree counter wrong");
                    if (live_deg == 0) rep.fail("disconnected label vertex");
                }
                if (nd.universal != k_none &&
                    at(nd.universal).degree != nd.marker_count - 1)
                    rep.fail("stored universal marker is not universal");
            }
            tree_edges += nd.marker_count;
        }
        // every tree-edge counted once per marker extremity; leaf edges once
        int counted_edges = 0;
        for (node_id u : live_nodes())
            for (ext_id m = node_at(u).first_marker; m != k_none; m = at(m).next)
                if (at(m).opposite != k_none &&
                    (at(at(m).opposite).is_leaf() ? true : m < at(m).opposite))
                    ++counted_edges;
        if (n == 2) counted_edges = 1;
        if (n >= 1 && entities > 0 && counted_edges != entities - 1)
            rep.fail("tree edge count != entities - 1 (not a tree)");

        if (n >= 1 && total_markers > 8LL * n) rep.fail("total markers exceed 8n");

        // reducedness proper, judged on label shape
        for (node_id u : live_nodes()) {
            const tree_node& nd = node_at(u);
            auto [ku, cu] = effective_kind(u);
            for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
                ext_id o = at(m).opposite;
                if (o == k_none || at(o).is_leaf()) continue;
                if (m > o) continue;
                node_id w = owner[static_cast<std::size_t>(o)];
                if (w == k_none) continue;
                auto [kw, cw] = effective_kind(w);
                if (ku == node_kind::clique && kw == node_kind::clique)
                    rep.fail("clique-join possible (adjacent cliques)");
                if (ku == node_kind::star && kw == node_kind::star) {
                    int centres = (m == cu ? 1 : 0) + (o == cw ? 1 : 0);
                    if (centres == 1) rep.fail("star-join possible (one centre extremity)");
                }
            }
            if (ku == node_kind::prime) {
                if (nd.marker_count <= 12) {
                    auto [lg, ms] = label_graph(u);
                    if (!is_connected(lg)) rep.fail("prime label disconnected");
                    if (!oracle::enumerate_splits_bruteforce(lg).empty())
                        rep.fail("prime label has a split");
                } else {
                    rep.notes.push_back("node " + std::to_string(u) +
                                        " assumed prime (label larger than 12)");
                }
            }
        }
        return rep;
    }

private:
    friend class tree_io_access;

    ext_id alloc_ext() {
        exts_.emplace_back();
        return static_cast<ext_id>(exts_.size()) - 1;
    }

    void compact_adj(ext_id m) {
        auto& a = at(m).adj;
        std::size_t w = 0;
        for (ext_id t : a)
            if (at(t).alive) a[w++] = t;
        a.resize(w);
        at(m).adj_dead = 0;
    }

    node_id top_node() const {
        if (root_leaf_ == k_none || at(root_leaf_).opposite == k_none) return k_none;
        ext_id o = at(root_leaf_).opposite;
        return at(o).is_leaf() ? k_none : at(o).node;
    }

    // returns (text, min leaf id in the subtree entered through `entering`)
    std::pair<std::string, int> canon_rec(ext_id entering, const std::vector<node_id>& owner) const {
        if (at(entering).is_leaf())
            return {"L" + std::to_string(at(entering).vertex), at(entering).vertex};
        node_id u = owner[static_cast<std::size_t>(entering)];
        const tree_node& nd = node_at(u);
        std::map<ext_id, int> name;
        name[entering] = 0; // the way back holds leaf 0
        std::vector<std::pair<int, std::string>> children;
        int my_min = std::numeric_limits<int>::max();
        for (ext_id m = nd.first_marker; m != k_none; m = at(m).next) {
            if (m == entering) continue;
            auto [txt, mn] = canon_rec(at(m).opposite, owner);
            name[m] = mn;
            children.emplace_back(mn, std::move(txt));
            my_min = std::min(my_min, mn);
        }
        std::sort(children.begin(), children.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::string label;
        auto [ekind, ecentre] = effective_kind(u);
        if (ekind == node_kind::clique) {
            label = "K";
        } else if (ekind == node_kind::star) {
            label = "S" + std::to_string(name.at(ecentre));
        } else {
            std::set<std::pair<int, int>> es;
            for (ext_id m = nd.first_marker; m != k_none; m = at(m).next)
                for (ext_id t : at(m).adj)
                    if (at(t).alive) {
                        int a = name.at(m), b = name.at(t);
                        es.insert({std::min(a, b), std::max(a, b)});
                    }
            label = "P";
            for (auto [a, b] : es)
                label += " " + std::to_string(a) + "-" + std::to_string(b);
        }
        std::string out = "(" + label;
        for (auto& [nm, txt] : children) out += " " + std::to_string(nm) + ":" + txt;
        out += ")";
        return {out, my_min};
    }

    std::vector<ext> exts_;
    std::vector<tree_node> nodes_;
    std::vector<ext_id> leaf_of_vertex_;
    ext_id root_leaf_ = k_none;
    disjoint_sets sets_;
    uint32_t generation_ = 0;
    long long node_splits_ = 0;
    long long node_joins_ = 0;
};

} // namespace splittree

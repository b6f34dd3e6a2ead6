#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "splittree/graph.hpp"
#include "splittree/lbfs.hpp"
#include "splittree/split_tree.hpp"

namespace splittree {

// The seven outcomes of marking the split-tree with respect to N(x).
enum class theorem_case : uint8_t {
    clique_all_perfect = 1, // case 1
    star_centre_perfect,    // case 2
    prime_hybrid,           // case 3
    degenerate_hybrid,      // case 4
    pp_edge,                // case 5
    pe_edge,                // case 6
    fully_mixed             // case 7
};

struct case_result {
    theorem_case kind{};
    node_id node = k_none;      // cases 1-4
    ext_id edge_a = k_none;     // cases 5/6: perfect extremity
    ext_id edge_b = k_none;     // cases 5/6: the other (perfect for PP, empty for PE)
    tref ent_a = tref::none();  // entity holding edge_a
    tref ent_b = tref::none();
    std::vector<node_id> mixed; // case 7: fully-mixed subtree, root first
};

struct insertion_counters {
    long long finds = 0, unions = 0, make_sets = 0;
    long long new_label_edges = 0;
    int new_degenerate_markers = 0; // non-root markers surviving in degenerate nodes,
                                    // not counting the inserted vertex's opposite
    int spanning_size = 0;
    int s_size = 0;
    theorem_case fired{};
};

struct build_stats {
    int n = 0;
    long long m = 0;
    long long finds = 0, unions = 0, make_sets = 0;
    long long new_label_edges = 0, new_degenerate_markers = 0;
    long long spanning_total = 0;
    long long node_joins = 0, node_splits = 0;
    long long max_spanning = 0;
    int max_spanning_s = 0;
    int max_new_degenerate = 0;
    bool spanning_bound_ok = true;   // |T(N(x))| <= 2|N(x)| at every insertion
    bool degenerate_bound_ok = true; // <= 2 new non-root degenerate markers per insertion

    double ops_ratio() const {
        return n + m == 0 ? 0.0
                          : static_cast<double>(finds + unions + make_sets + new_label_edges) /
                                static_cast<double>(n + m);
    }
};

// Incremental split-tree construction. Each inserted vertex must be last in an
// LBFS ordering of the prefix graph plus itself; build_split_tree produces
// such an order. The marking pipeline touches only the spanning subtree of the
// new vertex's neighbourhood.
class builder {
public:
    builder() = default;

    split_tree& tree() { return t_; }
    const split_tree& tree() const { return t_; }

    // Testing hook: skip the cleaning step of case 7 (breaks reducedness).
    void set_skip_cleaning(bool b) { skip_cleaning_ = b; }

    insertion_counters insert_vertex(int x, const std::vector<int>& nbrs) {
        const auto ds0 = t_.sets().counts();
        const long long splits0 = t_.node_splits();
        const long long joins0 = t_.node_joins();
        gen_ = t_.next_generation();
        scr_used_ = 0;
        ctx_ = {};
        ctx_.s_size = static_cast<int>(nbrs.size());

        const int leaves_before = t_.leaf_count();
        if (leaves_before == 0) {
            if (!nbrs.empty())
                throw std::invalid_argument("insert_vertex: first vertex has neighbours");
            t_.new_leaf(x);
        } else if (nbrs.empty()) {
            throw std::invalid_argument("insert_vertex: disconnected insertion");
        } else if (leaves_before == 1) {
            ext_id l0 = t_.leaf_of_vertex(nbrs.at(0));
            ext_id lx = t_.new_leaf(x);
            t_.set_opposite(l0, lx);
            t_.set_parent_direct(tref::leaf(lx), tref::leaf(l0));
        } else if (leaves_before == 2) {
            insert_bootstrap_two(x, nbrs);
        } else {
            insert_general(x, nbrs);
        }

        const auto ds1 = t_.sets().counts();
        ctx_.finds = ds1.finds - ds0.finds;
        ctx_.unions = ds1.unions - ds0.unions;
        ctx_.make_sets = ds1.make_sets - ds0.make_sets;

        stats_.n += 1;
        stats_.m += ctx_.s_size;
        stats_.finds += ctx_.finds;
        stats_.unions += ctx_.unions;
        stats_.make_sets += ctx_.make_sets;
        stats_.new_label_edges += ctx_.new_label_edges;
        stats_.new_degenerate_markers += ctx_.new_degenerate_markers;
        stats_.spanning_total += ctx_.spanning_size;
        stats_.node_splits += t_.node_splits() - splits0;
        stats_.node_joins += t_.node_joins() - joins0;
        if (ctx_.s_size > 0 && ctx_.spanning_size > 2 * ctx_.s_size)
            stats_.spanning_bound_ok = false;
        if (ctx_.new_degenerate_markers > 2) stats_.degenerate_bound_ok = false;
        if (ctx_.spanning_size > stats_.max_spanning) {
            stats_.max_spanning = ctx_.spanning_size;
            stats_.max_spanning_s = ctx_.s_size;
        }
        stats_.max_new_degenerate =
            std::max(stats_.max_new_degenerate, ctx_.new_degenerate_markers);
        return ctx_;
    }

    const build_stats& stats() const { return stats_; }
    const insertion_counters& last_insertion() const { return ctx_; }

    // ---- marking pipeline (exposed for tests) -------------------------------

    // Direct probes start their own marking generation.
    std::vector<tref> span_subtree(const std::vector<int>& s_vertices) {
        fresh_generation();
        return span_subtree_impl(s_vertices);
    }

    case_result mark_and_identify(const std::vector<int>& s_vertices) {
        fresh_generation();
        return mark_and_identify_impl(s_vertices);
    }

    const insertion_counters& probe_counters() const { return ctx_; }

private:
    void fresh_generation() {
        gen_ = t_.next_generation();
        scr_used_ = 0;
        ctx_ = {};
    }

    // Smallest connected subtree spanning the leaves of S: upward waves from
    // the S-leaves, then the root-path trim. Returns T(S) in discovery order;
    // parents live in the entities' span state.
    std::vector<tref> span_subtree_impl(const std::vector<int>& s_vertices) {
        if (s_vertices.size() < 2)
            throw std::invalid_argument("span_subtree: need at least two leaves");
        span_order_.clear();
        std::vector<tref> cur, next;
        for (int v : s_vertices) {
            tref l = tref::leaf(t_.leaf_of_vertex(v));
            mark_active(l);
            cur.push_back(l);
        }
        bool root_visited = false;
        while ((!root_visited && cur.size() >= 2) || (root_visited && !cur.empty())) {
            next.clear();
            for (tref u : cur) {
                visit(u);
                if (u.is_leaf() && u.leaf() == t_.root_leaf()) {
                    root_visited = true;
                    continue;
                }
                tref p = t_.resolve_parent(u);
                st_check(!p.is_none(), "span_subtree: non-root entity without parent");
                mk(u).span_parent = p;
                if (mk(p).visit_gen != gen_ && mk(p).active_gen != gen_) {
                    mark_active(p);
                    next.push_back(p);
                }
            }
            std::swap(cur, next);
        }

        for (tref u : span_order_) {
            tref p = mk(u).span_parent;
            if (!p.is_none() && mk(p).visit_gen == gen_) {
                mk(p).vis_children += 1;
                mk(p).one_child = u;
            }
        }
        tref top = tref::none();
        for (tref u : span_order_) {
            tref p = mk(u).span_parent;
            if (p.is_none() || mk(p).visit_gen != gen_) {
                st_check(top.is_none(), "span_subtree: two roots");
                top = u;
            }
        }
        st_check(!top.is_none(), "span_subtree: no root");
        const bool top_in_s = top.is_leaf() && vertex_in(s_vertices, t_.at(top.leaf()).vertex);
        if (!top_in_s && mk(top).vis_children == 1) {
            while (mk(top).vis_children == 1) {
                tref child = mk(top).one_child;
                mk(top).removed_gen = gen_;
                top = child;
            }
            st_check(top.is_node(), "span_subtree: trim descended into a leaf");
        }
        top_ = top;

        std::vector<tref> result;
        for (tref u : span_order_)
            if (mk(u).removed_gen != gen_) result.push_back(u);
        ctx_.spanning_size = static_cast<int>(result.size());
        return result;
    }

    // State marking and case identification for S = N(x), |S| >= 2.
    case_result mark_and_identify_impl(const std::vector<int>& s_vertices) {
        std::vector<tref> span = span_subtree_impl(s_vertices);

        int remaining_nodes = 0;
        for (tref u : span)
            if (u.is_node()) {
                scratch_of(u.node());
                ++remaining_nodes;
            }
        // NE lists, pending counts and node-children lists from the T(S) edges
        for (tref u : span) {
            if (u == top_) continue;
            tref p = mk(u).span_parent;
            ext_id ue = t_.up_ext(u);
            if (u.is_node()) scratch_of(u.node()).ne.push_back(ue);
            if (p.is_node()) {
                scratch_of(p.node()).ne.push_back(t_.at(ue).opposite);
                if (u.is_node()) {
                    scratch_of(p.node()).pending_children += 1;
                    scratch_of(p.node()).node_kids.push_back(u.node());
                }
            }
        }
        // perfect stamps opposite the S-leaves
        for (int v : s_vertices) {
            ext_id l = t_.leaf_of_vertex(v);
            ext_id q = t_.at(l).opposite;
            node_id owner = k_none;
            if (l == t_.root_leaf()) {
                owner = t_.at(q).node; // q is the top node's root marker
            } else {
                tref p = mk(tref::leaf(l)).span_parent;
                st_check(p.is_node(), "mark: S-leaf without node parent");
                owner = p.node();
            }
            stamp_perfect(q, owner);
        }

        // bottom-up: discard pendant perfect subtrees
        std::vector<node_id> queue;
        for (tref u : span)
            if (u.is_node() && eligible_bottom_up(u) && scratch_of(u.node()).pending_children == 0)
                queue.push_back(u.node());
        while (!queue.empty()) {
            node_id u = queue.back();
            queue.pop_back();
            if (t_.node_at(u).mk.removed_gen == gen_) continue;
            ext_id q_root = t_.node_at(u).root_marker;
            if (!twin_test_opposite_perfect(u, q_root)) continue; // u stays mixed-side
            ext_id r = t_.at(q_root).opposite;
            tref p = mk(tref::node(u)).span_parent;
            st_check(p.is_node(), "bottom-up: parent not a node");
            stamp_perfect(r, p.node());
            t_.node_at(u).mk.removed_gen = gen_;
            --remaining_nodes;
            node_scratch& ps = scratch_of(p.node());
            ps.pending_children -= 1;
            if (ps.pending_children == 0 && eligible_bottom_up(p)) queue.push_back(p.node());
        }

        // top-down: discard the perfect prefix of the root path
        tref cur = top_;
        if (cur.is_leaf()) {
            // the root leaf belongs to S; its opposite is already stamped
            mk(cur).removed_gen = gen_;
            tref child = mk(cur).one_child;
            st_check(child.is_node(), "top-down: root leaf without node child");
            cur = child;
        }
        bool fm_found = false;
        while (remaining_nodes > 1 && !fm_found) {
            node_id u = cur.node();
            node_id v = k_none;
            int unresolved = 0;
            for (node_id c : scratch_of(u).node_kids)
                if (t_.node_at(c).mk.removed_gen != gen_) {
                    ++unresolved;
                    v = c;
                }
            st_check(unresolved >= 1, "top-down: lost children");
            if (unresolved >= 2) break; // fully mixed from here down
            ext_id rv = t_.node_at(v).root_marker;
            ext_id q_down = t_.at(rv).opposite;
            if (twin_test_opposite_perfect(u, q_down)) {
                stamp_perfect(rv, v);
                t_.node_at(u).mk.removed_gen = gen_;
                --remaining_nodes;
                cur = tref::node(v);
            } else {
                fm_found = true;
            }
        }

        if (remaining_nodes > 1) {
            case_result res;
            res.kind = theorem_case::fully_mixed;
            res.mixed.push_back(cur.node());
            for (tref u : span)
                if (u.is_node() && u != cur && mk(u).removed_gen != gen_)
                    res.mixed.push_back(u.node());
            return res;
        }
        st_check(remaining_nodes == 1, "identification: no node left");
        return analyze_single_node(cur.node());
    }

public:
    // ---- case applications (valid right after mark_and_identify) -------------

    void apply_case_node(node_id u, int x) {
        ext_id lx = t_.new_leaf(x);
        ext_id mx = t_.new_marker(u);
        t_.set_opposite(lx, mx);
        tree_node& nd = t_.node_at(u);
        if (nd.kind == node_kind::prime) {
            node_scratch& s = scratch_of(u);
            for (ext_id p : s.perfect) {
                st_check(t_.at(p).alive, "case 3: dead perfect marker");
                t_.add_label_edge(mx, p);
            }
            ctx_.new_label_edges += static_cast<long long>(s.perfect.size());
            t_.register_child_in_set(u, tref::leaf(lx));
            nd.last_in_sigma = mx;
            // the old universal marker survives only if perfect; the new one is
            // universal when P(u) covered every previous marker
            const int cnt_before = nd.marker_count - 1;
            if (nd.universal != k_none && t_.at(nd.universal).alive && stamped(nd.universal)) {
                // still adjacent to everything, including mx through P(u)
            } else if (static_cast<int>(s.perfect.size()) == cnt_before) {
                nd.universal = mx;
            } else {
                nd.universal = k_none;
            }
        } else {
            t_.set_parent_direct(tref::leaf(lx), tref::node(u));
        }
    }

    void apply_case_edge(ext_id e1, tref t1, ext_id e2, tref t2, bool make_clique,
                         ext_id empty_ext, int x) {
        tref parent_side, child_side;
        ext_id parent_ext, child_ext;
        auto is_root_leaf = [&](tref t) { return t.is_leaf() && t.leaf() == t_.root_leaf(); };
        if (is_root_leaf(t1) || (!is_root_leaf(t2) && t_.up_ext(t2) == e2)) {
            parent_side = t1;
            parent_ext = e1;
            child_side = t2;
            child_ext = e2;
        } else {
            st_check(is_root_leaf(t2) || t_.up_ext(t1) == e1, "subdivide: unoriented edge");
            parent_side = t2;
            parent_ext = e2;
            child_side = t1;
            child_ext = e1;
        }
        node_id w = t_.new_node(make_clique ? node_kind::clique : node_kind::star);
        ext_id a_p = t_.new_marker(w);
        ext_id a_c = t_.new_marker(w);
        ext_id mx = t_.new_marker(w);
        t_.set_opposite(a_p, parent_ext);
        t_.set_opposite(a_c, child_ext);
        ext_id lx = t_.new_leaf(x);
        t_.set_opposite(mx, lx);
        t_.set_root_marker(w, a_p);
        if (!make_clique) {
            st_check(empty_ext == parent_ext || empty_ext == child_ext,
                     "subdivide: empty extremity not on the edge");
            t_.node_at(w).centre = (empty_ext == parent_ext) ? a_p : a_c;
        }
        t_.attach_child(tref::node(w), parent_side);
        t_.set_parent_direct(child_side, tref::node(w));
        t_.set_parent_direct(tref::leaf(lx), tref::node(w));
        ctx_.new_degenerate_markers += 1; // a_c; a_p is a root marker, mx is x's opposite
    }

    void apply_case_hybrid_degenerate(node_id u, int x) {
        node_scratch& s = scratch_of(u);
        const bool is_star = t_.node_at(u).kind == node_kind::star;
        const ext_id centre = t_.node_at(u).centre;
        const bool centre_perfect = is_star && centre != k_none && stamped(centre);
        std::vector<ext_id> pstar;
        for (ext_id p : s.perfect)
            if (!(is_star && p == centre)) pstar.push_back(p);
        st_check(pstar.size() >= 2, "case 4: |P*| < 2");
        st_check(t_.node_at(u).marker_count - static_cast<int32_t>(pstar.size()) >= 2,
                 "case 4: |E*| < 2");
        auto [ua, v] = t_.node_split(u, pstar);
        auto [q, r] = last_split_edge();
        count_split_markers(ua, true, v, true);
        // q sits in the kept node v and faces the all-perfect side, so it is
        // perfect; r faces the E* side and is perfect only when that side holds
        // a perfect star centre
        if (centre_perfect)
            apply_case_edge(q, tref::node(v), r, tref::node(ua), true, k_none, x);
        else
            apply_case_edge(q, tref::node(v), r, tref::node(ua), false, r, x);
    }

    void apply_case_fully_mixed(const std::vector<node_id>& fm, int x) {
        for (node_id u : fm) scratch_of(u).in_fm = true;
        std::vector<node_id> live = skip_cleaning_ ? fm : clean(fm);
        contract_and_insert(live, x);
    }

    // Cleaning: peel P* and E* groups off the degenerate nodes of the
    // fully-mixed subtree. Returns the fully-mixed subtree of the cleaned tree.
    std::vector<node_id> clean(const std::vector<node_id>& fm_in) {
        std::vector<node_id> fm = fm_in;
        for (node_id u : fm) scratch_of(u).in_fm = true;
        // pass 1: split off perfect non-centre groups
        for (node_id v : fm) {
            if (t_.node_at(v).kind == node_kind::prime) continue;
            const bool is_star = t_.node_at(v).kind == node_kind::star;
            const ext_id centre = t_.node_at(v).centre;
            std::vector<ext_id> pstar;
            for (ext_id p : scratch_of(v).perfect)
                if (!(is_star && p == centre)) pstar.push_back(p);
            if (pstar.size() <= 1) continue;
            auto [ua, kept] = t_.node_split(v, pstar);
            st_check(kept == v, "clean pass 1: kept node is the reused one");
            auto [q, r] = last_split_edge();
            count_split_markers(ua, true, v, false);
            // q replaces the peeled perfect group on the mixed node
            std::set<ext_id> peel(pstar.begin(), pstar.end());
            node_scratch& sv = scratch_of(v);
            std::erase_if(sv.ne, [&](ext_id m) { return peel.count(m) > 0; });
            std::erase_if(sv.perfect, [&](ext_id m) { return peel.count(m) > 0; });
            sv.ne.push_back(q);
            stamp_perfect(q, v);
            (void)r;
        }
        // pass 2: split off the empty side (empty markers plus a perfect centre),
        // computed without touching any empty marker
        for (node_id& v : fm) {
            if (t_.node_at(v).kind == node_kind::prime) continue;
            const bool is_star = t_.node_at(v).kind == node_kind::star;
            const ext_id centre = t_.node_at(v).centre;
            const bool centre_perfect = is_star && centre != k_none && stamped(centre);
            std::vector<ext_id> a_side; // P* plus mixed = everything outside E*
            for (ext_id m : scratch_of(v).ne)
                if (!(is_star && m == centre && stamped(m))) a_side.push_back(m);
            const int estar = t_.node_at(v).marker_count - static_cast<int>(a_side.size());
            if (estar <= 1) continue;
            auto [ua, kept] = t_.node_split(v, a_side);
            st_check(kept == v, "clean pass 2: kept node is the reused one");
            auto [q, r] = last_split_edge();
            count_split_markers(ua, false, v, true);
            // ua (the mixed side) replaces v in the subtree; r faces the peeled
            // side and inherits the centre's access when the centre was perfect
            node_scratch& su = scratch_of(ua);
            su.in_fm = true;
            su.ne = std::move(a_side);
            for (ext_id m : su.ne)
                if (stamped(m)) su.perfect.push_back(m);
            if (centre_perfect) {
                stamp_perfect(r, ua);
                su.ne.push_back(r);
            }
            v = ua;
            (void)q;
        }
        return fm;
    }

    // Contraction: three phases of node-joins, then the vertex itself.
    void contract_and_insert(const std::vector<node_id>& fm, int x) {
        st_check(fm.size() >= 2, "contract: subtree has one node");
        for (node_id u : fm) scratch_of(u).in_fm = true;
        node_id fm_root = k_none;
        for (node_id u : fm) {
            tref p = t_.resolve_parent(tref::node(u));
            if (p.is_node() && has_scratch(p.node()) && scratch_of(p.node()).in_fm) {
                scratch_of(u).fm_parent = p.node();
            } else {
                st_check(fm_root == k_none, "contract: two subtree roots");
                fm_root = u;
            }
        }
        st_check(fm_root != k_none, "contract: no subtree root");

        auto parent_in_fm = [&](node_id u) -> node_id {
            node_id p = scratch_of(u).fm_parent;
            while (p != k_none && !t_.node_at(p).alive) p = scratch_of(p).join_alias;
            return p;
        };

        // phase 1: stars rooted at their centre absorb their subtree children
        std::vector<std::pair<node_id, node_id>> phase1;
        for (node_id u : fm) {
            const tree_node& nd = t_.node_at(u);
            if (nd.kind == node_kind::star && nd.root_marker == nd.centre)
                for (node_id c : fm)
                    if (c != u && scratch_of(c).fm_parent == u) phase1.emplace_back(u, c);
        }
        for (auto [u, c] : phase1)
            if (t_.node_at(u).alive && t_.node_at(c).alive) do_join(u, c);

        // phase 2: nodes whose root marker has label-degree one join upward
        for (node_id u : fm) {
            if (!t_.node_at(u).alive || u == fm_root) continue;
            node_id p = parent_in_fm(u);
            if (p == k_none) continue;
            if (t_.label_degree(u, t_.node_at(u).root_marker) == 1) do_join(p, u);
        }

        // phase 3: contract the rest, children before parents
        std::vector<node_id> live;
        for (node_id u : fm)
            if (t_.node_at(u).alive) live.push_back(u);
        std::map<node_id, int> kid_count;
        for (node_id u : live) kid_count[u] = 0;
        for (node_id u : live) {
            node_id p = parent_in_fm(u);
            if (p != k_none) kid_count[p] += 1;
        }
        std::vector<node_id> ready;
        for (node_id u : live)
            if (kid_count[u] == 0 && u != fm_root) ready.push_back(u);
        while (!ready.empty()) {
            node_id u = ready.back();
            ready.pop_back();
            node_id p = parent_in_fm(u);
            st_check(p != k_none, "phase 3: child without parent");
            do_join(p, u);
            if (--kid_count[p] == 0 && p != fm_root) ready.push_back(p);
        }
        st_check(t_.node_at(fm_root).alive, "contract: root died");

        node_id u = fm_root;
        ext_id lx = t_.new_leaf(x);
        ext_id mx = t_.new_marker(u);
        t_.set_opposite(lx, mx);
        node_scratch& s = scratch_of(u);
        for (ext_id p : s.perfect) {
            st_check(t_.at(p).alive, "contract: dead perfect marker");
            t_.add_label_edge(mx, p);
        }
        ctx_.new_label_edges += static_cast<long long>(s.perfect.size());
        t_.register_child_in_set(u, tref::leaf(lx));
        tree_node& nd = t_.node_at(u);
        nd.last_in_sigma = mx;
        nd.universal = k_none;
        for (ext_id m = nd.first_marker; m != k_none; m = t_.at(m).next)
            if (t_.at(m).degree == nd.marker_count - 1) {
                nd.universal = m;
                break;
            }
    }

private:
    struct node_scratch {
        std::vector<ext_id> ne;          // non-empty markers of this node
        std::vector<ext_id> perfect;     // perfect-stamped markers of this node
        std::vector<node_id> node_kids;  // node children inside T(S)
        int pending_children = 0;        // unresolved node children (bottom-up)
        bool in_fm = false;
        node_id fm_parent = k_none;
        node_id join_alias = k_none;     // forwarding pointer once joined away
    };

    void insert_general(int x, const std::vector<int>& nbrs) {
        case_result cr =
            nbrs.size() == 1 ? classify_pendant(nbrs[0]) : mark_and_identify_impl(nbrs);
        if (nbrs.size() == 1) ctx_.spanning_size = 1;
        ctx_.fired = cr.kind;
        switch (cr.kind) {
        case theorem_case::clique_all_perfect:
        case theorem_case::star_centre_perfect:
        case theorem_case::prime_hybrid:
            apply_case_node(cr.node, x);
            break;
        case theorem_case::degenerate_hybrid:
            apply_case_hybrid_degenerate(cr.node, x);
            break;
        case theorem_case::pp_edge:
            apply_case_edge(cr.edge_a, cr.ent_a, cr.edge_b, cr.ent_b, true, k_none, x);
            break;
        case theorem_case::pe_edge:
            apply_case_edge(cr.edge_a, cr.ent_a, cr.edge_b, cr.ent_b, false, cr.edge_b, x);
            break;
        case theorem_case::fully_mixed:
            apply_case_fully_mixed(cr.mixed, x);
            break;
        }
    }

    void insert_bootstrap_two(int x, const std::vector<int>& nbrs) {
        ext_id l0 = t_.root_leaf();
        ext_id l1 = t_.at(l0).opposite;
        if (nbrs.size() == 2) {
            ctx_.fired = theorem_case::pp_edge;
            apply_case_edge(l0, tref::leaf(l0), l1, tref::leaf(l1), true, k_none, x);
        } else {
            // the S-leaf is the empty extremity of the leaf-leaf edge
            ext_id ly = t_.leaf_of_vertex(nbrs.at(0));
            ext_id lz = t_.at(ly).opposite;
            ctx_.fired = theorem_case::pe_edge;
            apply_case_edge(lz, tref::leaf(lz), ly, tref::leaf(ly), false, ly, x);
        }
    }

    // |S| = 1: the unique neighbour's leaf-edge is PE with the leaf empty.
    case_result classify_pendant(int y) {
        ext_id ly = t_.leaf_of_vertex(y);
        ext_id q = t_.at(ly).opposite;
        st_check(!t_.at(q).is_leaf(), "pendant: tree should have nodes here");
        node_id u;
        if (ly == t_.root_leaf()) {
            u = t_.at(q).node;
        } else {
            tref pt = t_.resolve_parent(tref::leaf(ly));
            st_check(pt.is_node(), "pendant: leaf parent is not a node");
            u = pt.node();
        }
        stamp_perfect(q, u);
        case_result res;
        if (t_.node_at(u).kind == node_kind::star && q == t_.node_at(u).centre) {
            res.kind = theorem_case::star_centre_perfect;
            res.node = u;
            return res;
        }
        res.kind = theorem_case::pe_edge;
        res.edge_a = q;
        res.ent_a = tref::node(u);
        res.edge_b = ly;
        res.ent_b = tref::leaf(ly);
        return res;
    }

    // Final single-node analysis plus the case-1/5 and case-2/6 resolution.
    case_result analyze_single_node(node_id u) {
        const tree_node& nd = t_.node_at(u);
        node_scratch& s = scratch_of(u);
        const int psz = static_cast<int>(s.perfect.size());
        const int cnt = nd.marker_count;
        st_check(psz >= 1, "analysis: no perfect marker");

        if (nd.kind != node_kind::prime) {
            const bool is_star = nd.kind == node_kind::star;
            const ext_id centre = nd.centre;
            if (psz == cnt) {
                if (!is_star) return make_case(theorem_case::clique_all_perfect, u);
                return dispatch_edge(u, centre, true);
            }
            if (psz == cnt - 1) {
                ext_id missing = k_none;
                for (ext_id m = nd.first_marker; m != k_none; m = t_.at(m).next)
                    if (!stamped(m)) missing = m;
                st_check(missing != k_none, "analysis: missing marker not found");
                if (!is_star || missing == centre) return dispatch_edge(u, missing, false);
            }
            if (is_star && stamped(centre)) {
                if (psz == 1) {
                    for (ext_id m = nd.first_marker; m != k_none; m = t_.at(m).next)
                        if (m != centre) return dispatch_edge(u, m, false);
                }
                if (psz == 2) {
                    ext_id q = s.perfect[0] == centre ? s.perfect[1] : s.perfect[0];
                    return dispatch_edge(u, q, true);
                }
            }
            return make_case(theorem_case::degenerate_hybrid, u);
        }

        // prime: only the last marker of the induced order and the universal
        // marker can have a perfect opposite
        ext_id cands[2] = {nd.last_in_sigma, nd.universal};
        for (int i = 0; i < 2; ++i) {
            ext_id cand = cands[i];
            if (cand == k_none || (i == 1 && cand == cands[0])) continue;
            st_check(t_.at(cand).alive, "analysis: stale marker pointer");
            if (twin_test_opposite_perfect(u, cand))
                return dispatch_edge(u, cand, stamped(cand));
        }
        return make_case(theorem_case::prime_hybrid, u);
    }

    case_result dispatch_edge(node_id u, ext_id q, bool q_perfect) {
        ext_id r = t_.at(q).opposite;
        tref r_ent;
        if (t_.at(r).is_leaf())
            r_ent = tref::leaf(r);
        else if (q == t_.node_at(u).root_marker)
            r_ent = t_.resolve_parent(tref::node(u));
        else
            r_ent = tref::node(t_.at(r).node);
        const tree_node* rn = r_ent.is_node() ? &t_.node_at(r_ent.node()) : nullptr;
        case_result res;
        if (q_perfect) {
            // PP edge: a clique at either end means the whole clique is perfect
            if (t_.node_at(u).kind == node_kind::clique)
                return make_case(theorem_case::clique_all_perfect, u);
            if (rn && rn->kind == node_kind::clique)
                return make_case(theorem_case::clique_all_perfect, r_ent.node());
            res.kind = theorem_case::pp_edge;
            res.edge_a = q;
            res.ent_a = tref::node(u);
            res.edge_b = r;
            res.ent_b = r_ent;
            return res;
        }
        // PE edge: r is the perfect extremity, q the empty one
        if (rn && rn->kind == node_kind::star && r == rn->centre)
            return make_case(theorem_case::star_centre_perfect, r_ent.node());
        if (t_.node_at(u).kind == node_kind::star && q != t_.node_at(u).centre)
            return make_case(theorem_case::star_centre_perfect, u);
        res.kind = theorem_case::pe_edge;
        res.edge_a = r;
        res.ent_a = r_ent;
        res.edge_b = q;
        res.ent_b = tref::node(u);
        return res;
    }

    static case_result make_case(theorem_case k, node_id u) {
        case_result res;
        res.kind = k;
        res.node = u;
        return res;
    }

    // Is the opposite of marker q (of node u) perfect? Tests P(u) against the
    // label neighbourhood of q without touching empty markers.
    bool twin_test_opposite_perfect(node_id u, ext_id q) {
        node_scratch& s = scratch_of(u);
        for (ext_id m : s.ne)
            if (!stamped(m) && m != q) return false;
        const tree_node& nd = t_.node_at(u);
        const int psz = static_cast<int>(s.perfect.size());
        const bool q_in_p = stamped(q);
        switch (nd.kind) {
        case node_kind::clique:
            return (psz == nd.marker_count - 1 && !q_in_p) || psz == nd.marker_count;
        case node_kind::star:
            if (q == nd.centre)
                return (psz == nd.marker_count - 1 && !q_in_p) || psz == nd.marker_count;
            if (!stamped(nd.centre)) return false;
            return (psz == 1 && !q_in_p) || (psz == 2 && q_in_p);
        default: {
            int live = 0;
            for (ext_id t : t_.at(q).adj) {
                if (!t_.at(t).alive) continue;
                ++live;
                if (!stamped(t)) return false;
            }
            return q_in_p ? psz == live + 1 : psz == live;
        }
        }
    }

    // ---- scratch plumbing ------------------------------------------------------

    span_state& mk(tref t) {
        return t.is_leaf() ? t_.at(t.leaf()).mk : t_.node_at(t.node()).mk;
    }

    void mark_active(tref t) {
        span_state& m = mk(t);
        m = span_state{};
        m.active_gen = gen_;
    }

    void visit(tref t) {
        mk(t).visit_gen = gen_;
        span_order_.push_back(t);
    }

    static bool vertex_in(const std::vector<int>& vs, int v) {
        return std::find(vs.begin(), vs.end(), v) != vs.end();
    }

    bool eligible_bottom_up(tref u) {
        if (!u.is_node() || u == top_) return false;
        if (mk(u).removed_gen == gen_) return false;
        return mk(u).span_parent.is_node();
    }

    node_scratch& scratch_of(node_id u) {
        tree_node& nd = t_.node_at(u);
        if (nd.scratch_gen != gen_) {
            nd.scratch_gen = gen_;
            if (scr_used_ >= static_cast<int>(scr_.size())) scr_.emplace_back();
            nd.scratch_idx = scr_used_++;
            node_scratch& s = scr_[static_cast<std::size_t>(nd.scratch_idx)];
            s.ne.clear();
            s.perfect.clear();
            s.node_kids.clear();
            s.pending_children = 0;
            s.in_fm = false;
            s.fm_parent = k_none;
            s.join_alias = k_none;
        }
        return scr_[static_cast<std::size_t>(nd.scratch_idx)];
    }

    bool has_scratch(node_id u) const { return t_.node_at(u).scratch_gen == gen_; }

    bool stamped(ext_id m) const { return m != k_none && t_.at(m).perfect_gen == gen_; }

    void stamp_perfect(ext_id m, node_id owner_node) {
        if (t_.at(m).perfect_gen == gen_) return;
        t_.at(m).perfect_gen = gen_;
        scratch_of(owner_node).perfect.push_back(m);
    }

    // node_split allocates the kept-side marker first, then the new-side one
    std::pair<ext_id, ext_id> last_split_edge() const {
        ext_id q = t_.ext_arena_size() - 2;
        ext_id r = t_.ext_arena_size() - 1;
        st_check(t_.at(q).opposite == r, "last_split_edge: unexpected arena layout");
        return {q, r};
    }

    // count fresh non-root markers that end up in nodes staying degenerate
    void count_split_markers(node_id ua, bool ua_degenerate, node_id v, bool v_degenerate) {
        auto [q, r] = last_split_edge();
        if (v_degenerate && t_.node_at(v).root_marker != q) ctx_.new_degenerate_markers += 1;
        if (ua_degenerate && t_.node_at(ua).root_marker != r) ctx_.new_degenerate_markers += 1;
    }

    void do_join(node_id u, node_id u_prime) {
        scratch_of(u);       // ensure both exist before taking references
        scratch_of(u_prime);
        join_result res = t_.node_join(u, u_prime);
        ctx_.new_label_edges += res.new_label_edges;
        node_scratch& su = scratch_of(u);
        node_scratch& sp = scratch_of(u_prime);
        for (ext_id m : sp.perfect) {
            if (res.special && m == res.died_centre) {
                // the reused marker inherits the perfect centre's access
                if (t_.at(res.reused_marker).perfect_gen != gen_) {
                    t_.at(res.reused_marker).perfect_gen = gen_;
                    su.perfect.push_back(res.reused_marker);
                }
                continue;
            }
            if (t_.at(m).alive) su.perfect.push_back(m);
        }
        sp.join_alias = u;
    }

    split_tree t_;
    uint32_t gen_ = 0;
    insertion_counters ctx_{};
    build_stats stats_{};
    std::deque<node_scratch> scr_;
    int scr_used_ = 0;
    std::vector<tref> span_order_;
    tref top_ = tref::none();
    bool skip_cleaning_ = false;
};

struct build_result {
    split_tree tree;
    build_stats stats;
    ordering sigma;
};

struct build_options {
    int start = -1;
    bool skip_cleaning = false; // testing hook for the validator
};

inline build_result build_split_tree_opts(const graph& g, const build_options& opts) {
    if (g.vertex_count() == 0) throw std::invalid_argument("build_split_tree: empty graph");
    if (!is_connected(g)) throw std::invalid_argument("build_split_tree: disconnected graph");
    ordering sigma = lbfs_order(g, opts.start);
    builder b;
    b.set_skip_cleaning(opts.skip_cleaning);
    std::vector<char> inserted(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int x : sigma.order) {
        std::vector<int> nbrs;
        for (int w : g.neighbors(x))
            if (inserted[static_cast<std::size_t>(w)]) nbrs.push_back(w);
        b.insert_vertex(x, nbrs);
        inserted[static_cast<std::size_t>(x)] = 1;
    }
    return build_result{std::move(b.tree()), b.stats(), std::move(sigma)};
}

inline build_result build_split_tree(const graph& g, int start = -1) {
    build_options o;
    o.start = start;
    return build_split_tree_opts(g, o);
}

// Theorem-style primality test: with the tree marked for S = N(x), the graph
// G+x is prime iff every marker not opposite a leaf is mixed and every
// degenerate node carries almost no perfect or empty markers. States are
// computed exactly here; test-scale only.
inline bool fast_prime_test(const split_tree& t, const std::vector<int>& s_vertices) {
    auto owner = t.build_marker_owner_map();
    std::vector<char> in_s;
    for (int v : s_vertices) {
        if (v >= static_cast<int>(in_s.size())) in_s.resize(static_cast<std::size_t>(v) + 1, 0);
        in_s[static_cast<std::size_t>(v)] = 1;
    }
    auto state_of = [&](ext_id q) -> int { // 0 empty, 1 perfect, 2 mixed
        std::vector<int> sl;
        for (int v : t.leaves_beyond(q, owner))
            if (v < static_cast<int>(in_s.size()) && in_s[static_cast<std::size_t>(v)])
                sl.push_back(v);
        if (sl.empty()) return 0;
        return sl == t.accessible_set(q, owner) ? 1 : 2;
    };
    for (node_id u : t.live_nodes()) {
        const tree_node& nd = t.node_at(u);
        int perfect = 0, empty = 0;
        bool centre_perfect = false;
        for (ext_id m : t.markers_of(u)) {
            int st = state_of(m);
            if (!t.at(t.at(m).opposite).is_leaf() && st != 2) return false;
            if (st == 1) {
                ++perfect;
                if (nd.kind == node_kind::star && m == nd.centre) centre_perfect = true;
            } else if (st == 0) {
                ++empty;
            }
        }
        if (nd.kind == node_kind::prime) continue;
        if (nd.kind == node_kind::star && centre_perfect) {
            if (empty > 0 || perfect > 2) return false;
        } else {
            if (empty > 1 || perfect > 1) return false;
        }
    }
    return true;
}

// Exact-state classification against the seven-case theorem; cross-checks the
// builder's fast identification and asserts that exactly one case applies.
inline theorem_case classify_bruteforce(const split_tree& t, const std::vector<int>& s_vertices) {
    auto owner = t.build_marker_owner_map();
    std::vector<char> in_s;
    for (int v : s_vertices) {
        if (v >= static_cast<int>(in_s.size())) in_s.resize(static_cast<std::size_t>(v) + 1, 0);
        in_s[static_cast<std::size_t>(v)] = 1;
    }
    std::map<ext_id, int> memo;
    auto state_of = [&](ext_id q) -> int {
        auto it = memo.find(q);
        if (it != memo.end()) return it->second;
        std::vector<int> sl;
        for (int v : t.leaves_beyond(q, owner))
            if (v < static_cast<int>(in_s.size()) && in_s[static_cast<std::size_t>(v)])
                sl.push_back(v);
        int st = sl.empty() ? 0 : (sl == t.accessible_set(q, owner) ? 1 : 2);
        memo[q] = st;
        return st;
    };

    int pp = 0, pe = 0, mm = 0;
    std::set<std::pair<ext_id, ext_id>> seen;
    auto edge_classify = [&](ext_id a) {
        ext_id b = t.at(a).opposite;
        if (b == k_none) return;
        auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second) return;
        int sa = state_of(a), sb = state_of(b);
        if (sa > sb) std::swap(sa, sb);
        if (sa == 1 && sb == 1) ++pp;
        else if (sa == 0 && sb == 1) ++pe;
        else if (sa == 2 && sb == 2) ++mm;
    };
    for (node_id u : t.live_nodes())
        for (ext_id m : t.markers_of(u)) edge_classify(m);
    for (int v = 0; v < t.leaf_count(); ++v) edge_classify(t.leaf_of_vertex(v));

    int hybrid_prime = 0, hybrid_degen = 0, clique_perfect = 0, star_perfect = 0;
    for (node_id u : t.live_nodes()) {
        const tree_node& nd = t.node_at(u);
        bool all_perfect = true, case2_shape = true, hybrid = true;
        for (ext_id m : t.markers_of(u)) {
            int sm = state_of(m);
            int so = state_of(t.at(m).opposite);
            if (sm != 1) all_perfect = false;
            bool want = (nd.kind == node_kind::star && m == nd.centre) ? sm == 1 : sm == 0;
            if (!want) case2_shape = false;
            if (!((sm == 0 || sm == 1) && so == 2)) hybrid = false;
        }
        if (nd.kind == node_kind::clique && all_perfect) ++clique_perfect;
        if (nd.kind == node_kind::star && case2_shape) ++star_perfect;
        if (hybrid) (nd.kind == node_kind::prime ? hybrid_prime : hybrid_degen) += 1;
    }

    std::vector<theorem_case> hits;
    if (mm >= 1) hits.push_back(theorem_case::fully_mixed);
    if (hybrid_prime) hits.push_back(theorem_case::prime_hybrid);
    if (hybrid_degen) hits.push_back(theorem_case::degenerate_hybrid);
    if (!mm && !hybrid_prime && !hybrid_degen) {
        if (pp >= 2 || clique_perfect) hits.push_back(theorem_case::clique_all_perfect);
        else if (pp == 1) hits.push_back(theorem_case::pp_edge);
        if (pe >= 2 || star_perfect) hits.push_back(theorem_case::star_centre_perfect);
        else if (pe == 1) hits.push_back(theorem_case::pe_edge);
    }
    if (hits.size() != 1)
        throw std::logic_error("classify_bruteforce: not exactly one case (" +
                               std::to_string(hits.size()) + " candidates)");
    return hits[0];
}

} // namespace splittree

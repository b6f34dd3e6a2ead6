#pragma once

#include <map>
#include <queue>
#include <string>

#include <json.hpp>

#include "splittree/split_tree.hpp"

namespace splittree {

// Lossless JSON form:
// {"n":..,"root_leaf":..,"nodes":[{"id":..,"kind":"clique|star|prime","centre":..,
//   "markers":[{"id":..,"opposite":{"type":"leaf|marker","id":..},"adj":[..]}]}]}
// Leaves are identified by their vertex ids; "adj" is omitted for degenerate
// labels, "centre" for non-stars.
inline nlohmann::json to_json(const split_tree& t) {
    nlohmann::json out;
    out["n"] = t.leaf_count();
    out["root_leaf"] = t.leaf_count() ? t.at(t.root_leaf()).vertex : -1;
    auto opposite_of = [&](ext_id m) {
        nlohmann::json o;
        ext_id op = t.at(m).opposite;
        if (t.at(op).is_leaf()) {
            o["type"] = "leaf";
            o["id"] = t.at(op).vertex;
        } else {
            o["type"] = "marker";
            o["id"] = op;
        }
        return o;
    };
    nlohmann::json nodes = nlohmann::json::array();
    for (node_id u : t.live_nodes()) {
        const tree_node& nd = t.node_at(u);
        nlohmann::json jn;
        jn["id"] = u;
        jn["kind"] = to_string(nd.kind);
        if (nd.kind == node_kind::star) jn["centre"] = nd.centre;
        nlohmann::json markers = nlohmann::json::array();
        for (ext_id m : t.markers_of(u)) {
            nlohmann::json jm;
            jm["id"] = m;
            jm["opposite"] = opposite_of(m);
            if (nd.kind == node_kind::prime) {
                nlohmann::json adj = nlohmann::json::array();
                for (ext_id a : t.at(m).adj)
                    if (t.at(a).alive) adj.push_back(a);
                jm["adj"] = adj;
            }
            markers.push_back(jm);
        }
        jn["markers"] = markers;
        nodes.push_back(jn);
    }
    out["nodes"] = nodes;
    return out;
}

// Rebuild a split_tree from its JSON form. Fresh arena handles are assigned;
// the tree is re-rooted at the recorded root leaf and children-sets rebuilt.
inline split_tree from_json(const nlohmann::json& j) {
    split_tree t;
    int n = j.at("n").get<int>();
    if (n == 0) return t;
    int root_vertex = j.at("root_leaf").get<int>();
    // root leaf first so it becomes the stored root
    t.new_leaf(root_vertex);
    for (int v = 0; v < n; ++v)
        if (v != root_vertex) t.new_leaf(v);

    std::map<int, node_id> node_of;
    std::map<int, ext_id> marker_of;
    for (const auto& jn : j.at("nodes")) {
        node_kind k = node_kind::prime;
        std::string ks = jn.at("kind").get<std::string>();
        if (ks == "clique") k = node_kind::clique;
        else if (ks == "star") k = node_kind::star;
        node_id u = t.new_node(k);
        node_of[jn.at("id").get<int>()] = u;
        for (const auto& jm : jn.at("markers"))
            marker_of[jm.at("id").get<int>()] = t.new_marker(u);
        if (k == node_kind::star)
            t.node_at(u).centre = marker_of.at(jn.at("centre").get<int>());
    }
    for (const auto& jn : j.at("nodes")) {
        node_id u = node_of.at(jn.at("id").get<int>());
        for (const auto& jm : jn.at("markers")) {
            ext_id m = marker_of.at(jm.at("id").get<int>());
            const auto& jo = jm.at("opposite");
            ext_id op = jo.at("type").get<std::string>() == "leaf"
                            ? t.leaf_of_vertex(jo.at("id").get<int>())
                            : marker_of.at(jo.at("id").get<int>());
            t.set_opposite(m, op);
            if (t.node_at(u).kind == node_kind::prime && jm.contains("adj"))
                for (const auto& ja : jm.at("adj")) {
                    ext_id a = marker_of.at(ja.get<int>());
                    if (m < a) t.add_label_edge(m, a);
                }
        }
    }
    if (n == 1) return t;

    // orient from the root leaf: assign root markers and parent links
    auto owner = t.build_marker_owner_map();
    std::queue<std::pair<tref, ext_id>> q; // entity, its upward extremity
    ext_id top = t.at(t.root_leaf()).opposite;
    if (t.at(top).is_leaf()) {
        t.set_parent_direct(tref::leaf(top), tref::leaf(t.root_leaf()));
        return t;
    }
    q.push({tref::node(owner[static_cast<std::size_t>(top)]), top});
    t.set_root_marker(owner[static_cast<std::size_t>(top)], top);
    t.node_at(owner[static_cast<std::size_t>(top)]).parent = tref::leaf(t.root_leaf());
    t.node_at(owner[static_cast<std::size_t>(top)]).parent_direct = true;
    while (!q.empty()) {
        auto [ent, up] = q.front();
        q.pop();
        node_id u = ent.node();
        for (ext_id m : t.markers_of(u)) {
            if (m == up) continue;
            ext_id o = t.at(m).opposite;
            if (t.at(o).is_leaf()) {
                t.attach_child(tref::leaf(o), tref::node(u));
            } else {
                node_id w = owner[static_cast<std::size_t>(o)];
                t.set_root_marker(w, o);
                t.attach_child(tref::node(w), tref::node(u));
                q.push({tref::node(w), o});
            }
        }
    }
    return t;
}

// Graphviz rendering: internal nodes as boxed label graphs, leaves as circles.
// Presentation only, not round-trippable.
inline std::string to_dot(const split_tree& t) {
    std::string s = "graph splittree {\n  compound=true;\n";
    for (int v = 0; v < t.leaf_count(); ++v)
        s += "  v" + std::to_string(v) + " [shape=circle,label=\"" + std::to_string(v) + "\"];\n";
    for (node_id u : t.live_nodes()) {
        const tree_node& nd = t.node_at(u);
        s += "  subgraph cluster_" + std::to_string(u) + " {\n    label=\"" +
             to_string(nd.kind) + "\";\n";
        for (ext_id m : t.markers_of(u)) {
            std::string shape = (nd.kind == node_kind::star && m == nd.centre)
                                    ? "doublecircle"
                                    : "point";
            s += "    m" + std::to_string(m) + " [shape=" + shape + "];\n";
        }
        std::set<std::pair<ext_id, ext_id>> es;
        for (ext_id m : t.markers_of(u))
            t.for_each_label_neighbor(u, m, [&](ext_id w) {
                es.insert({std::min(m, w), std::max(m, w)});
            });
        for (auto [a, b] : es)
            s += "    m" + std::to_string(a) + " -- m" + std::to_string(b) + " [style=dotted];\n";
        s += "  }\n";
    }
    // tree-edges once per pair
    std::set<std::pair<std::string, std::string>> seen;
    auto name_of = [&](ext_id e) {
        return t.at(e).is_leaf() ? "v" + std::to_string(t.at(e).vertex)
                                 : "m" + std::to_string(e);
    };
    for (node_id u : t.live_nodes())
        for (ext_id m : t.markers_of(u)) {
            ext_id o = t.at(m).opposite;
            auto a = name_of(m), b = name_of(o);
            if (a > b) std::swap(a, b);
            if (seen.insert({a, b}).second) s += "  " + a + " -- " + b + ";\n";
        }
    if (t.leaf_count() == 2) {
        auto a = name_of(t.root_leaf()), b = name_of(t.at(t.root_leaf()).opposite);
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) s += "  " + a + " -- " + b + ";\n";
    }
    s += "}\n";
    return s;
}

} // namespace splittree

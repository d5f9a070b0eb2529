#pragma once
// Label-filtered n-hop path queries.
//
// A query starts at one known node and returns every simple path of at most
// max_hops edges whose last node satisfies the target label predicate,
// optionally only traversing edges that carry one of the edge-filter labels.
// Paths come out in lexicographic order of their node-id sequences.

#include "kglb/graph.hpp"

#include "json.hpp"

#include <cstdlib>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kglb {

inline constexpr std::size_t default_max_hops_cap = 10;
inline constexpr std::size_t default_max_paths = 100;

// Hop cap: KGLB_MAX_HOPS when set to a non-negative integer, else 10.
inline std::size_t max_hops_cap_from_env() {
    if (const char* s = std::getenv("KGLB_MAX_HOPS"); s && *s) {
        char* end = nullptr;
        const auto v = std::strtoull(s, &end, 10);
        if (end && *end == '\0') return static_cast<std::size_t>(v);
    }
    return default_max_hops_cap;
}

struct label_predicate {
    enum class mode { all, any };
    mode match = mode::any;
    std::vector<std::string> labels;
};

struct hop_query {
    std::variant<std::string, entity_id> source;
    std::size_t max_hops = 3;
    // Absent: every node is a target.
    std::optional<label_predicate> target_criteria;
    // Absent: every edge may be traversed. Present: ANY-of over edge labels.
    std::optional<std::vector<std::string>> edge_filter;
    direction dir = direction::out;
    std::size_t max_paths = default_max_paths;
};

struct path_result {
    std::vector<std::vector<entity_id>> paths;
    bool truncated = false;
};

namespace detail {

inline std::vector<label_id> known_ids(const label_dictionary& dict, const std::vector<std::string>& labels,
                                       bool& any_unknown) {
    std::vector<label_id> ids;
    any_unknown = false;
    for (const auto& s : labels) {
        if (auto id = dict.find(s)) ids.push_back(*id);
        else any_unknown = true;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

// Live tuples of `store` satisfying the predicate.
inline std::vector<tuple_id> matching_tuples(const label_store& store, const label_predicate& p) {
    if (p.labels.empty()) fail(errc::invalid_query, "label predicate has no labels");
    bool any_unknown = false;
    const auto ids = known_ids(store.dictionary(), p.labels, any_unknown);
    if (p.match == label_predicate::mode::all) {
        if (any_unknown || ids.empty()) return {};
        return store.tuples_with_all(ids);
    }
    return store.tuples_with_any(ids);
}

// Dense membership mask over tuple ids.
inline std::vector<char> tuple_mask(const label_store& store, const std::vector<tuple_id>& tuples) {
    std::vector<char> mask(store.registry().slot_capacity(), 0);
    for (tuple_id t : tuples) mask[t] = 1;
    return mask;
}

} // namespace detail

// Nodes satisfying the predicate, found through the tuple index and ring
// traversal only; unlabeled nodes are never touched.
inline std::vector<entity_id> match_nodes(const graph& g, const label_predicate& p, traversal_stats* stats = nullptr) {
    const auto& store = g.node_labels();
    const auto tuples = detail::matching_tuples(store, p);
    std::vector<entity_id> out;
    for (tuple_id t : tuples)
        for (entity_id e : store.entities_with_tuple(t)) out.push_back(e);
    if (stats) {
        stats->entities_visited += out.size();
        stats->candidate_tuples += tuples.size();
    }
    return out;
}

inline entity_id resolve_source(const graph& g, const std::variant<std::string, entity_id>& source) {
    if (const auto* key = std::get_if<std::string>(&source)) {
        if (auto v = g.find_node(*key)) return *v;
        fail(errc::unknown_entity, "no node with key '" + *key + "'");
    }
    const auto v = std::get<entity_id>(source);
    if (v >= g.node_count()) fail(errc::unknown_entity, "node " + std::to_string(v));
    return v;
}

inline path_result n_hop(const graph& g, const hop_query& q, std::size_t hop_cap = max_hops_cap_from_env()) {
    if (q.max_hops > hop_cap)
        fail(errc::invalid_query, "max_hops " + std::to_string(q.max_hops) + " exceeds cap " + std::to_string(hop_cap));
    const entity_id source = resolve_source(g, q.source);

    const auto& nodes = g.node_labels();
    const auto& edges = g.edge_labels();
    std::vector<char> target_mask, edge_mask;
    if (q.target_criteria) target_mask = detail::tuple_mask(nodes, detail::matching_tuples(nodes, *q.target_criteria));
    if (q.edge_filter) {
        bool any_unknown = false;
        const auto ids = detail::known_ids(g.dictionary(), *q.edge_filter, any_unknown);
        edge_mask = detail::tuple_mask(edges, edges.tuples_with_any(ids));
    }
    auto is_target = [&](entity_id v) { return !q.target_criteria || target_mask[nodes.tuple_of(v)]; };
    auto edge_passes = [&](entity_id e) { return !q.edge_filter || edge_mask[edges.tuple_of(e)]; };

    path_result result;
    std::vector<entity_id> path{source};
    bool stop = false;

    auto expand = [&](auto& self) -> void {
        const entity_id v = path.back();
        if (is_target(v)) {
            if (result.paths.size() == q.max_paths) {
                result.truncated = true;
                stop = true;
                return;
            }
            result.paths.push_back(path);
        }
        if (path.size() > q.max_hops) return;
        std::vector<entity_id> next;
        if (q.dir != direction::in)
            for (entity_id e : g.out_edges(v))
                if (edge_passes(e)) next.push_back(g.edges()[e].target);
        if (q.dir != direction::out)
            for (entity_id e : g.in_edges(v))
                if (edge_passes(e)) next.push_back(g.edges()[e].source);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (entity_id w : next) {
            if (std::find(path.begin(), path.end(), w) != path.end()) continue;
            path.push_back(w);
            self(self);
            path.pop_back();
            if (stop) return;
        }
    };
    expand(expand);
    return result;
}

inline label_predicate parse_predicate(const nlohmann::json& j) {
    label_predicate p;
    const auto mode = j.value("mode", std::string("any"));
    if (mode == "all") p.match = label_predicate::mode::all;
    else if (mode == "any") p.match = label_predicate::mode::any;
    else fail(errc::invalid_query, "unknown predicate mode '" + mode + "'");
    p.labels = j.at("labels").get<std::vector<std::string>>();
    return p;
}

// {"source": "Tom" | 3, "max_hops": 3, "direction": "out" | "in" | "both",
//  "target_criteria": {"mode": "any" | "all", "labels": [...]},
//  "edge_filter": {"labels": [...]}, "max_paths": 100}
inline hop_query parse_hop_query(const nlohmann::json& j) {
    hop_query q;
    try {
        const auto& src = j.at("source");
        if (src.is_string()) q.source = src.get<std::string>();
        else if (src.is_number_unsigned()) q.source = src.get<entity_id>();
        else fail(errc::invalid_query, "source must be a node key or a non-negative node id");
        if (j.contains("max_hops")) q.max_hops = j.at("max_hops").get<std::size_t>();
        if (j.contains("max_paths")) q.max_paths = j.at("max_paths").get<std::size_t>();
        if (j.contains("direction")) {
            const auto d = j.at("direction").get<std::string>();
            if (d == "out") q.dir = direction::out;
            else if (d == "in") q.dir = direction::in;
            else if (d == "both") q.dir = direction::both;
            else fail(errc::invalid_query, "unknown direction '" + d + "'");
        }
        if (j.contains("target_criteria")) q.target_criteria = parse_predicate(j.at("target_criteria"));
        if (j.contains("edge_filter")) {
            const auto p = parse_predicate(j.at("edge_filter"));
            if (p.match != label_predicate::mode::any) fail(errc::invalid_query, "edge_filter supports mode 'any' only");
            q.edge_filter = p.labels;
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::invalid_query, e.what());
    }
    return q;
}

inline nlohmann::json to_json(const graph& g, const path_result& r) {
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : r.paths) {
        nlohmann::json keys = nlohmann::json::array();
        for (entity_id v : p) keys.push_back(g.node_key(v));
        paths.push_back(std::move(keys));
    }
    return {{"paths", std::move(paths)}, {"truncated", r.truncated}};
}

} // namespace kglb

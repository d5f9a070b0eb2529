#pragma once
// Label ontology: the graph of node-label signatures connected by edge-label
// signatures, each bucket annotated with its share of all graph edges.
// Louvain clustering over that label graph yields a label-driven partition
// criterion for the entity graph.

#include "kglb/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace kglb {

// Case-insensitive order with a byte-wise tie break, so "chess" < "MALE".
inline bool label_less(std::string_view a, std::string_view b) noexcept {
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto ca = std::tolower(static_cast<unsigned char>(a[i]));
        const auto cb = std::tolower(static_cast<unsigned char>(b[i]));
        if (ca != cb) return ca < cb;
    }
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// Canonical colon-joined signature of a label set; "" for unlabeled.
inline std::string signature(const label_dictionary& dict, std::span<const label_id> labels) {
    std::vector<std::string_view> names;
    names.reserve(labels.size());
    for (label_id l : labels) names.push_back(dict.resolve(l));
    std::sort(names.begin(), names.end(), label_less);
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ':';
        out += names[i];
    }
    return out;
}

struct ontology_graph {
    struct bucket_key {
        std::string source;
        std::string target;
        std::string edge_label;
        friend auto operator<=>(const bucket_key&, const bucket_key&) = default;
    };

    std::vector<std::string> nodes; // sorted, unique
    std::map<bucket_key, std::uint64_t> edges;
    std::uint64_t total_edges = 0;

    double fraction(const bucket_key& k) const {
        auto it = edges.find(k);
        return it == edges.end() || total_edges == 0 ? 0.0 : double(it->second) / double(total_edges);
    }
};

inline ontology_graph build_ontology(const graph& g) {
    const auto& nodes = g.node_labels();
    const auto& edge_store = g.edge_labels();
    struct key_hash {
        std::size_t operator()(const std::tuple<tuple_id, tuple_id, tuple_id>& k) const noexcept {
            const auto [a, b, c] = k;
            std::uint64_t h = (std::uint64_t{a} << 32) ^ b;
            h ^= std::uint64_t{c} * 0x9E3779B97F4A7C15ULL;
            return static_cast<std::size_t>(h ^ (h >> 29));
        }
    };
    std::unordered_map<std::tuple<tuple_id, tuple_id, tuple_id>, std::uint64_t, key_hash> counts;
    const auto edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        ++counts[{nodes.tuple_of(edges[i].source), nodes.tuple_of(edges[i].target),
                  edge_store.tuple_of(static_cast<entity_id>(i))}];
    }

    ontology_graph o;
    o.total_edges = edges.size();
    std::unordered_map<tuple_id, std::string> node_sig, edge_sig;
    auto sig = [&](std::unordered_map<tuple_id, std::string>& cache, const label_store& store, tuple_id t) {
        auto it = cache.find(t);
        if (it == cache.end())
            it = cache.emplace(t, signature(g.dictionary(), store.registry().labels_of_tuple(t))).first;
        return it->second;
    };
    std::vector<std::string> names;
    nodes.registry().for_each_live([&](tuple_id t, auto) { names.push_back(sig(node_sig, nodes, t)); });
    for (const auto& [k, n] : counts) {
        const auto& [s, d, e] = k;
        auto src = sig(node_sig, nodes, s);
        auto dst = sig(node_sig, nodes, d);
        names.push_back(src);
        names.push_back(dst);
        o.edges[{std::move(src), std::move(dst), sig(edge_sig, edge_store, e)}] += n;
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    o.nodes = std::move(names);
    return o;
}

namespace detail {

inline std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

// count / total as a percentage with one decimal, rounded half up.
inline std::string percent_1dp(std::uint64_t count, std::uint64_t total) {
    const auto tenths = (count * 2000 + total) / (2 * total);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

} // namespace detail

inline std::string emit_dot(const ontology_graph& o) {
    std::string out = "// label ontology: " + std::to_string(o.nodes.size()) + " node signatures, " +
                      std::to_string(o.edges.size()) + " edge buckets, " + std::to_string(o.total_edges) +
                      " edges\n";
    if (o.nodes.empty() && o.edges.empty()) return out + "digraph G { }\n";
    out += "digraph G {\n";
    for (const auto& n : o.nodes) out += "  " + detail::dot_quote(n) + ";\n";
    for (const auto& [k, count] : o.edges) {
        std::string label = k.edge_label.empty() ? "" : k.edge_label + " ";
        label += detail::percent_1dp(count, o.total_edges);
        out += "  " + detail::dot_quote(k.source) + " -> " + detail::dot_quote(k.target) +
               " [label=" + detail::dot_quote(label) + "];\n";
    }
    return out + "}\n";
}

struct cluster_assignment {
    std::map<std::string, std::size_t> cluster_of;
    std::size_t cluster_count = 0;
    double modularity = 0.0;
};

// Undirected weighted view of the ontology used for clustering. Self-loops
// are stored doubled (a loop contributes twice to its node's degree).
struct label_graph {
    std::vector<std::string> nodes;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;

    static label_graph from(const ontology_graph& o) {
        label_graph lg;
        lg.nodes = o.nodes;
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < lg.nodes.size(); ++i) index[lg.nodes[i]] = i;
        std::map<std::pair<std::size_t, std::size_t>, double> w;
        for (const auto& [k, count] : o.edges) {
            const auto a = index.at(k.source), b = index.at(k.target);
            if (a == b) {
                w[{a, a}] += 2.0 * double(count);
            } else {
                w[{a, b}] += double(count);
                w[{b, a}] += double(count);
            }
        }
        lg.adj.resize(lg.nodes.size());
        for (const auto& [ij, weight] : w) lg.adj[ij.first].push_back({ij.second, weight});
        return lg;
    }
};

namespace detail {

struct louvain_level {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
};

// One local-moving phase. Returns true if any node changed community.
inline bool louvain_local_moves(const louvain_level& lvl, std::vector<std::size_t>& comm, std::mt19937_64& rng) {
    const auto n = lvl.adj.size();
    std::vector<double> k(n, 0.0);
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : lvl.adj[i]) k[i] += w;
        m2 += k[i];
    }
    if (m2 <= 0.0) return false;

    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += k[i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;
    for (bool moved = true; moved;) {
        moved = false;
        for (std::size_t i : order) {
            const auto own = comm[i];
            tot[own] -= k[i];
            touched.clear();
            touched.push_back(own);
            for (const auto& [j, w] : lvl.adj[i]) {
                if (j == i) continue;
                if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
                link[comm[j]] += w;
            }
            auto gain = [&](std::size_t c) { return link[c] - tot[c] * k[i] / m2; };
            std::size_t best = own;
            double best_gain = gain(own);
            for (std::size_t c : touched) {
                const double g = gain(c);
                if (g > best_gain + 1e-12 || (std::abs(g - best_gain) <= 1e-12 && c < best && best != own)) {
                    best = c;
                    best_gain = g;
                }
            }
            for (std::size_t c : touched) link[c] = 0.0;
            tot[best] += k[i];
            if (best != own) {
                comm[i] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

} // namespace detail

// Modularity of a partition of the symmetrized label graph.
inline double modularity(const label_graph& lg, const std::vector<std::size_t>& comm) {
    const auto n = lg.adj.size();
    std::vector<double> k(n, 0.0);
    double m2 = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : lg.adj[i]) {
            k[i] += w;
            if (comm[i] == comm[j]) inside += w;
        }
        m2 += k[i];
    }
    if (m2 <= 0.0) return 0.0;
    std::map<std::size_t, double> tot;
    for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += k[i];
    double expected = 0.0;
    for (const auto& [c, t] : tot) expected += t * t;
    return inside / m2 - expected / (m2 * m2);
}

inline cluster_assignment louvain(const ontology_graph& o, std::uint64_t seed) {
    if (o.nodes.empty()) fail(errc::empty_graph, "ontology has no nodes");
    const auto lg = label_graph::from(o);
    std::mt19937_64 rng(seed);

    const auto n = lg.nodes.size();
    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), 0);

    detail::louvain_level lvl{lg.adj};
    while (true) {
        std::vector<std::size_t> comm(lvl.adj.size());
        std::iota(comm.begin(), comm.end(), 0);
        if (!detail::louvain_local_moves(lvl, comm, rng)) break;

        std::vector<std::size_t> dense(lvl.adj.size(), SIZE_MAX);
        std::size_t next = 0;
        for (auto& c : comm) {
            if (dense[c] == SIZE_MAX) dense[c] = next++;
            c = dense[c];
        }
        for (auto& m : membership) m = comm[m];

        std::vector<std::map<std::size_t, double>> agg(next);
        for (std::size_t i = 0; i < lvl.adj.size(); ++i)
            for (const auto& [j, w] : lvl.adj[i]) agg[comm[i]][comm[j]] += w;
        detail::louvain_level up;
        up.adj.resize(next);
        for (std::size_t c = 0; c < next; ++c)
            for (const auto& [d, w] : agg[c]) up.adj[c].push_back({d, w});
        lvl = std::move(up);
        if (next == 1) break;
    }

    cluster_assignment out;
    std::vector<std::size_t> dense(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        auto& d = dense[membership[i]];
        if (d == SIZE_MAX) d = out.cluster_count++;
        membership[i] = d;
        out.cluster_of[lg.nodes[i]] = d;
    }
    out.modularity = modularity(lg, membership);
    return out;
}

struct partition_result {
    std::size_t partition_count = 1;
    std::vector<std::uint32_t> node_partition;
    std::vector<std::uint32_t> edge_partition;
    std::vector<std::uint64_t> node_counts;
    std::uint64_t cut_edges = 0;
};

// Node partition = cluster of its label signature mod k; unlabeled nodes and
// nodes whose signature was not clustered fall back to id mod k. Edges follow
// their source node.
inline partition_result partition_assign(const graph& g, const cluster_assignment& c, std::size_t k) {
    if (k == 0) fail(errc::invalid_query, "partition count must be >= 1");
    const auto& nodes = g.node_labels();
    std::vector<std::int64_t> by_tuple(nodes.registry().slot_capacity(), -1);
    nodes.registry().for_each_live([&](tuple_id t, auto labels) {
        if (auto it = c.cluster_of.find(signature(g.dictionary(), labels)); it != c.cluster_of.end())
            by_tuple[t] = static_cast<std::int64_t>(it->second % k);
    });

    partition_result r;
    r.partition_count = k;
    r.node_counts.assign(k, 0);
    r.node_partition.resize(g.node_count());
    for (entity_id v = 0; v < g.node_count(); ++v) {
        const auto t = nodes.tuple_of(v);
        const auto p = t != no_tuple && by_tuple[t] >= 0 ? std::size_t(by_tuple[t]) : v % k;
        r.node_partition[v] = static_cast<std::uint32_t>(p);
        ++r.node_counts[p];
    }
    const auto edges = g.edges();
    r.edge_partition.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        r.edge_partition[i] = r.node_partition[edges[i].source];
        if (r.node_partition[edges[i].source] != r.node_partition[edges[i].target]) ++r.cut_edges;
    }
    return r;
}

} // namespace kglb

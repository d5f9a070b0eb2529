#pragma once
// Directed multigraph topology plus the node and edge label stores.
//
// Edges are kept in insertion order; adjacency is a CSR view (offsets +
// edge ids, stable by edge id) rebuilt lazily after the edge array changes.

#include "kglb/dictionary.hpp"
#include "kglb/label_store.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kglb {

struct edge {
    entity_id source;
    entity_id target;
    friend bool operator==(const edge&, const edge&) = default;
};

enum class direction { out, in, both };

class graph {
public:
    graph()
        : dict_(std::make_unique<label_dictionary>()),
          node_labels_(*dict_, 0),
          edge_labels_(*dict_, 0),
          adjacency_(std::make_unique<adjacency_cache>()) {}

    graph(graph&&) noexcept = default;
    graph& operator=(graph&&) noexcept = default;
    graph(const graph&) = delete;
    graph& operator=(const graph&) = delete;

    std::size_t node_count() const noexcept { return node_labels_.capacity(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    // Returns the node with this key, creating it on first sight.
    entity_id add_node(std::string_view key) {
        if (key.empty()) fail(errc::invalid_label, "empty node key");
        if (auto it = key_index_.find(std::string(key)); it != key_index_.end()) return it->second;
        const auto id = static_cast<entity_id>(node_count());
        resize_nodes(node_count() + 1);
        node_keys_.resize(node_count());
        node_keys_[id] = std::string(key);
        key_index_.emplace(node_keys_[id], id);
        return id;
    }

    std::optional<entity_id> find_node(std::string_view key) const {
        if (auto it = key_index_.find(std::string(key)); it != key_index_.end()) return it->second;
        return std::nullopt;
    }

    // External name of a node: its key, or its decimal id when anonymous.
    std::string node_key(entity_id v) const {
        check_node(v);
        if (v < node_keys_.size() && !node_keys_[v].empty()) return node_keys_[v];
        return std::to_string(v);
    }

    bool has_key(entity_id v) const noexcept { return v < node_keys_.size() && !node_keys_[v].empty(); }

    // Grows the node set with anonymous nodes.
    void resize_nodes(std::size_t new_count) {
        if (new_count < node_count()) fail(errc::capacity_exceeded, "node count cannot shrink");
        node_labels_.resize(new_count);
        invalidate_adjacency();
    }

    entity_id append_edge(entity_id source, entity_id target) {
        check_node(source);
        check_node(target);
        if (edges_.size() + 1 >= no_entity) fail(errc::capacity_exceeded, "edge id space exhausted");
        const auto id = static_cast<entity_id>(edges_.size());
        edges_.push_back({source, target});
        edge_labels_.resize(edges_.size());
        invalidate_adjacency();
        return id;
    }

    // Bulk edge append; grows the edge label store once.
    void append_edges(std::span<const edge> batch) {
        for (const auto& e : batch) {
            check_node(e.source);
            check_node(e.target);
        }
        if (edges_.size() + batch.size() >= no_entity) fail(errc::capacity_exceeded, "edge id space exhausted");
        edges_.insert(edges_.end(), batch.begin(), batch.end());
        edge_labels_.resize(edges_.size());
        invalidate_adjacency();
    }

    const edge& edge_at(entity_id e) const {
        if (e >= edges_.size()) fail(errc::unknown_entity, "edge " + std::to_string(e));
        return edges_[e];
    }
    std::span<const edge> edges() const noexcept { return edges_; }

    // Edge ids leaving / entering v, in edge insertion order.
    std::span<const entity_id> out_edges(entity_id v) const {
        check_node(v);
        const auto& a = adjacency();
        return std::span<const entity_id>(a.out_edges).subspan(a.out_offsets[v], a.out_offsets[v + 1] - a.out_offsets[v]);
    }
    std::span<const entity_id> in_edges(entity_id v) const {
        check_node(v);
        const auto& a = adjacency();
        return std::span<const entity_id>(a.in_edges).subspan(a.in_offsets[v], a.in_offsets[v + 1] - a.in_offsets[v]);
    }

    std::vector<entity_id> out_neighbors(entity_id v) const {
        std::vector<entity_id> out;
        for (entity_id e : out_edges(v)) out.push_back(edges_[e].target);
        return out;
    }
    std::vector<entity_id> in_neighbors(entity_id v) const {
        std::vector<entity_id> out;
        for (entity_id e : in_edges(v)) out.push_back(edges_[e].source);
        return out;
    }

    // Builds the adjacency view now so later concurrent readers never race
    // on the lazy rebuild.
    void freeze() const { (void)adjacency(); }

    label_dictionary& dictionary() noexcept { return *dict_; }
    const label_dictionary& dictionary() const noexcept { return *dict_; }
    label_store& node_labels() noexcept { return node_labels_; }
    const label_store& node_labels() const noexcept { return node_labels_; }
    label_store& edge_labels() noexcept { return edge_labels_; }
    const label_store& edge_labels() const noexcept { return edge_labels_; }

    std::span<const std::string> node_keys() const noexcept { return node_keys_; }

    void validate() const {
        for (const auto& e : edges_)
            if (e.source >= node_count() || e.target >= node_count())
                fail(errc::corrupt_snapshot, "edge endpoint out of range");
        if (edge_labels_.capacity() != edges_.size()) fail(errc::corrupt_snapshot, "edge label capacity mismatch");
        if (node_keys_.size() > node_count()) fail(errc::corrupt_snapshot, "more node keys than nodes");
        node_labels_.validate();
        edge_labels_.validate();
    }

    // Reassembles a graph from persisted parts. The label stores must have
    // been restored against the dictionary passed in.
    static graph restore(std::unique_ptr<label_dictionary> dict,
                         const std::function<label_store(label_dictionary&)>& make_nodes,
                         const std::function<label_store(label_dictionary&)>& make_edges,
                         std::vector<std::string> node_keys, std::vector<edge> edges) {
        graph g;
        g.dict_ = std::move(dict);
        g.node_labels_ = make_nodes(*g.dict_);
        g.edge_labels_ = make_edges(*g.dict_);
        g.node_keys_ = std::move(node_keys);
        g.edges_ = std::move(edges);
        for (std::size_t v = 0; v < g.node_keys_.size(); ++v) {
            if (g.node_keys_[v].empty()) continue;
            if (!g.key_index_.emplace(g.node_keys_[v], static_cast<entity_id>(v)).second)
                fail(errc::corrupt_snapshot, "duplicate node key '" + g.node_keys_[v] + "'");
        }
        g.validate();
        return g;
    }

private:
    struct adjacency_cache {
        std::mutex mutex;
        std::atomic<bool> valid{false};
        std::vector<std::size_t> out_offsets, in_offsets;
        std::vector<entity_id> out_edges, in_edges;
    };

    void check_node(entity_id v) const {
        if (v >= node_count()) fail(errc::unknown_entity, "node " + std::to_string(v));
    }

    void invalidate_adjacency() noexcept { adjacency_->valid.store(false, std::memory_order_release); }

    const adjacency_cache& adjacency() const {
        auto& a = *adjacency_;
        if (a.valid.load(std::memory_order_acquire)) return a;
        std::lock_guard lock(a.mutex);
        if (a.valid.load(std::memory_order_relaxed)) return a;
        const std::size_t n = node_count();
        auto build = [&](std::vector<std::size_t>& offsets, std::vector<entity_id>& ids, bool by_source) {
            offsets.assign(n + 1, 0);
            for (const auto& e : edges_) ++offsets[(by_source ? e.source : e.target) + 1];
            for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
            ids.resize(edges_.size());
            std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
            for (std::size_t i = 0; i < edges_.size(); ++i) {
                const auto v = by_source ? edges_[i].source : edges_[i].target;
                ids[cursor[v]++] = static_cast<entity_id>(i);
            }
        };
        build(a.out_offsets, a.out_edges, true);
        build(a.in_offsets, a.in_edges, false);
        a.valid.store(true, std::memory_order_release);
        return a;
    }

    std::unique_ptr<label_dictionary> dict_;
    label_store node_labels_;
    label_store edge_labels_;
    std::vector<std::string> node_keys_;
    std::unordered_map<std::string, entity_id> key_index_;
    std::vector<edge> edges_;
    std::unique_ptr<adjacency_cache> adjacency_;
};

} // namespace kglb

#pragma once
// Synthetic graph generation and the hashed key-value baseline the label
// store is measured against. The baseline answers the same label queries,
// so every comparison run doubles as a correctness cross-check.

#include "kglb/graph.hpp"
#include "kglb/query.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kglb {

struct synthetic_spec {
    enum class count_distribution { fixed, zipf };

    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::size_t node_label_universe = 16;
    std::size_t edge_label_universe = 34;
    // Labels per entity: exactly k ("fixed"), or k' in [1, k] with
    // P(k') ~ 1 / k'^s ("zipf").
    std::size_t labels_per_node = 2;
    std::size_t labels_per_edge = 1;
    count_distribution distribution = count_distribution::fixed;
    double zipf_exponent = 1.0;
    std::uint64_t seed = 42;

    // Comparison workload.
    std::size_t relabel_ops = 1000;
    std::size_t label_queries = 100;
    std::size_t all_queries = 100;
    std::size_t hop_queries = 10;
    std::size_t max_hops = 3;

    void validate() const {
        auto bad = [](const std::string& what) { fail(errc::spec_error, what); };
        if (edge_count > 0 && node_count == 0) bad("edges need at least one node");
        if (labels_per_node > 0 && node_label_universe == 0) bad("node label universe must be >= 1");
        if (labels_per_edge > 0 && edge_label_universe == 0) bad("edge label universe must be >= 1");
        if (labels_per_node > node_label_universe) bad("labels_per_node exceeds the node label universe");
        if (labels_per_edge > edge_label_universe) bad("labels_per_edge exceeds the edge label universe");
        if (node_count >= no_entity || edge_count >= no_entity) bad("entity count exceeds id width");
        if (zipf_exponent < 0) bad("zipf exponent must be >= 0");
    }
};

inline synthetic_spec parse_synthetic_spec(const nlohmann::json& j) {
    synthetic_spec s;
    try {
        s.node_count = j.value("node_count", s.node_count);
        s.edge_count = j.value("edge_count", s.edge_count);
        s.node_label_universe = j.value("node_label_universe", s.node_label_universe);
        s.edge_label_universe = j.value("edge_label_universe", s.edge_label_universe);
        s.labels_per_node = j.value("labels_per_node", s.labels_per_node);
        s.labels_per_edge = j.value("labels_per_edge", s.labels_per_edge);
        const auto dist = j.value("distribution", std::string("fixed"));
        if (dist == "fixed") s.distribution = synthetic_spec::count_distribution::fixed;
        else if (dist == "zipf") s.distribution = synthetic_spec::count_distribution::zipf;
        else fail(errc::spec_error, "unknown distribution '" + dist + "'");
        s.zipf_exponent = j.value("zipf_exponent", s.zipf_exponent);
        s.seed = j.value("seed", s.seed);
        if (j.contains("workload")) {
            const auto& w = j.at("workload");
            s.relabel_ops = w.value("relabel_ops", s.relabel_ops);
            s.label_queries = w.value("label_queries", s.label_queries);
            s.all_queries = w.value("all_queries", s.all_queries);
            s.hop_queries = w.value("hop_queries", s.hop_queries);
            s.max_hops = w.value("max_hops", s.max_hops);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::spec_error, e.what());
    }
    s.validate();
    return s;
}

inline std::string node_label_name(std::size_t i) { return "NL" + std::to_string(i); }
inline std::string edge_label_name(std::size_t i) { return "EL" + std::to_string(i); }

namespace detail {

class label_sampler {
public:
    label_sampler(std::size_t universe, std::size_t k, const synthetic_spec& s, std::string (*name)(std::size_t))
        : k_(k), pool_(universe) {
        for (std::size_t i = 0; i < universe; ++i) names_.push_back(name(i));
        std::iota(pool_.begin(), pool_.end(), std::size_t{0});
        if (s.distribution == synthetic_spec::count_distribution::zipf && k > 0) {
            std::vector<double> w;
            for (std::size_t c = 1; c <= k; ++c) w.push_back(1.0 / std::pow(double(c), s.zipf_exponent));
            counts_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
            zipf_ = true;
        }
    }

    // k distinct labels by partial Fisher-Yates over the universe.
    const std::vector<std::string_view>& draw(std::mt19937_64& rng) {
        const std::size_t k = zipf_ ? counts_(rng) + 1 : k_;
        out_.clear();
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool_.size() - 1);
            std::swap(pool_[i], pool_[pick(rng)]);
            out_.push_back(names_[pool_[i]]);
        }
        return out_;
    }

private:
    std::size_t k_;
    bool zipf_ = false;
    std::discrete_distribution<std::size_t> counts_;
    std::vector<std::size_t> pool_;
    std::vector<std::string> names_;
    std::vector<std::string_view> out_;
};

} // namespace detail

// Deterministic for a given spec: same seed, same graph, same snapshot bytes.
inline graph generate(const synthetic_spec& spec) {
    spec.validate();
    graph g;
    std::mt19937_64 rng(spec.seed);
    // Pin label ids to universe order.
    for (std::size_t i = 0; i < spec.node_label_universe; ++i) g.dictionary().intern(node_label_name(i));
    for (std::size_t i = 0; i < spec.edge_label_universe; ++i) g.dictionary().intern(edge_label_name(i));

    g.resize_nodes(spec.node_count);
    if (spec.labels_per_node > 0) {
        detail::label_sampler sampler(spec.node_label_universe, spec.labels_per_node, spec, node_label_name);
        for (entity_id v = 0; v < spec.node_count; ++v) g.node_labels().add_labels(v, sampler.draw(rng));
    }

    constexpr std::size_t batch_size = 1 << 16;
    std::vector<edge> batch;
    batch.reserve(batch_size);
    std::uniform_int_distribution<entity_id> endpoint(0, spec.node_count ? entity_id(spec.node_count - 1) : 0);
    for (std::size_t i = 0; i < spec.edge_count; ++i) {
        const entity_id s = endpoint(rng);
        const entity_id t = endpoint(rng);
        batch.push_back({s, t});
        if (batch.size() == batch_size) {
            g.append_edges(batch);
            batch.clear();
        }
    }
    g.append_edges(batch);
    if (spec.labels_per_edge > 0) {
        detail::label_sampler sampler(spec.edge_label_universe, spec.labels_per_edge, spec, edge_label_name);
        for (entity_id e = 0; e < spec.edge_count; ++e) g.edge_labels().add_labels(e, sampler.draw(rng));
    }
    g.freeze();
    return g;
}

// Conventional hashed containers: label -> entity set and entity -> label set.
class baseline_store {
public:
    void add_label(entity_id e, const std::string& label) {
        by_label_[label].insert(e);
        by_entity_[e].insert(label);
    }

    void remove_label(entity_id e, const std::string& label) {
        if (auto it = by_label_.find(label); it != by_label_.end()) {
            it->second.erase(e);
            if (it->second.empty()) by_label_.erase(it);
        }
        if (auto it = by_entity_.find(e); it != by_entity_.end()) {
            it->second.erase(label);
            if (it->second.empty()) by_entity_.erase(it);
        }
    }

    std::vector<std::string> labels_of(entity_id e) const {
        std::vector<std::string> out;
        if (auto it = by_entity_.find(e); it != by_entity_.end()) out.assign(it->second.begin(), it->second.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<entity_id> entities_with_label(const std::string& label) const {
        std::vector<entity_id> out;
        if (auto it = by_label_.find(label); it != by_label_.end()) out.assign(it->second.begin(), it->second.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<entity_id> entities_with_all(const std::vector<std::string>& labels) const {
        if (labels.empty()) fail(errc::invalid_query, "label set is empty");
        const std::unordered_set<entity_id>* smallest = nullptr;
        for (const auto& l : labels) {
            auto it = by_label_.find(l);
            if (it == by_label_.end()) return {};
            if (!smallest || it->second.size() < smallest->size()) smallest = &it->second;
        }
        std::vector<entity_id> out;
        for (entity_id e : *smallest) {
            const auto& mine = by_entity_.at(e);
            if (std::all_of(labels.begin(), labels.end(), [&](const auto& l) { return mine.count(l) != 0; }))
                out.push_back(e);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Counted bytes: node payload + chain pointer (+ cached hash for string
    // keys) per element, one pointer per bucket, heap bytes of long strings.
    std::size_t memory_bytes() const noexcept {
        constexpr std::size_t ptr = sizeof(void*);
        auto round8 = [](std::size_t n) { return (n + 7) / 8 * 8; };
        auto heap = [](const std::string& s) { return s.size() > 15 ? s.size() + 1 : 0; };
        std::size_t bytes = (by_label_.bucket_count() + by_entity_.bucket_count()) * ptr;
        for (const auto& [label, set] : by_label_) {
            bytes += round8(ptr + sizeof(std::string) + sizeof(set) + sizeof(std::size_t)) + heap(label);
            bytes += set.bucket_count() * ptr + set.size() * round8(ptr + sizeof(entity_id));
        }
        for (const auto& [e, set] : by_entity_) {
            bytes += round8(ptr + sizeof(entity_id) + sizeof(set));
            bytes += set.bucket_count() * ptr;
            for (const auto& s : set) bytes += round8(ptr + sizeof(std::string) + sizeof(std::size_t)) + heap(s);
        }
        return bytes;
    }

private:
    std::unordered_map<std::string, std::unordered_set<entity_id>> by_label_;
    std::unordered_map<entity_id, std::unordered_set<std::string>> by_entity_;
};

namespace detail {

inline std::size_t rss_kib() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("VmRSS:", 0) == 0) return std::stoul(line.substr(6));
    return 0;
}

class stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

inline baseline_store build_baseline(const graph& g) {
    baseline_store b;
    for (entity_id v = 0; v < g.node_count(); ++v)
        for (const auto& l : g.node_labels().labels_of(v)) b.add_label(v, l);
    return b;
}

// Runs the same node-label workload on the label store and the baseline,
// timing each side and cross-checking every answer.
inline nlohmann::json compare(const synthetic_spec& spec) {
    using nlohmann::json;
    detail::stopwatch gen_clock;
    graph g = generate(spec);
    const double gen_ms = gen_clock.elapsed_ms();

    detail::stopwatch base_clock;
    baseline_store base = build_baseline(g);
    const double base_build_ms = base_clock.elapsed_ms();

    std::mt19937_64 rng(spec.seed ^ 0x5bd1e995ULL);
    auto mismatch = [](const std::string& what) { fail(errc::correctness_failure, what); };
    json timings = json::object();

    if (spec.node_count > 0 && spec.node_label_universe > 0) {
        std::uniform_int_distribution<entity_id> pick_node(0, entity_id(spec.node_count - 1));
        std::uniform_int_distribution<std::size_t> pick_label(0, spec.node_label_universe - 1);

        struct op {
            entity_id e;
            std::string label;
            bool add;
        };
        std::vector<op> ops;
        for (std::size_t i = 0; i < spec.relabel_ops; ++i)
            ops.push_back({pick_node(rng), node_label_name(pick_label(rng)), (rng() & 1) != 0});
        double store_ms = 0, base_ms = 0;
        {
            detail::stopwatch w;
            for (const auto& o : ops) {
                if (o.add) g.node_labels().add_label(o.e, o.label);
                else g.node_labels().remove_label(o.e, o.label);
            }
            store_ms = w.elapsed_ms();
        }
        {
            detail::stopwatch w;
            for (const auto& o : ops) {
                if (o.add) base.add_label(o.e, o.label);
                else base.remove_label(o.e, o.label);
            }
            base_ms = w.elapsed_ms();
        }
        for (const auto& o : ops)
            if (g.node_labels().labels_of(o.e) != base.labels_of(o.e))
                mismatch("labels_of(" + std::to_string(o.e) + ") differs after relabeling");
        timings["relabel"] = {{"ops", ops.size()}, {"label_store_ms", store_ms}, {"baseline_ms", base_ms}};

        std::vector<std::string> singles;
        for (std::size_t i = 0; i < spec.label_queries; ++i) singles.push_back(node_label_name(pick_label(rng)));
        std::vector<std::vector<entity_id>> a, b;
        {
            detail::stopwatch w;
            for (const auto& l : singles) a.push_back(g.node_labels().entities_with_label(l));
            store_ms = w.elapsed_ms();
        }
        {
            detail::stopwatch w;
            for (const auto& l : singles) b.push_back(base.entities_with_label(l));
            base_ms = w.elapsed_ms();
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::sort(a[i].begin(), a[i].end());
            if (a[i] != b[i]) mismatch("entities_with_label(" + singles[i] + ") differs");
        }
        timings["entities_with_label"] = {
            {"queries", singles.size()}, {"label_store_ms", store_ms}, {"baseline_ms", base_ms}};

        std::vector<std::vector<std::string>> pairs;
        for (std::size_t i = 0; i < spec.all_queries; ++i)
            pairs.push_back({node_label_name(pick_label(rng)), node_label_name(pick_label(rng))});
        a.clear();
        b.clear();
        {
            detail::stopwatch w;
            for (const auto& p : pairs) {
                std::vector<label_id> ids;
                for (const auto& l : p) ids.push_back(*g.dictionary().find(l));
                std::sort(ids.begin(), ids.end());
                ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
                a.push_back(g.node_labels().entities_with_all(ids));
            }
            store_ms = w.elapsed_ms();
        }
        {
            detail::stopwatch w;
            for (const auto& p : pairs) b.push_back(base.entities_with_all(p));
            base_ms = w.elapsed_ms();
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::sort(a[i].begin(), a[i].end());
            if (a[i] != b[i]) mismatch("entities_with_all(" + pairs[i][0] + ", " + pairs[i][1] + ") differs");
        }
        timings["entities_with_all"] = {{"queries", pairs.size()}, {"label_store_ms", store_ms}, {"baseline_ms", base_ms}};

        if (spec.hop_queries > 0 && spec.edge_count > 0) {
            detail::stopwatch w;
            std::size_t paths = 0;
            for (std::size_t i = 0; i < spec.hop_queries; ++i) {
                hop_query q;
                q.source = pick_node(rng);
                q.max_hops = spec.max_hops;
                q.target_criteria = label_predicate{label_predicate::mode::any, {node_label_name(pick_label(rng))}};
                paths += n_hop(g, q, std::max(spec.max_hops, default_max_hops_cap)).paths.size();
            }
            timings["n_hop"] = {{"queries", spec.hop_queries}, {"max_hops", spec.max_hops}, {"paths", paths},
                                {"label_store_ms", w.elapsed_ms()}};
        }
    }

    const auto nm = g.node_labels().memory_report();
    const auto em = g.edge_labels().memory_report();
    auto mem_json = [](const label_store::memory& m) {
        return json{{"dls_slots", m.dls_slots},
                    {"dls_head", m.dls_head},
                    {"labels2index", m.registry.labels2index},
                    {"index2labels", m.registry.index2labels},
                    {"label2indices", m.registry.label2indices},
                    {"recycle", m.registry.recycle},
                    {"refcount", m.registry.refcount},
                    {"label_infrastructure", m.label_infrastructure()}};
    };
    return json{
        {"spec",
         {{"node_count", spec.node_count},
          {"edge_count", spec.edge_count},
          {"node_label_universe", spec.node_label_universe},
          {"edge_label_universe", spec.edge_label_universe},
          {"labels_per_node", spec.labels_per_node},
          {"labels_per_edge", spec.labels_per_edge},
          {"distribution", spec.distribution == synthetic_spec::count_distribution::fixed ? "fixed" : "zipf"},
          {"seed", spec.seed}}},
        {"generate_ms", gen_ms},
        {"baseline_build_ms", base_build_ms},
        {"memory",
         {{"node_label_store", mem_json(nm)},
          {"edge_label_store", mem_json(em)},
          {"dictionary", nm.dictionary},
          {"baseline_node_labels", base.memory_bytes()}}},
        {"timings", timings},
        {"correctness", "match"},
        {"rss_kib", detail::rss_kib()},
    };
}

} // namespace kglb

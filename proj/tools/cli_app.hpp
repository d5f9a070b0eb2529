#pragma once
// kglb command-line front end. run() is separate from main() so tests can
// drive every subcommand with captured streams.

#include "kglb/kglb.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace kglb::cli {

namespace detail {

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, path + ": " + e.what());
    }
}

// Writes text to a file, or to `out` when the path is "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(errc::io_error, "cannot write '" + path + "'");
    f << text;
}

inline nlohmann::json memory_json(const label_store::memory& m) {
    return {{"dls_slots", m.dls_slots},
            {"dls_head", m.dls_head},
            {"labels2index", m.registry.labels2index},
            {"index2labels", m.registry.index2labels},
            {"label2indices", m.registry.label2indices},
            {"recycle", m.registry.recycle},
            {"refcount", m.registry.refcount},
            {"label_infrastructure", m.label_infrastructure()}};
}

inline nlohmann::json store_stats(const label_store& s) {
    const auto& r = s.registry();
    return {{"entities", s.capacity()},
            {"labeled", s.labeled_count()},
            {"live_tuples", r.live_count()},
            {"maxid", r.maxid()},
            {"recycle_depth", r.recycle_stack().size()},
            {"memory", memory_json(s.memory_report())}};
}

inline nlohmann::json stats(const graph& g) {
    return {{"nodes", g.node_count()},
            {"edges", g.edge_count()},
            {"labels", g.dictionary().size()},
            {"dictionary_bytes", g.dictionary().memory_bytes()},
            {"node_labels", store_stats(g.node_labels())},
            {"edge_labels", store_stats(g.edge_labels())}};
}

inline nlohmann::json clusters_json(const cluster_assignment& c, std::uint64_t seed) {
    nlohmann::json clusters = nlohmann::json::object();
    for (const auto& [sig, idx] : c.cluster_of) clusters[sig] = idx;
    return {{"seed", seed}, {"cluster_count", c.cluster_count}, {"modularity", c.modularity}, {"clusters", clusters}};
}

inline nlohmann::json partition_json(const partition_result& p) {
    return {{"partition_count", p.partition_count}, {"node_counts", p.node_counts}, {"cut_edges", p.cut_edges}};
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kglb: tuple-indexed label store for property graphs", "kglb"};
    app.require_subcommand(1);

    std::string manifest, snap_out, graph_path, query_path, dot_path = "-", json_path = "-", report_path = "-",
                                                           spec_path;
    std::uint64_t seed = 42;
    std::size_t k = 2;
    bool json_mode = false;

    auto* ingest_cmd = app.add_subcommand("ingest", "build a snapshot from a manifest and delimited files");
    ingest_cmd->add_option("--manifest", manifest, "ingest manifest (JSON)")->required();
    ingest_cmd->add_option("--out", snap_out, "snapshot to write")->required();

    auto* query_cmd = app.add_subcommand("query", "run an n-hop label query");
    query_cmd->add_option("--graph", graph_path, "snapshot")->required();
    query_cmd->add_option("--query", query_path, "query document (JSON)")->required();
    query_cmd->add_flag("--json", json_mode, "emit JSON paths");

    auto* ontology_cmd = app.add_subcommand("ontology", "emit the label ontology as DOT");
    ontology_cmd->add_option("--graph", graph_path, "snapshot")->required();
    ontology_cmd->add_option("--dot", dot_path, "output file, '-' for stdout");

    auto* cluster_cmd = app.add_subcommand("cluster", "Louvain clustering of the label ontology");
    cluster_cmd->add_option("--graph", graph_path, "snapshot")->required();
    cluster_cmd->add_option("--seed", seed, "visit-order seed");
    cluster_cmd->add_option("--json", json_path, "output file, '-' for stdout");

    auto* partition_cmd = app.add_subcommand("partition", "assign entities to k partitions by label cluster");
    partition_cmd->add_option("--graph", graph_path, "snapshot")->required();
    partition_cmd->add_option("--k", k, "partition count")->check(CLI::PositiveNumber);
    partition_cmd->add_option("--seed", seed, "clustering seed");
    partition_cmd->add_option("--report", report_path, "cut report file, '-' for stdout");

    auto* dump_cmd = app.add_subcommand("dump", "load a snapshot and write it back out");
    dump_cmd->add_option("--graph", graph_path, "snapshot")->required();
    dump_cmd->add_option("--out", snap_out, "snapshot to write")->required();

    auto* load_cmd = app.add_subcommand("load", "load and validate a snapshot");
    load_cmd->add_option("--graph", graph_path, "snapshot")->required();

    auto* bench_cmd = app.add_subcommand("bench", "label store vs hashed baseline on a synthetic graph");
    bench_cmd->add_option("--spec", spec_path, "synthetic spec (JSON)")->required();
    bench_cmd->add_option("--report", report_path, "report file, '-' for stdout");

    auto* stats_cmd = app.add_subcommand("stats", "entity, tuple and memory statistics");
    stats_cmd->add_option("--graph", graph_path, "snapshot")->required();

    std::vector<std::string> argv_storage{"kglb"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    auto report_error = [&](std::string_view code, const std::string& message) {
        err << nlohmann::json{{"error", code}, {"message", message}}.dump() << "\n";
        return 1;
    };

    try {
        if (*ingest_cmd) {
            const auto g = ingest(std::filesystem::path(manifest));
            save_file(g, snap_out);
            err << "ingested " << g.node_count() << " nodes, " << g.edge_count() << " edges, "
                << g.dictionary().size() << " labels\n";
        } else if (*query_cmd) {
            const auto g = load_file(graph_path);
            const auto q = parse_hop_query(detail::read_json(query_path));
            const auto r = n_hop(g, q);
            if (json_mode) {
                out << to_json(g, r).dump() << "\n";
            } else {
                for (const auto& p : r.paths) {
                    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " -> " : "") << g.node_key(p[i]);
                    out << "\n";
                }
                if (r.truncated) err << "result truncated at " << q.max_paths << " paths\n";
            }
        } else if (*ontology_cmd) {
            const auto g = load_file(graph_path);
            detail::emit(dot_path, emit_dot(build_ontology(g)), out);
        } else if (*cluster_cmd) {
            const auto g = load_file(graph_path);
            const auto c = louvain(build_ontology(g), seed);
            detail::emit(json_path, detail::clusters_json(c, seed).dump(2) + "\n", out);
        } else if (*partition_cmd) {
            const auto g = load_file(graph_path);
            const auto c = louvain(build_ontology(g), seed);
            const auto p = partition_assign(g, c, k);
            detail::emit(report_path, detail::partition_json(p).dump(2) + "\n", out);
        } else if (*dump_cmd) {
            const auto g = load_file(graph_path);
            save_file(g, snap_out);
        } else if (*load_cmd) {
            std::vector<std::string> warnings;
            const auto g = load_file(graph_path, &warnings);
            for (const auto& w : warnings) err << "warning: " << w << "\n";
            out << nlohmann::json{{"valid", true},
                                  {"nodes", g.node_count()},
                                  {"edges", g.edge_count()},
                                  {"warnings", warnings}}
                       .dump()
                << "\n";
        } else if (*bench_cmd) {
            const auto spec = parse_synthetic_spec(detail::read_json(spec_path));
            detail::emit(report_path, compare(spec).dump(2) + "\n", out);
        } else if (*stats_cmd) {
            const auto g = load_file(graph_path);
            out << detail::stats(g).dump(2) << "\n";
        }
    } catch (const error& e) {
        return report_error(to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return report_error("Internal", e.what());
    }
    return 0;
}

} // namespace kglb::cli

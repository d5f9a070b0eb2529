#include "kglb/ingest.hpp"
#include "kglb/ontology.hpp"
#include "support/naive_oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

using namespace kglb;

namespace {

const auto wiki = std::filesystem::path(KGLB_DATA_DIR) / "wiki" / "manifest.json";

ontology_graph make_ontology(const std::vector<std::string>& nodes,
                             const std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>>& edges) {
    ontology_graph o;
    o.nodes = nodes;
    std::sort(o.nodes.begin(), o.nodes.end());
    for (const auto& [a, b, w] : edges) {
        o.edges[{nodes[a], nodes[b], "e"}] += w;
        o.total_edges += w;
    }
    return o;
}

std::vector<oracle::weighted_edge> oracle_edges(const ontology_graph& o) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < o.nodes.size(); ++i) idx[o.nodes[i]] = i;
    std::vector<oracle::weighted_edge> out;
    for (const auto& [k, c] : o.edges) out.push_back({idx[k.source], idx[k.target], double(c)});
    return out;
}

} // namespace

TEST(Ontology, SignatureOrdering) {
    label_dictionary d;
    const label_id male = d.intern("MALE"), chess = d.intern("chess");
    const std::vector<label_id> ids{male, chess};
    EXPECT_EQ(signature(d, ids), "chess:MALE");
    EXPECT_EQ(signature(d, {}), "");
}

TEST(Ontology, WikiSelfLoopShare) {
    const auto g = ingest(wiki);
    const auto o = build_ontology(g);
    EXPECT_EQ(o.total_edges, 5u);
    EXPECT_DOUBLE_EQ(o.fraction({"chess:MALE", "chess:MALE", "friend"}), 0.2);
    const auto dot = emit_dot(o);
    EXPECT_NE(dot.find(R"("chess:MALE" -> "chess:MALE" [label="friend 20.0%"];)"), std::string::npos);
}

TEST(Ontology, ZeroEdgesAndEmpty) {
    graph g;
    g.resize_nodes(2);
    g.node_labels().add_label(0, "a");
    const auto o = build_ontology(g);
    EXPECT_EQ(o.total_edges, 0u);
    EXPECT_TRUE(o.edges.empty());

    const auto dot = emit_dot(ontology_graph{});
    EXPECT_EQ(dot.substr(0, 2), "//");
    EXPECT_NE(dot.find("digraph G { }"), std::string::npos);
    EXPECT_THROW(louvain(ontology_graph{}, 1), error);
}

TEST(Ontology, PercentRounding) {
    EXPECT_EQ(detail::percent_1dp(1, 5), "20.0%");
    EXPECT_EQ(detail::percent_1dp(1, 3), "33.3%");
    EXPECT_EQ(detail::percent_1dp(2, 3), "66.7%");
    EXPECT_EQ(detail::percent_1dp(1, 2000), "0.1%");
    EXPECT_EQ(detail::percent_1dp(1, 8), "12.5%");
    EXPECT_EQ(detail::percent_1dp(3, 3), "100.0%");
}

// Parse the DOT back and check every bucket and node appears exactly once.
TEST(Ontology, DotParsesBack) {
    std::mt19937_64 rng(8);
    graph g;
    g.resize_nodes(60);
    for (entity_id v = 0; v < 60; ++v)
        if (rng() % 5) g.node_labels().add_label(v, "N" + std::to_string(rng() % 4));
    for (int i = 0; i < 300; ++i) {
        const auto e = g.append_edge(rng() % 60, rng() % 60);
        if (rng() % 4) g.edge_labels().add_label(e, "E\"" + std::to_string(rng() % 3));
    }
    const auto o = build_ontology(g);
    const auto dot = emit_dot(o);
    EXPECT_EQ(dot, emit_dot(build_ontology(g)));
    std::regex edge_re(R"re(^\s*"((?:[^"\\]|\\.)*)" -> "((?:[^"\\]|\\.)*)" \[label="(?:((?:[^"\\]|\\.)*) )?([0-9]+\.[0-9])%"\];$)re");
    std::size_t edges = 0;
    std::istringstream in(dot);
    std::string line;
    std::uint64_t counted = 0;
    while (std::getline(in, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, edge_re)) continue;
        ++edges;
        auto unq = [](std::string s) {
            std::string out;
            for (std::size_t i = 0; i < s.size(); ++i) out += s[i] == '\\' ? s[++i] : s[i];
            return out;
        };
        const ontology_graph::bucket_key k{unq(m[1]), unq(m[2]), unq(m[3])};
        ASSERT_TRUE(o.edges.count(k)) << line;
        counted += o.edges.at(k);
        EXPECT_NEAR(std::stod(m[4]), 100.0 * o.fraction(k), 0.05 + 1e-9);
    }
    EXPECT_EQ(edges, o.edges.size());
    EXPECT_EQ(counted, 300u);
}

TEST(Louvain, TwoDisjointCliques) {
    std::vector<std::string> nodes{"a", "b", "c", "d", "e", "f"};
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> edges;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            edges.push_back({i, j, 1});
            edges.push_back({i + 3, j + 3, 1});
        }
    const auto c = louvain(make_ontology(nodes, edges), 42);
    EXPECT_EQ(c.cluster_count, 2u);
    EXPECT_EQ(c.cluster_of.at("a"), c.cluster_of.at("c"));
    EXPECT_EQ(c.cluster_of.at("d"), c.cluster_of.at("f"));
    EXPECT_NE(c.cluster_of.at("a"), c.cluster_of.at("d"));
}

TEST(Louvain, DeterministicPerSeed) {
    const auto g = ingest(wiki);
    const auto o = build_ontology(g);
    const auto a = louvain(o, 9), b = louvain(o, 9);
    EXPECT_EQ(a.cluster_of, b.cluster_of);
    EXPECT_EQ(a.modularity, b.modularity);
}

TEST(Louvain, NearExhaustiveBestOnSmallGraphs) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        std::vector<std::string> nodes;
        for (std::size_t i = 0; i < n; ++i) nodes.push_back("s" + std::to_string(i));
        std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> edges;
        const auto m = 1 + rng() % (2 * n);
        for (std::size_t i = 0; i < m; ++i) edges.push_back({rng() % n, rng() % n, 1 + rng() % 5});
        const auto o = make_ontology(nodes, edges);
        const auto c = louvain(o, trial);
        const auto oe = oracle_edges(o);
        std::vector<std::size_t> comm;
        for (const auto& s : o.nodes) comm.push_back(c.cluster_of.at(s));
        EXPECT_NEAR(c.modularity, oracle::modularity(o.nodes.size(), oe, comm), 1e-9);
        EXPECT_GE(c.modularity, oracle::best_modularity(o.nodes.size(), oe) - 0.05) << "trial " << trial;
    }
}

TEST(Partition, SingleAndWikiCut) {
    const auto g = ingest(wiki);
    const auto c = louvain(build_ontology(g), 42);
    const auto one = partition_assign(g, c, 1);
    EXPECT_EQ(one.cut_edges, 0u);
    for (auto p : one.node_partition) EXPECT_EQ(p, 0u);

    const auto two = partition_assign(g, c, 2);
    std::uint64_t cut = 0;
    for (const auto& e : g.edges()) cut += two.node_partition[e.source] != two.node_partition[e.target];
    EXPECT_EQ(two.cut_edges, cut);
    for (std::size_t i = 0; i < g.edge_count(); ++i) EXPECT_EQ(two.edge_partition[i], two.node_partition[g.edges()[i].source]);
    EXPECT_EQ(two.node_counts[0] + two.node_counts[1], g.node_count());
    EXPECT_THROW(partition_assign(g, c, 0), error);
}

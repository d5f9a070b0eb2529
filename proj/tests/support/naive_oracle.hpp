#pragma once
// Deliberately simple reference models. Nothing here shares code with the
// library beyond plain integer ids.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// entity -> set of label strings
class label_sets {
public:
    explicit label_sets(std::size_t n) : sets_(n) {}

    void add(std::uint32_t e, const std::string& l) { sets_[e].insert(l); }
    void remove(std::uint32_t e, const std::string& l) { sets_[e].erase(l); }

    std::vector<std::string> labels_of(std::uint32_t e) const { return {sets_[e].begin(), sets_[e].end()}; }

    std::vector<std::uint32_t> with_label(const std::string& l) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t e = 0; e < sets_.size(); ++e)
            if (sets_[e].count(l)) out.push_back(e);
        return out;
    }

    std::vector<std::uint32_t> with_all(const std::vector<std::string>& ls) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t e = 0; e < sets_.size(); ++e)
            if (std::all_of(ls.begin(), ls.end(), [&](const auto& l) { return sets_[e].count(l) > 0; }))
                out.push_back(e);
        return out;
    }

    std::vector<std::uint32_t> with_any(const std::vector<std::string>& ls) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t e = 0; e < sets_.size(); ++e)
            if (std::any_of(ls.begin(), ls.end(), [&](const auto& l) { return sets_[e].count(l) > 0; }))
                out.push_back(e);
        return out;
    }

    std::size_t distinct_sets() const {
        std::set<std::set<std::string>> s;
        for (const auto& x : sets_)
            if (!x.empty()) s.insert(x);
        return s.size();
    }

    std::size_t size() const { return sets_.size(); }

private:
    std::vector<std::set<std::string>> sets_;
};

struct plain_edge {
    std::uint32_t s, t;
    std::set<std::string> labels;
};

// Every simple path from `source` of at most `max_hops` edges whose end node
// passes `is_target`, found by trying every node sequence. Sorted.
inline std::vector<std::vector<std::uint32_t>> all_paths(std::size_t n, const std::vector<plain_edge>& edges,
                                                         std::uint32_t source, std::size_t max_hops, bool forward,
                                                         bool backward,
                                                         const std::function<bool(std::uint32_t)>& is_target,
                                                         const std::function<bool(const plain_edge&)>& edge_ok) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> step;
    for (const auto& e : edges) {
        if (!edge_ok(e)) continue;
        if (forward) step.insert({e.s, e.t});
        if (backward) step.insert({e.t, e.s});
    }
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> path{source};
    std::function<void()> grow = [&] {
        if (is_target(path.back())) out.push_back(path);
        if (path.size() > max_hops) return;
        for (std::uint32_t w = 0; w < n; ++w) {
            if (!step.count({path.back(), w})) continue;
            if (std::find(path.begin(), path.end(), w) != path.end()) continue;
            path.push_back(w);
            grow();
            path.pop_back();
        }
    };
    grow();
    std::sort(out.begin(), out.end());
    return out;
}

// Undirected weighted multigraph modularity (self-loop weight counted twice
// in degree, once in the intra-community total).
struct weighted_edge {
    std::size_t a, b;
    double w;
};

inline double modularity(std::size_t n, const std::vector<weighted_edge>& edges, const std::vector<std::size_t>& comm) {
    double m = 0;
    std::vector<double> deg(n, 0.0);
    for (const auto& e : edges) {
        m += e.w;
        deg[e.a] += e.w;
        deg[e.b] += e.w;
    }
    if (m == 0) return 0;
    std::map<std::size_t, double> inner, dsum;
    for (const auto& e : edges)
        if (comm[e.a] == comm[e.b]) inner[comm[e.a]] += e.w;
    for (std::size_t i = 0; i < n; ++i) dsum[comm[i]] += deg[i];
    double q = 0;
    for (const auto& [c, d] : dsum) q += inner[c] / m - (d / (2 * m)) * (d / (2 * m));
    return q;
}

// Best modularity over every set partition (restricted growth strings).
inline double best_modularity(std::size_t n, const std::vector<weighted_edge>& edges) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> rgs(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            best = std::max(best, modularity(n, edges, rgs));
            return;
        }
        for (std::size_t c = 0; c <= used && c < n; ++c) {
            rgs[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0) return 0;
    rgs[0] = 0;
    rec(1, 1);
    return best;
}

} // namespace oracle

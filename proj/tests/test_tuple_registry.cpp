#include "kglb/tuple_registry.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace kglb;

namespace {

std::vector<label_id> L(std::initializer_list<label_id> l) { return l; }

errc code_of(auto&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    return errc::correctness_failure;
}

} // namespace

TEST(TupleRegistry, FirstSetIsOne) {
    tuple_registry r;
    const auto s = L({2, 8});
    const auto t = r.intern_label_set(s);
    EXPECT_EQ(t, 1u);
    r.acquire(t);
    const auto got = r.labels_of_tuple(1);
    EXPECT_EQ(std::vector<label_id>(got.begin(), got.end()), s);
    EXPECT_TRUE(r.labels_of_tuple(0).empty());
}

TEST(TupleRegistry, InternIdempotent) {
    tuple_registry r;
    const auto s = L({2, 8});
    const auto t = r.intern_label_set(s);
    r.acquire(t);
    EXPECT_EQ(r.intern_label_set(s), t);
    EXPECT_EQ(r.maxid(), 1u);
}

TEST(TupleRegistry, RejectsBadSets) {
    tuple_registry r;
    EXPECT_EQ(code_of([&] { r.intern_label_set(L({})); }), errc::invalid_label_set);
    EXPECT_EQ(code_of([&] { r.intern_label_set(L({8, 2})); }), errc::invalid_label_set);
    EXPECT_EQ(code_of([&] { r.intern_label_set(L({2, 2})); }), errc::invalid_label_set);
    EXPECT_EQ(code_of([&] { r.intern_label_set(L({0, 2})); }), errc::invalid_label_set);
}

TEST(TupleRegistry, RefcountLifecycle) {
    tuple_registry r;
    const auto t = r.intern_label_set(L({3}));
    r.acquire(t);
    r.acquire(t);
    EXPECT_FALSE(r.release(t));
    EXPECT_EQ(r.refcount(t), 1u);
    EXPECT_TRUE(r.is_live(t));
    EXPECT_TRUE(r.release(t));
    EXPECT_FALSE(r.is_live(t));
    EXPECT_EQ(code_of([&] { r.acquire(0); }), errc::unknown_tuple);
    EXPECT_EQ(code_of([&] { r.acquire(t); }), errc::unknown_tuple);
    EXPECT_EQ(code_of([&] { r.labels_of_tuple(t); }), errc::unknown_tuple);
    EXPECT_EQ(code_of([&] { r.release(t); }), errc::unknown_tuple);
}

TEST(TupleRegistry, FreedIdIsReusedFirst) {
    tuple_registry r;
    const auto a = r.intern_label_set(L({1}));
    r.acquire(a);
    const auto b = r.intern_label_set(L({2}));
    r.acquire(b);
    EXPECT_TRUE(r.release(a));
    const auto c = r.intern_label_set(L({5, 6}));
    EXPECT_EQ(c, a);
    EXPECT_EQ(r.maxid(), 2u);
    EXPECT_TRUE(r.tuples_with_label(1).empty());
}

TEST(TupleRegistry, TuplesWithLabel) {
    tuple_registry r;
    for (auto s : {L({2, 8}), L({1, 4}), L({1, 5}), L({3, 8})}) r.acquire(r.intern_label_set(s));
    const auto m = r.tuples_with_label(8);
    EXPECT_EQ(std::vector<tuple_id>(m.begin(), m.end()), (std::vector<tuple_id>{1, 4}));
    EXPECT_TRUE(r.tuples_with_label(77).empty());
    EXPECT_TRUE(r.tuples_with_label(6).empty());
}

// Replays random intern/release traffic against a model that tracks free ids
// on a LIFO stack.
TEST(TupleRegistry, MatchesFreeListModel) {
    std::mt19937_64 rng(3);
    tuple_registry r;
    std::map<std::vector<label_id>, tuple_id> model_ids;
    std::map<tuple_id, std::vector<label_id>> model_sets;
    std::map<tuple_id, std::size_t> model_refs;
    std::vector<tuple_id> free_ids;
    tuple_id model_max = 0;
    for (int i = 0; i < 20000; ++i) {
        if (rng() % 3 != 0 || model_refs.empty()) {
            std::set<label_id> s;
            const auto n = 1 + rng() % 3;
            while (s.size() < n) s.insert(1 + rng() % 6);
            std::vector<label_id> v(s.begin(), s.end());
            tuple_id expect;
            if (auto it = model_ids.find(v); it != model_ids.end()) {
                expect = it->second;
            } else if (!free_ids.empty()) {
                expect = free_ids.back();
                free_ids.pop_back();
            } else {
                expect = ++model_max;
            }
            model_ids[v] = expect;
            model_sets[expect] = v;
            ++model_refs[expect];
            ASSERT_EQ(r.intern_label_set(v), expect);
            r.acquire(expect);
        } else {
            auto it = model_refs.begin();
            std::advance(it, rng() % model_refs.size());
            const auto t = it->first;
            const bool freed = --it->second == 0;
            if (freed) {
                model_refs.erase(it);
                model_ids.erase(model_sets[t]);
                model_sets.erase(t);
                free_ids.push_back(t);
            }
            ASSERT_EQ(r.release(t), freed);
        }
        ASSERT_EQ(r.maxid(), model_max);
        ASSERT_EQ(r.live_count(), model_refs.size());
    }
    for (label_id l = 1; l <= 6; ++l) {
        std::vector<tuple_id> expect;
        for (const auto& [t, s] : model_sets)
            if (std::find(s.begin(), s.end(), l) != s.end()) expect.push_back(t);
        const auto got = r.tuples_with_label(l);
        EXPECT_EQ(std::vector<tuple_id>(got.begin(), got.end()), expect);
    }
    EXPECT_EQ(std::vector<tuple_id>(r.recycle_stack().begin(), r.recycle_stack().end()), free_ids);
}

TEST(TupleRegistry, MemoryReportCountsEveryPart) {
    tuple_registry r;
    r.acquire(r.intern_label_set(L({1, 2})));
    const auto m = r.memory_report();
    EXPECT_GT(m.labels2index, 0u);
    EXPECT_GT(m.index2labels, 0u);
    EXPECT_GT(m.label2indices, 0u);
    EXPECT_EQ(m.total(), m.labels2index + m.index2labels + m.label2indices + m.recycle + m.refcount);
}

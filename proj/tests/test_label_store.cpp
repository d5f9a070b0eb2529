#include "kglb/label_store.hpp"
#include "support/naive_oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kglb;

namespace {

const std::vector<std::string> seed_order{"Female", "chess", "golf", "dance", "business", "Gender", "Interest", "Male"};

label_dictionary seeded() {
    label_dictionary d;
    for (const auto& s : seed_order) d.intern(s);
    return d;
}

std::vector<entity_id> ring(const label_store& s, tuple_id t) {
    std::vector<entity_id> out;
    for (entity_id e : s.entities_with_tuple(t)) out.push_back(e);
    return out;
}

std::vector<entity_id> sorted(std::vector<entity_id> v) {
    std::sort(v.begin(), v.end());
    return v;
}

enum : entity_id { tom, alex, mary, lisa, jane };

} // namespace

// One label at a time: the intermediate singleton {chess} takes id 1 first,
// so the pair {chess, Male} ends up on id 2 and id 1 goes back on the stack.
TEST(LabelStore, LabelByLabelFollowsRegistryOrder) {
    auto d = seeded();
    label_store s(d, 5);
    for (entity_id e : {tom, alex}) {
        s.add_label(e, "chess");
        s.add_label(e, "Male");
    }
    EXPECT_EQ(s.tuple_of(tom), 2u);
    EXPECT_EQ(s.tuple_of(alex), 2u);
    EXPECT_EQ(ring(s, 2), (std::vector<entity_id>{tom, alex}));
    EXPECT_EQ(std::vector<tuple_id>(s.registry().recycle_stack().begin(), s.registry().recycle_stack().end()),
              std::vector<tuple_id>{1});
    s.validate();
}

TEST(LabelStore, BatchAttachInternsOnce) {
    auto d = seeded();
    label_store s(d, 5);
    const std::vector<std::string> pair{"chess", "Male"};
    EXPECT_EQ(s.add_labels(tom, pair), 1u);
    EXPECT_EQ(s.add_labels(alex, pair), 1u);
    EXPECT_EQ(ring(s, 1), (std::vector<entity_id>{tom, alex}));
    EXPECT_EQ(s.labels_of(tom), (std::vector<std::string>{"Male", "chess"}));
    EXPECT_EQ(s.registry().maxid(), 1u);
}

TEST(LabelStore, WikiLabelQueries) {
    auto d = seeded();
    label_store s(d, 5);
    s.add_labels(tom, std::vector<std::string>{"Male", "chess"});
    s.add_labels(alex, std::vector<std::string>{"Male", "chess"});
    s.add_labels(mary, std::vector<std::string>{"Female", "dance"});
    s.add_labels(lisa, std::vector<std::string>{"Female", "business"});
    s.add_labels(jane, std::vector<std::string>{"Male", "golf"});
    const auto male = s.registry().tuples_with_label(8);
    EXPECT_EQ(std::vector<tuple_id>(male.begin(), male.end()), (std::vector<tuple_id>{1, 4}));
    EXPECT_EQ(sorted(s.entities_with_label("Male")), (std::vector<entity_id>{tom, alex, jane}));
    const std::vector<label_id> chess_male{2, 8};
    EXPECT_EQ(s.entities_with_all(chess_male), (std::vector<entity_id>{tom, alex}));
    EXPECT_TRUE(s.entities_with_label("never").empty());

    s.remove_label(jane, "golf");
    EXPECT_EQ(s.labels_of(jane), std::vector<std::string>{"Male"});
    s.resize(6);
    s.add_label(5, "Male");
    EXPECT_EQ(s.tuple_of(5), s.tuple_of(jane));
    s.validate();
}

TEST(LabelStore, RedundantAddIsNoOp) {
    auto d = seeded();
    label_store s(d, 2);
    const auto t = s.add_label(0, "chess");
    const auto gen = s.generation();
    const auto slots = std::vector<std::uint32_t>(s.slots().begin(), s.slots().end());
    EXPECT_EQ(s.add_label(0, "chess"), t);
    EXPECT_EQ(s.generation(), gen);
    EXPECT_EQ(std::vector<std::uint32_t>(s.slots().begin(), s.slots().end()), slots);
}

TEST(LabelStore, RemoveLastLabelUnlabels) {
    auto d = seeded();
    label_store s(d, 2);
    const auto t = s.add_label(1, "golf");
    EXPECT_EQ(s.remove_label(1, "golf"), no_tuple);
    EXPECT_TRUE(s.labels_of(1).empty());
    EXPECT_FALSE(s.registry().is_live(t));
    EXPECT_THROW(s.entities_with_tuple(t), error);
    EXPECT_TRUE(s.labels_of(0).empty());
    // never-attached label: no change at all
    s.add_label(0, "dance");
    const auto slots = std::vector<std::uint32_t>(s.slots().begin(), s.slots().end());
    s.remove_label(0, "golf");
    s.remove_label(0, "zzz");
    EXPECT_EQ(std::vector<std::uint32_t>(s.slots().begin(), s.slots().end()), slots);
    EXPECT_FALSE(d.find("zzz"));
}

TEST(LabelStore, Errors) {
    auto d = seeded();
    label_store s(d, 2);
    try {
        s.add_label(2, "chess");
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::unknown_entity);
    }
    try {
        s.add_label(0, "");
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_label);
    }
    try {
        s.entities_with_all(std::span<const label_id>{});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_query);
    }
}

TEST(LabelStore, FixedSlotFootprint) {
    for (std::size_t n : {1u, 10u, 1000u}) {
        for (std::size_t k = 0; k <= 8; ++k) {
            label_dictionary d;
            label_store s(d, n);
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < k; ++i) labels.push_back("L" + std::to_string(i));
            for (entity_id e = 0; e < n; ++e) s.add_labels(e, labels);
            EXPECT_EQ(s.slots().size(), 2 * n);
            EXPECT_EQ(s.memory_report().dls_slots, 2 * n * label_store::slot_width);
        }
    }
}

TEST(LabelStore, DoublingEntitiesDoublesSlots) {
    auto footprint = [](std::size_t n) {
        label_dictionary d;
        label_store s(d, n);
        for (entity_id e = 0; e < n; ++e)
            s.add_labels(e, std::vector<std::string>{"A" + std::to_string(e % 4), "B" + std::to_string(e % 3)});
        return s.memory_report();
    };
    const auto a = footprint(50000), b = footprint(100000);
    EXPECT_EQ(b.dls_slots, 2 * a.dls_slots);
    const double ratio = double(b.label_infrastructure() + b.dictionary) / double(a.label_infrastructure() + a.dictionary);
    EXPECT_GE(ratio, 1.95);
    EXPECT_LE(ratio, 2.05);
}

TEST(LabelStore, RandomWorkloadMatchesNaiveSets) {
    std::mt19937_64 rng(2024);
    label_dictionary d;
    constexpr std::size_t n = 1000, labels = 20;
    label_store s(d, n);
    oracle::label_sets ref(n);
    for (int i = 0; i < 100000; ++i) {
        const entity_id e = rng() % n;
        const auto l = "L" + std::to_string(rng() % labels);
        switch (rng() % 3) {
        case 0:
        case 1:
            s.add_label(e, l);
            ref.add(e, l);
            break;
        default:
            s.remove_label(e, l);
            ref.remove(e, l);
        }
        if (i % 997 == 0) {
            ASSERT_EQ(s.labels_of(e), ref.labels_of(e));
            ASSERT_EQ(sorted(s.entities_with_label(l)), ref.with_label(l));
        }
    }
    s.validate();
    for (entity_id e = 0; e < n; ++e) ASSERT_EQ(s.labels_of(e), ref.labels_of(e));
    for (std::size_t l = 0; l < labels; ++l) {
        const auto name = "L" + std::to_string(l);
        EXPECT_EQ(sorted(s.entities_with_label(name)), ref.with_label(name));
    }
    EXPECT_EQ(s.registry().live_count(), ref.distinct_sets());
}

TEST(LabelStore, AllAndAnyQueries) {
    std::mt19937_64 rng(99);
    label_dictionary d;
    label_store s(d, 300);
    oracle::label_sets ref(300);
    for (int i = 0; i < 3000; ++i) {
        const entity_id e = rng() % 300;
        const auto l = "L" + std::to_string(rng() % 8);
        s.add_label(e, l);
        ref.add(e, l);
    }
    for (int q = 0; q < 200; ++q) {
        std::vector<std::string> names;
        std::vector<label_id> ids;
        const auto k = 1 + rng() % 3;
        for (std::size_t i = 0; i < k; ++i) names.push_back("L" + std::to_string(rng() % 8));
        for (const auto& n : names) ids.push_back(*d.find(n));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        traversal_stats st;
        const auto all = sorted(s.entities_with_all(ids, &st));
        EXPECT_EQ(all, ref.with_all(names));
        EXPECT_EQ(st.entities_visited, all.size());
        EXPECT_EQ(sorted(s.entities_with_any(ids)), ref.with_any(names));
    }
}

TEST(LabelStore, SetLabelsReplaces) {
    label_dictionary d;
    label_store s(d, 3);
    s.add_labels(0, std::vector<std::string>{"a", "b"});
    s.set_labels(0, std::vector<std::string>{"c"});
    EXPECT_EQ(s.labels_of(0), std::vector<std::string>{"c"});
    s.set_labels(0, std::vector<std::string>{});
    EXPECT_EQ(s.tuple_of(0), no_tuple);
    EXPECT_EQ(s.registry().live_count(), 0u);
    s.validate();
}

TEST(LabelStore, ResizeKeepsLabels) {
    label_dictionary d;
    label_store s(d, 2);
    s.add_label(1, "x");
    s.resize(10);
    s.add_label(9, "x");
    EXPECT_EQ(sorted(s.entities_with_label("x")), (std::vector<entity_id>{1, 9}));
    EXPECT_THROW(s.resize(3), error);
    s.validate();
}

TEST(LabelStore, RecyclingKeepsMaxidAtPeak) {
    label_dictionary d;
    label_store s(d, 20);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        const entity_id e = rng() % 20;
        std::vector<std::string> set;
        const auto combo = rng() % 50;
        for (int b = 0; b < 6; ++b)
            if (combo >> b & 1) set.push_back("L" + std::to_string(b));
        if (set.empty()) set.push_back("L9");
        s.set_labels(e, set);
        ASSERT_LE(s.registry().maxid(), s.registry().peak_live());
    }
    EXPECT_LE(s.registry().peak_live(), 21u);
}

#pragma once
// label_store: entity <-> label-set association for one entity class.
//
// Every entity holds exactly one tuple id (its whole label set), so the
// many-to-many entity/label relation collapses into a unique entity -> tuple
// association that can be kept in place:
//
//   slots_[2e]     tuple the entity belongs to (0 = unlabeled)
//   slots_[2e + 1] next entity in the same tuple's ring (no_entity ends it)
//   head_[t]       cached first entity of tuple t's ring
//
// slots_ is exactly two values per entity regardless of how many labels an
// entity carries. New members are spliced in right after the cached head, so
// the head stays the first entity ever linked into the ring.

#include "kglb/dictionary.hpp"
#include "kglb/tuple_registry.hpp"

#include <algorithm>
#include <cassert>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

namespace kglb {

// Instrumentation for label queries: entities yielded vs ring steps taken.
struct traversal_stats {
    std::uint64_t entities_visited = 0;
    std::uint64_t candidate_tuples = 0;
};

class label_store {
public:
    using slot_type = std::uint32_t;
    static constexpr std::size_t slot_width = sizeof(slot_type);

    struct memory {
        std::size_t dls_slots = 0;
        std::size_t dls_head = 0;
        tuple_registry::memory registry;
        std::size_t dictionary = 0;
        // Label-association footprint of this store (dictionary excluded, it
        // is shared between stores).
        std::size_t label_infrastructure() const noexcept { return dls_slots + dls_head + registry.total(); }
        std::size_t total() const noexcept { return label_infrastructure() + dictionary; }
    };

    // Forward range over one tuple's ring.
    class ring_range {
    public:
        class iterator {
        public:
            using iterator_category = std::forward_iterator_tag;
            using value_type = entity_id;
            using difference_type = std::ptrdiff_t;
            using pointer = const entity_id*;
            using reference = entity_id;

            iterator() = default;
            entity_id operator*() const noexcept { return cur_; }
            iterator& operator++() noexcept {
                assert(store_->generation_ == generation_ && "label_store mutated during ring traversal");
                cur_ = store_->next(cur_);
                return *this;
            }
            iterator operator++(int) noexcept {
                auto tmp = *this;
                ++*this;
                return tmp;
            }
            friend bool operator==(const iterator& a, const iterator& b) noexcept { return a.cur_ == b.cur_; }

        private:
            friend class ring_range;
            iterator(const label_store* s, entity_id cur) noexcept
                : store_(s), cur_(cur), generation_(s->generation_) {}
            const label_store* store_ = nullptr;
            entity_id cur_ = no_entity;
            std::uint64_t generation_ = 0;
        };

        iterator begin() const noexcept { return {store_, first_}; }
        iterator end() const noexcept { return {store_, no_entity}; }
        bool empty() const noexcept { return first_ == no_entity; }

    private:
        friend class label_store;
        ring_range(const label_store* s, entity_id first) noexcept : store_(s), first_(first) {}
        const label_store* store_;
        entity_id first_;
    };

    label_store(label_dictionary& dict, std::size_t capacity)
        : dict_(&dict), head_(registry_.slot_capacity(), no_entity) {
        resize(capacity);
    }

    std::size_t capacity() const noexcept { return capacity_; }

    // Grows (never shrinks) the entity capacity. New entities are unlabeled.
    void resize(std::size_t new_capacity) {
        if (new_capacity < capacity_) fail(errc::capacity_exceeded, "entity capacity cannot shrink");
        if (new_capacity >= no_entity) fail(errc::capacity_exceeded, "entity capacity exceeds id width");
        slots_.resize(2 * new_capacity, no_tuple);
        for (std::size_t e = capacity_; e < new_capacity; ++e) slots_[2 * e + 1] = no_entity;
        capacity_ = new_capacity;
        ++generation_;
    }

    tuple_id add_label(entity_id e, std::string_view label) {
        check_entity(e);
        const label_id l = dict_->intern(label);
        const tuple_id old_tuple = tuple_of(e);
        tuple_id new_tuple = old_tuple;
        if (old_tuple == no_tuple) {
            new_tuple = registry_.intern_label_set(std::span<const label_id>(&l, 1));
        } else {
            auto existing = registry_.labels_of_tuple(old_tuple);
            if (std::binary_search(existing.begin(), existing.end(), l)) return old_tuple;
            merged_.assign(existing.begin(), existing.end());
            merged_.insert(std::upper_bound(merged_.begin(), merged_.end(), l), l);
            new_tuple = registry_.intern_label_set(merged_);
        }
        relink(e, old_tuple, new_tuple);
        return new_tuple;
    }

    // Attaches several labels with a single tuple interning.
    template <class Range>
    tuple_id add_labels(entity_id e, const Range& labels) {
        check_entity(e);
        std::vector<label_id> ids;
        for (const auto& s : labels) ids.push_back(dict_->intern(s));
        const tuple_id old_tuple = tuple_of(e);
        auto existing = registry_.labels_of_tuple(old_tuple);
        ids.insert(ids.end(), existing.begin(), existing.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.empty() || ids.size() == existing.size()) return old_tuple;
        const tuple_id new_tuple = registry_.intern_label_set(ids);
        relink(e, old_tuple, new_tuple);
        return new_tuple;
    }

    // Replaces the entity's whole label set. An empty range unlabels it.
    template <class Range>
    tuple_id set_labels(entity_id e, const Range& labels) {
        check_entity(e);
        std::vector<label_id> ids;
        for (const auto& s : labels) ids.push_back(dict_->intern(s));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        const tuple_id old_tuple = tuple_of(e);
        const tuple_id new_tuple = ids.empty() ? no_tuple : registry_.intern_label_set(ids);
        relink(e, old_tuple, new_tuple);
        return new_tuple;
    }

    tuple_id remove_label(entity_id e, std::string_view label) {
        check_entity(e);
        if (label.empty()) fail(errc::invalid_label, "empty label string");
        const tuple_id old_tuple = tuple_of(e);
        const auto l = dict_->find(label);
        if (!l || old_tuple == no_tuple) return old_tuple;
        auto existing = registry_.labels_of_tuple(old_tuple);
        auto it = std::lower_bound(existing.begin(), existing.end(), *l);
        if (it == existing.end() || *it != *l) return old_tuple;

        tuple_id new_tuple = no_tuple;
        if (existing.size() > 1) {
            merged_.assign(existing.begin(), existing.end());
            merged_.erase(merged_.begin() + (it - existing.begin()));
            new_tuple = registry_.intern_label_set(merged_);
        }
        relink(e, old_tuple, new_tuple);
        return new_tuple;
    }

    tuple_id tuple_of(entity_id e) const {
        check_entity(e);
        return slots_[2 * std::size_t{e}];
    }

    std::span<const label_id> label_ids_of(entity_id e) const { return registry_.labels_of_tuple(tuple_of(e)); }

    // Label strings of an entity, sorted lexicographically.
    std::vector<std::string> labels_of(entity_id e) const {
        std::vector<std::string> out;
        for (label_id l : label_ids_of(e)) out.push_back(dict_->resolve(l));
        std::sort(out.begin(), out.end());
        return out;
    }

    bool has_label(entity_id e, label_id l) const {
        auto ids = label_ids_of(e);
        return std::binary_search(ids.begin(), ids.end(), l);
    }

    ring_range entities_with_tuple(tuple_id t) const {
        if (!registry_.is_live(t)) fail(errc::unknown_tuple, "tuple " + std::to_string(t) + " is not live");
        return {this, head_[t]};
    }

    std::vector<entity_id> entities_with_label(label_id l, traversal_stats* stats = nullptr) const {
        return collect(registry_.tuples_with_label(l), stats);
    }

    std::vector<entity_id> entities_with_label(std::string_view label, traversal_stats* stats = nullptr) const {
        const auto l = dict_->find(label);
        if (!l) return {};
        return entities_with_label(*l, stats);
    }

    // Live tuples containing every label in the set (sorted-list intersection).
    std::vector<tuple_id> tuples_with_all(std::span<const label_id> labels) const {
        if (labels.empty()) fail(errc::invalid_query, "label set is empty");
        auto first = registry_.tuples_with_label(labels[0]);
        std::vector<tuple_id> acc(first.begin(), first.end()), tmp;
        for (std::size_t i = 1; i < labels.size() && !acc.empty(); ++i) {
            auto next = registry_.tuples_with_label(labels[i]);
            tmp.clear();
            std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::back_inserter(tmp));
            acc.swap(tmp);
        }
        return acc;
    }

    // Live tuples containing at least one label of the set.
    std::vector<tuple_id> tuples_with_any(std::span<const label_id> labels) const {
        std::vector<tuple_id> acc, tmp;
        for (label_id l : labels) {
            auto next = registry_.tuples_with_label(l);
            tmp.clear();
            std::set_union(acc.begin(), acc.end(), next.begin(), next.end(), std::back_inserter(tmp));
            acc.swap(tmp);
        }
        return acc;
    }

    std::vector<entity_id> entities_with_all(std::span<const label_id> labels, traversal_stats* stats = nullptr) const {
        return collect(tuples_with_all(labels), stats);
    }

    std::vector<entity_id> entities_with_any(std::span<const label_id> labels, traversal_stats* stats = nullptr) const {
        return collect(tuples_with_any(labels), stats);
    }

    // Number of entities currently carrying at least one label.
    std::size_t labeled_count() const noexcept {
        std::size_t n = 0;
        registry_.for_each_live([&](tuple_id t, auto) { n += registry_.refcount(t); });
        return n;
    }

    memory memory_report() const noexcept {
        memory m;
        m.dls_slots = slots_.size() * slot_width;
        m.dls_head = head_.size() * sizeof(entity_id);
        m.registry = registry_.memory_report();
        m.dictionary = dict_->memory_bytes();
        return m;
    }

    // Full structural sweep; throws corrupt_snapshot describing the first
    // violated invariant.
    void validate() const {
        auto bad = [](const std::string& what) { fail(errc::corrupt_snapshot, "label store: " + what); };
        if (slots_.size() != 2 * capacity_) bad("slot array is not 2 x capacity");
        if (head_.size() != registry_.slot_capacity()) bad("head array does not match tuple slots");
        std::vector<bool> seen(capacity_, false);
        for (tuple_id t = 1; t < head_.size(); ++t) {
            if (!registry_.is_live(t)) {
                if (head_[t] != no_entity) bad("free tuple " + std::to_string(t) + " has a ring");
                continue;
            }
            std::size_t len = 0;
            for (entity_id e = head_[t]; e != no_entity; e = next(e)) {
                if (e >= capacity_) bad("ring link out of range");
                if (seen[e]) bad("entity " + std::to_string(e) + " reachable twice");
                seen[e] = true;
                if (tuple_of(e) != t) bad("entity in the wrong ring");
                ++len;
            }
            if (len == 0 || len != registry_.refcount(t)) bad("ring length differs from refcount");
        }
        for (entity_id e = 0; e < capacity_; ++e) {
            const tuple_id t = slots_[2 * std::size_t{e}];
            if (t == no_tuple && next(e) != no_entity) bad("unlabeled entity with a ring link");
            if (t != no_tuple && !seen[e]) bad("labeled entity outside its ring");
        }
    }

    const tuple_registry& registry() const noexcept { return registry_; }
    const label_dictionary& dictionary() const noexcept { return *dict_; }
    std::span<const slot_type> slots() const noexcept { return slots_; }
    std::span<const entity_id> heads() const noexcept { return head_; }
    std::uint64_t generation() const noexcept { return generation_; }

    static label_store restore(label_dictionary& dict, tuple_registry registry, std::vector<slot_type> slots,
                               std::vector<entity_id> head) {
        if (slots.size() % 2 != 0) fail(errc::corrupt_snapshot, "odd slot array length");
        label_store s(dict, 0);
        s.capacity_ = slots.size() / 2;
        if (s.capacity_ >= no_entity) fail(errc::corrupt_snapshot, "entity capacity exceeds id width");
        s.registry_ = std::move(registry);
        s.slots_ = std::move(slots);
        s.head_ = std::move(head);
        for (std::size_t e = 0; e < s.capacity_; ++e) {
            const auto t = s.slots_[2 * e];
            if (t != no_tuple && !s.registry_.is_live(t)) fail(errc::corrupt_snapshot, "entity on a free tuple");
        }
        for (entity_id h : s.head_)
            if (h != no_entity && h >= s.capacity_) fail(errc::corrupt_snapshot, "ring head out of range");
        s.registry_.for_each_live([&](tuple_id t, auto labels) {
            if (labels.back() >= dict.next_id()) fail(errc::corrupt_snapshot, "tuple references unknown label");
            (void)t;
        });
        s.validate();
        return s;
    }

private:
    entity_id next(entity_id e) const noexcept { return slots_[2 * std::size_t{e} + 1]; }
    entity_id& next_ref(entity_id e) noexcept { return slots_[2 * std::size_t{e} + 1]; }

    void check_entity(entity_id e) const {
        if (e >= capacity_)
            fail(errc::unknown_entity, "entity " + std::to_string(e) + " >= capacity " + std::to_string(capacity_));
    }

    // Moves e from old_tuple's ring into new_tuple's ring. The new tuple is
    // acquired before the old one is released, so a set that was its own
    // predecessor's only holder is never recycled mid-move.
    void relink(entity_id e, tuple_id old_tuple, tuple_id new_tuple) {
        if (old_tuple == new_tuple) return;
        ++generation_;
        if (old_tuple != no_tuple) unlink(e, old_tuple);
        slots_[2 * std::size_t{e}] = new_tuple;
        if (new_tuple != no_tuple) {
            if (registry_.slot_capacity() > head_.size()) head_.resize(registry_.slot_capacity(), no_entity);
            link(e, new_tuple);
            registry_.acquire(new_tuple);
        }
        if (old_tuple != no_tuple) registry_.release(old_tuple);
    }

    void link(entity_id e, tuple_id t) {
        entity_id& h = head_[t];
        if (h == no_entity) {
            h = e;
            next_ref(e) = no_entity;
        } else {
            next_ref(e) = next(h);
            next_ref(h) = e;
        }
    }

    // Predecessor scan within the ring; cost bounded by the ring length.
    void unlink(entity_id e, tuple_id t) {
        entity_id& h = head_[t];
        if (h == e) {
            h = next(e);
        } else {
            entity_id p = h;
            while (next(p) != e) {
                assert(next(p) != no_entity && "entity missing from its ring");
                p = next(p);
            }
            next_ref(p) = next(e);
        }
        next_ref(e) = no_entity;
    }

    template <class Tuples>
    std::vector<entity_id> collect(const Tuples& tuples, traversal_stats* stats) const {
        std::vector<entity_id> out;
        for (tuple_id t : tuples)
            for (entity_id e = head_[t]; e != no_entity; e = next(e)) out.push_back(e);
        if (stats) {
            stats->entities_visited += out.size();
            stats->candidate_tuples += std::size(tuples);
        }
        return out;
    }

    label_dictionary* dict_;
    tuple_registry registry_;
    std::vector<entity_id> head_;
    std::vector<slot_type> slots_;
    std::size_t capacity_ = 0;
    std::uint64_t generation_ = 0;
    std::vector<label_id> merged_;
};

} // namespace kglb

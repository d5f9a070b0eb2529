#pragma once
// tuple_registry: interning of sorted label-id sets as tuple ids.
//
//   labels2index_  sorted label set -> tuple id
//   index2labels_  tuple id -> sorted label set (empty slot = free)
//   label2indices_ label id -> strictly sorted tuple ids containing it
//   recycle_       freed tuple ids, reused LIFO before maxid grows
//
// A tuple is live from the moment it is interned until release() drops its
// reference count to zero. Freed ids are recycled so maxid stays bounded by
// the peak number of simultaneously live tuples.

#include "kglb/types.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace kglb {

struct label_set_hash {
    std::size_t operator()(const std::vector<label_id>& labels) const noexcept {
        // FNV-1a over the id sequence.
        std::uint64_t h = 1469598103934665603ULL;
        for (label_id l : labels) {
            h ^= l;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

class tuple_registry {
public:
    tuple_registry() : index2labels_(1), refcount_(1, 0) {}

    // Returns the id of an existing set, or issues a new one (top of the
    // recycle stack if any, otherwise maxid + 1).
    tuple_id intern_label_set(std::span<const label_id> labels) {
        validate(labels);
        scratch_.assign(labels.begin(), labels.end());
        if (auto it = labels2index_.find(scratch_); it != labels2index_.end()) return it->second;

        tuple_id next_index = 0;
        if (!recycle_.empty()) {
            next_index = recycle_.back();
            recycle_.pop_back();
        } else {
            if (maxid_ == std::numeric_limits<tuple_id>::max() - 1)
                fail(errc::capacity_exceeded, "tuple id space exhausted");
            next_index = ++maxid_;
        }
        labels2index_.emplace(scratch_, next_index);

        for (label_id l : scratch_) {
            if (l >= label2indices_.size()) label2indices_.resize(std::size_t{l} + 1);
            auto& tuples = label2indices_[l];
            tuples.insert(std::upper_bound(tuples.begin(), tuples.end(), next_index), next_index);
        }
        if (next_index >= index2labels_.size()) {
            const auto grown = std::max<std::size_t>(index2labels_.size() * 2, std::size_t{next_index} + 1);
            index2labels_.resize(grown);
            refcount_.resize(grown, 0);
        }
        index2labels_[next_index] = scratch_;
        refcount_[next_index] = 0;
        ++live_;
        peak_live_ = std::max(peak_live_, live_);
        return next_index;
    }

    void acquire(tuple_id t) {
        check_live(t);
        ++refcount_[t];
    }

    // Drops one reference; frees and recycles the tuple when it was the last.
    bool release(tuple_id t) {
        check_live(t);
        if (refcount_[t] == 0) fail(errc::refcount_underflow, "tuple " + std::to_string(t) + " has no holders");
        if (--refcount_[t] != 0) return false;

        auto& labels = index2labels_[t];
        labels2index_.erase(labels);
        for (label_id l : labels) {
            auto& tuples = label2indices_[l];
            auto it = std::lower_bound(tuples.begin(), tuples.end(), t);
            if (it != tuples.end() && *it == t) tuples.erase(it);
        }
        labels.clear();
        labels.shrink_to_fit();
        recycle_.push_back(t);
        --live_;
        return true;
    }

    std::span<const label_id> labels_of_tuple(tuple_id t) const {
        if (t == no_tuple) return {};
        check_live(t);
        return index2labels_[t];
    }

    std::span<const tuple_id> tuples_with_label(label_id l) const noexcept {
        if (l >= label2indices_.size()) return {};
        return label2indices_[l];
    }

    bool is_live(tuple_id t) const noexcept {
        return t != no_tuple && t < index2labels_.size() && !index2labels_[t].empty();
    }

    std::uint32_t refcount(tuple_id t) const {
        check_live(t);
        return refcount_[t];
    }

    tuple_id maxid() const noexcept { return maxid_; }
    std::size_t live_count() const noexcept { return live_; }
    // Highest live_count() ever observed, transient states included.
    std::size_t peak_live() const noexcept { return peak_live_; }
    std::span<const tuple_id> recycle_stack() const noexcept { return recycle_; }
    // Allocated slot count of the tuple-indexed arrays (grows by doubling).
    std::size_t slot_capacity() const noexcept { return index2labels_.size(); }
    std::size_t label_slot_count() const noexcept { return label2indices_.size(); }

    template <class F>
    void for_each_live(F&& f) const {
        for (tuple_id t = 1; t <= maxid_; ++t)
            if (!index2labels_[t].empty()) f(t, std::span<const label_id>(index2labels_[t]));
    }

    struct memory {
        std::size_t labels2index = 0;
        std::size_t index2labels = 0;
        std::size_t label2indices = 0;
        std::size_t recycle = 0;
        std::size_t refcount = 0;
        std::size_t total() const noexcept { return labels2index + index2labels + label2indices + recycle + refcount; }
    };

    memory memory_report() const noexcept {
        memory m;
        using key_type = std::vector<label_id>;
        m.labels2index = labels2index_.bucket_count() * sizeof(void*) +
                         labels2index_.size() * (sizeof(key_type) + sizeof(tuple_id) + sizeof(void*));
        m.index2labels = index2labels_.size() * sizeof(key_type);
        for (const auto& labels : index2labels_) {
            // The hash index holds a second copy of every live set.
            m.index2labels += labels.size() * sizeof(label_id);
            m.labels2index += labels.size() * sizeof(label_id);
        }
        m.label2indices = label2indices_.size() * sizeof(std::vector<tuple_id>);
        for (const auto& tuples : label2indices_) m.label2indices += tuples.size() * sizeof(tuple_id);
        m.recycle = recycle_.size() * sizeof(tuple_id);
        m.refcount = refcount_.size() * sizeof(std::uint32_t);
        return m;
    }

    // Rebuilds a registry from persisted state. sets[t] is empty for free
    // slots; sets.size() is the slot capacity.
    static tuple_registry restore(tuple_id maxid, std::vector<std::vector<label_id>> sets,
                                  std::vector<std::uint32_t> refcounts, std::vector<tuple_id> recycle,
                                  std::size_t label_slots) {
        if (sets.size() != refcounts.size() || sets.empty() || maxid >= sets.size() || !sets[0].empty())
            fail(errc::corrupt_snapshot, "tuple registry arrays disagree in length");
        tuple_registry r;
        r.maxid_ = maxid;
        r.label2indices_.resize(label_slots);
        std::vector<bool> is_free(sets.size(), false);
        for (tuple_id t : recycle) {
            if (t == no_tuple || t > maxid || is_free[t] || !sets[t].empty())
                fail(errc::corrupt_snapshot, "recycle stack entry " + std::to_string(t) + " invalid");
            is_free[t] = true;
        }
        for (std::size_t t = 1; t < sets.size(); ++t) {
            const auto& labels = sets[t];
            if (labels.empty()) {
                if (t <= maxid && !is_free[t]) fail(errc::corrupt_snapshot, "tuple slot neither live nor recycled");
                if (refcounts[t] != 0) fail(errc::corrupt_snapshot, "free tuple with references");
                continue;
            }
            if (t > maxid) fail(errc::corrupt_snapshot, "live tuple above maxid");
            try {
                validate(labels);
            } catch (const error&) {
                fail(errc::corrupt_snapshot, "tuple " + std::to_string(t) + " label set malformed");
            }
            if (labels.back() >= label_slots) fail(errc::corrupt_snapshot, "tuple label beyond label slots");
            if (!r.labels2index_.emplace(labels, static_cast<tuple_id>(t)).second)
                fail(errc::corrupt_snapshot, "duplicate tuple label set");
            for (label_id l : labels) r.label2indices_[l].push_back(static_cast<tuple_id>(t));
            ++r.live_;
        }
        r.index2labels_ = std::move(sets);
        r.refcount_ = std::move(refcounts);
        r.recycle_ = std::move(recycle);
        r.peak_live_ = r.live_;
        return r;
    }

private:
    static void validate(std::span<const label_id> labels) {
        if (labels.empty()) fail(errc::invalid_label_set, "label set is empty");
        if (labels.front() == no_label) fail(errc::invalid_label_set, "label id 0 is reserved");
        for (std::size_t i = 1; i < labels.size(); ++i)
            if (labels[i - 1] >= labels[i]) fail(errc::invalid_label_set, "label set is not strictly sorted");
    }

    void check_live(tuple_id t) const {
        if (!is_live(t)) fail(errc::unknown_tuple, "tuple " + std::to_string(t) + " is not live");
    }

    std::unordered_map<std::vector<label_id>, tuple_id, label_set_hash> labels2index_;
    std::vector<std::vector<label_id>> index2labels_;
    std::vector<std::vector<tuple_id>> label2indices_;
    std::vector<tuple_id> recycle_;
    std::vector<std::uint32_t> refcount_;
    std::vector<label_id> scratch_;
    tuple_id maxid_ = 0;
    std::size_t live_ = 0;
    std::size_t peak_live_ = 0;
};

} // namespace kglb

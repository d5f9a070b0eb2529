#pragma once
// label_dictionary: string <-> label_id encoding shared by the node and edge
// label stores, plus key/value grouping rings.
//
// Keys and values live in one id space. The grouping of a key-label (e.g.
// "Gender") over its value-labels (e.g. "MALE", "FEMALE") is kept as an
// in-place singly linked list threaded through a dense array indexed by
// label id:
//
//   head_[key]   first value-label of the key's ring
//   ring_[value] next value-label of the same key (0 terminates)
//   key_of_[value] owning key (0 = ungrouped)

#include "kglb/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kglb {

class label_dictionary {
public:
    label_dictionary() : strings_(1), ring_(1, no_label), key_of_(1, no_label), head_(1, no_label) {}

    label_id intern(std::string_view label) {
        if (label.empty()) fail(errc::invalid_label, "empty label string");
        if (auto it = lookup_.find(std::string(label)); it != lookup_.end()) return it->second;
        if (strings_.size() >= std::numeric_limits<label_id>::max())
            fail(errc::capacity_exceeded, "label id space exhausted");
        const auto id = static_cast<label_id>(strings_.size());
        strings_.emplace_back(label);
        lookup_.emplace(strings_.back(), id);
        ring_.resize(strings_.size(), no_label);
        key_of_.resize(strings_.size(), no_label);
        head_.resize(strings_.size(), no_label);
        return id;
    }

    // Lookup without interning.
    std::optional<label_id> find(std::string_view label) const {
        if (auto it = lookup_.find(std::string(label)); it != lookup_.end()) return it->second;
        return std::nullopt;
    }

    const std::string& resolve(label_id id) const {
        if (!contains(id)) fail(errc::unknown_label_id, "label id " + std::to_string(id) + " is not assigned");
        return strings_[id];
    }

    bool contains(label_id id) const noexcept { return id != no_label && id < strings_.size(); }

    // Number of assigned ids (excludes the 0 sentinel).
    std::size_t size() const noexcept { return strings_.size() - 1; }
    label_id next_id() const noexcept { return static_cast<label_id>(strings_.size()); }

    void group_add(label_id key, label_id value) {
        if (!contains(key)) fail(errc::unknown_label_id, "group key " + std::to_string(key));
        if (!contains(value)) fail(errc::unknown_label_id, "group value " + std::to_string(value));
        if (key == value) fail(errc::invalid_label, "a label cannot group itself");
        if (key_of_[value] == key) return;
        if (key_of_[value] != no_label)
            fail(errc::already_grouped, "'" + strings_[value] + "' already grouped under '" +
                                            strings_[key_of_[value]] + "'");
        ring_[value] = head_[key];
        head_[key] = value;
        key_of_[value] = key;
    }

    std::vector<label_id> values_of(label_id key) const {
        std::vector<label_id> out;
        if (key >= head_.size()) return out;
        for (label_id v = head_[key]; v != no_label; v = ring_[v]) out.push_back(v);
        return out;
    }

    label_id key_of(label_id value) const noexcept {
        return value < key_of_.size() ? key_of_[value] : no_label;
    }

    // Raw arrays, for persistence and memory accounting.
    std::span<const std::string> strings() const noexcept { return strings_; }
    std::span<const label_id> ring() const noexcept { return ring_; }
    std::span<const label_id> key_of_array() const noexcept { return key_of_; }
    std::span<const label_id> head() const noexcept { return head_; }

    std::size_t memory_bytes() const noexcept {
        std::size_t bytes = strings_.size() * sizeof(std::string);
        for (const auto& s : strings_) bytes += s.size();
        // Hash index: key copy + value + one chain pointer per node, one pointer per bucket.
        bytes += lookup_.size() * (sizeof(std::string) + sizeof(label_id) + sizeof(void*));
        for (const auto& [s, id] : lookup_) bytes += s.size();
        bytes += lookup_.bucket_count() * sizeof(void*);
        bytes += (ring_.size() + key_of_.size() + head_.size()) * sizeof(label_id);
        return bytes;
    }

    // Rebuilds a dictionary from persisted arrays. Arrays are indexed by label
    // id and must include the 0 slot.
    static label_dictionary restore(std::vector<std::string> strings, std::vector<label_id> ring,
                                    std::vector<label_id> key_of, std::vector<label_id> head) {
        const auto n = strings.size();
        if (n == 0 || !strings[0].empty() || ring.size() != n || key_of.size() != n || head.size() != n)
            fail(errc::corrupt_snapshot, "dictionary arrays disagree in length");
        label_dictionary d;
        d.strings_ = std::move(strings);
        d.lookup_.reserve(n);
        for (std::size_t i = 1; i < n; ++i) {
            if (d.strings_[i].empty() || !d.lookup_.emplace(d.strings_[i], static_cast<label_id>(i)).second)
                fail(errc::corrupt_snapshot, "dictionary string " + std::to_string(i) + " empty or duplicated");
        }
        for (std::size_t i = 0; i < n; ++i)
            if (ring[i] >= n || key_of[i] >= n || head[i] >= n)
                fail(errc::corrupt_snapshot, "group ring link out of range");
        std::size_t grouped = 0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t steps = 0;
            for (label_id v = head[k]; v != no_label; v = ring[v]) {
                if (++steps > n || key_of[v] != k) fail(errc::corrupt_snapshot, "malformed group ring");
            }
            grouped += steps;
        }
        for (std::size_t i = 0; i < n; ++i) grouped -= key_of[i] != no_label ? 1 : 0;
        if (grouped != 0) fail(errc::corrupt_snapshot, "grouped value outside every ring");
        d.ring_ = std::move(ring);
        d.key_of_ = std::move(key_of);
        d.head_ = std::move(head);
        return d;
    }

private:
    std::vector<std::string> strings_;
    std::unordered_map<std::string, label_id> lookup_;
    std::vector<label_id> ring_;
    std::vector<label_id> key_of_;
    std::vector<label_id> head_;
};

} // namespace kglb

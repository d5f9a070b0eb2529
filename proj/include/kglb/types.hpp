#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kglb {

// Dictionary-encoded label string. 0 is never assigned.
using label_id = std::uint32_t;
// One distinct sorted set of label ids. 0 means "unlabeled".
using tuple_id = std::uint32_t;
// Dense 0-based ordinal of a node or an edge within its entity class.
using entity_id = std::uint32_t;

inline constexpr label_id no_label = 0;
inline constexpr tuple_id no_tuple = 0;
// Ring terminator and empty-head marker. Never a valid entity id.
inline constexpr entity_id no_entity = std::numeric_limits<entity_id>::max();

enum class errc {
    invalid_label,
    unknown_label_id,
    already_grouped,
    invalid_label_set,
    unknown_tuple,
    refcount_underflow,
    unknown_entity,
    invalid_query,
    capacity_exceeded,
    io_error,
    manifest_error,
    parse_error,
    empty_graph,
    not_a_snapshot,
    unsupported_version,
    corrupt_snapshot,
    spec_error,
    correctness_failure,
};

constexpr std::string_view to_string(errc e) noexcept {
    switch (e) {
    case errc::invalid_label: return "InvalidLabel";
    case errc::unknown_label_id: return "UnknownLabelId";
    case errc::already_grouped: return "AlreadyGrouped";
    case errc::invalid_label_set: return "InvalidLabelSet";
    case errc::unknown_tuple: return "UnknownTuple";
    case errc::refcount_underflow: return "RefcountUnderflow";
    case errc::unknown_entity: return "UnknownEntity";
    case errc::invalid_query: return "InvalidQuery";
    case errc::capacity_exceeded: return "CapacityExceeded";
    case errc::io_error: return "IoError";
    case errc::manifest_error: return "ManifestError";
    case errc::parse_error: return "ParseError";
    case errc::empty_graph: return "EmptyGraph";
    case errc::not_a_snapshot: return "NotASnapshot";
    case errc::unsupported_version: return "UnsupportedVersion";
    case errc::corrupt_snapshot: return "CorruptSnapshot";
    case errc::spec_error: return "SpecError";
    case errc::correctness_failure: return "CorrectnessFailure";
    }
    return "Unknown";
}

// All library failures are reported through this exception; code() is the
// machine-readable part.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace kglb

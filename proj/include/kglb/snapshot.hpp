#pragma once
// Binary snapshot of a graph: dictionary, group rings, both label stores and
// the topology.
//
// Layout (all integers little-endian):
//
//   "KGLB"  u16 version  u16 endian tag (1)
//   repeated: u16 section id, u64 payload length, payload
//
// Sections are written in id order. Strings are u64 length + bytes. Readers
// skip sections with ids they do not know.

#include "kglb/graph.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace kglb {

inline constexpr std::uint16_t snapshot_version = 1;
inline constexpr std::uint16_t snapshot_endian_tag = 1;
inline constexpr char snapshot_magic[4] = {'K', 'G', 'L', 'B'};

enum class section : std::uint16_t {
    dictionary = 1,
    group_rings = 2,
    node_registry = 3,
    node_dls = 4,
    edge_registry = 5,
    edge_dls = 6,
    node_keys = 7,
    edges = 8,
};

namespace detail {

class byte_writer {
public:
    void u16(std::uint16_t v) { put(v); }
    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void str(std::string_view s) {
        u64(s.size());
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    void u32s(std::span<const std::uint32_t> vs) {
        for (auto v : vs) u32(v);
    }
    void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }

private:
    template <class T>
    void put(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class byte_reader {
public:
    byte_reader(std::span<const std::uint8_t> b, std::uint16_t section_id) : bytes_(b), section_(section_id) {}

    std::uint16_t u16() { return get<std::uint16_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    std::string str() {
        const auto n = u64();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::vector<std::uint32_t> u32s(std::uint64_t n) {
        need(n * 4);
        std::vector<std::uint32_t> out(n);
        for (auto& v : out) v = u32();
        return out;
    }
    // Element count guard: a count can never exceed the remaining bytes.
    std::uint64_t count(std::uint64_t min_bytes_each = 1) {
        const auto n = u64();
        if (min_bytes_each && n > remaining() / min_bytes_each) corrupt("element count exceeds payload");
        return n;
    }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    void expect_end() const {
        if (remaining() != 0) corrupt("trailing bytes in section");
    }
    [[noreturn]] void corrupt(const std::string& what) const {
        fail(errc::corrupt_snapshot, "section " + std::to_string(section_) + ": " + what);
    }

private:
    void need(std::uint64_t n) const {
        if (n > remaining()) corrupt("truncated");
    }
    template <class T>
    T get() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= T(T(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(T);
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::uint16_t section_;
};

inline void write_section(byte_writer& out, section id, byte_writer&& payload) {
    out.u16(static_cast<std::uint16_t>(id));
    out.u64(payload.bytes().size());
    out.raw(payload.bytes());
}

inline byte_writer encode_registry(const tuple_registry& r) {
    byte_writer w;
    w.u32(r.maxid());
    w.u64(r.slot_capacity());
    w.u64(r.label_slot_count());
    for (tuple_id t = 1; t <= r.maxid(); ++t) {
        if (!r.is_live(t)) {
            w.u32(0);
            continue;
        }
        auto labels = r.labels_of_tuple(t);
        w.u32(static_cast<std::uint32_t>(labels.size()));
        w.u32s(labels);
    }
    for (tuple_id t = 1; t <= r.maxid(); ++t) w.u32(r.is_live(t) ? r.refcount(t) : 0);
    w.u64(r.recycle_stack().size());
    w.u32s(r.recycle_stack());
    return w;
}

inline tuple_registry decode_registry(byte_reader& in, std::size_t max_label_slots) {
    const auto maxid = in.u32();
    const auto slots = in.u64();
    const auto label_slots = in.u64();
    // Slot arrays grow by doubling, so they never exceed twice the ids issued.
    if (slots <= maxid || slots > 2 * (std::uint64_t{maxid} + 1)) in.corrupt("tuple slot capacity out of range");
    if (label_slots > max_label_slots) in.corrupt("label slot count out of range");
    if (std::uint64_t{maxid} * 8 > in.remaining()) in.corrupt("truncated");
    std::vector<std::vector<label_id>> sets(slots);
    for (tuple_id t = 1; t <= maxid; ++t) {
        const auto n = in.u32();
        sets[t] = in.u32s(n);
    }
    std::vector<std::uint32_t> refcounts(slots, 0);
    for (tuple_id t = 1; t <= maxid; ++t) refcounts[t] = in.u32();
    const auto recycled = in.count(4);
    auto recycle = in.u32s(recycled);
    in.expect_end();
    return tuple_registry::restore(maxid, std::move(sets), std::move(refcounts), std::move(recycle), label_slots);
}

inline byte_writer encode_dls(const label_store& s) {
    byte_writer w;
    w.u64(s.capacity());
    w.u64(s.heads().size());
    w.u32s(s.heads());
    w.u32s(s.slots());
    return w;
}

} // namespace detail

inline std::vector<std::uint8_t> dump(const graph& g) {
    detail::byte_writer out;
    out.raw(std::span(reinterpret_cast<const std::uint8_t*>(snapshot_magic), 4));
    out.u16(snapshot_version);
    out.u16(snapshot_endian_tag);

    const auto& dict = g.dictionary();
    {
        detail::byte_writer w;
        w.u64(dict.size());
        for (auto s : dict.strings().subspan(1)) w.str(s);
        detail::write_section(out, section::dictionary, std::move(w));
    }
    {
        detail::byte_writer w;
        w.u64(dict.ring().size());
        w.u32s(dict.ring());
        w.u32s(dict.key_of_array());
        w.u32s(dict.head());
        detail::write_section(out, section::group_rings, std::move(w));
    }
    detail::write_section(out, section::node_registry, detail::encode_registry(g.node_labels().registry()));
    detail::write_section(out, section::node_dls, detail::encode_dls(g.node_labels()));
    detail::write_section(out, section::edge_registry, detail::encode_registry(g.edge_labels().registry()));
    detail::write_section(out, section::edge_dls, detail::encode_dls(g.edge_labels()));
    {
        detail::byte_writer w;
        w.u64(g.node_keys().size());
        for (const auto& k : g.node_keys()) w.str(k);
        detail::write_section(out, section::node_keys, std::move(w));
    }
    {
        detail::byte_writer w;
        w.u64(g.edges().size());
        for (const auto& e : g.edges()) {
            w.u32(e.source);
            w.u32(e.target);
        }
        detail::write_section(out, section::edges, std::move(w));
    }
    return std::move(out.bytes());
}

inline graph load(std::span<const std::uint8_t> bytes, std::vector<std::string>* warnings = nullptr) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), snapshot_magic, 4) != 0)
        fail(errc::not_a_snapshot, "missing KGLB magic");
    detail::byte_reader header(bytes.subspan(4, 4), 0);
    const auto version = header.u16();
    if (version != snapshot_version)
        fail(errc::unsupported_version, "snapshot version " + std::to_string(version) + ", expected " +
                                            std::to_string(snapshot_version));
    if (header.u16() != snapshot_endian_tag) fail(errc::not_a_snapshot, "unexpected endianness tag");

    std::span<const std::uint8_t> payloads[9];
    bool present[9] = {};
    std::size_t pos = 8;
    while (pos < bytes.size()) {
        detail::byte_reader frame(bytes.subspan(pos), 0);
        if (frame.remaining() < 10) frame.corrupt("truncated section header");
        const auto id = frame.u16();
        const auto len = frame.u64();
        pos += 10;
        if (len > bytes.size() - pos)
            fail(errc::corrupt_snapshot, "section " + std::to_string(id) + ": truncated");
        const auto payload = bytes.subspan(pos, len);
        pos += len;
        if (id == 0 || id > 8) {
            if (warnings) warnings->push_back("skipped unknown section " + std::to_string(id));
            continue;
        }
        if (present[id]) fail(errc::corrupt_snapshot, "section " + std::to_string(id) + ": duplicated");
        present[id] = true;
        payloads[id] = payload;
    }
    for (std::uint16_t id = 1; id <= 8; ++id)
        if (!present[id]) fail(errc::corrupt_snapshot, "section " + std::to_string(id) + ": missing");

    auto reader = [&](section s) { return detail::byte_reader(payloads[std::size_t(s)], std::uint16_t(s)); };

    std::vector<std::string> strings(1);
    {
        auto in = reader(section::dictionary);
        const auto n = in.count(8);
        for (std::uint64_t i = 0; i < n; ++i) strings.push_back(in.str());
        in.expect_end();
    }
    std::unique_ptr<label_dictionary> dict;
    {
        auto in = reader(section::group_rings);
        const auto n = in.count(12);
        auto ring = in.u32s(n);
        auto key_of = in.u32s(n);
        auto head = in.u32s(n);
        in.expect_end();
        if (n != strings.size()) in.corrupt("ring arrays do not match dictionary size");
        try {
            dict = std::make_unique<label_dictionary>(label_dictionary::restore(
                std::move(strings), std::move(ring), std::move(key_of), std::move(head)));
        } catch (const error& e) {
            in.corrupt(e.what());
        }
    }

    auto make_store = [&](section reg_id, section dls_id) {
        return [&, reg_id, dls_id](label_dictionary& d) {
            auto rin = reader(reg_id);
            auto registry = [&] {
                try {
                    return detail::decode_registry(rin, d.next_id());
                } catch (const error& e) {
                    if (e.code() == errc::corrupt_snapshot && std::string(e.what()).find("section ") != std::string::npos)
                        throw;
                    rin.corrupt(e.what());
                }
            }();
            auto din = reader(dls_id);
            const auto capacity = din.u64();
            const auto head_len = din.u64();
            if (capacity > din.remaining() / 8 || head_len > din.remaining() / 4) din.corrupt("truncated");
            auto head = din.u32s(head_len);
            auto slots = din.u32s(2 * capacity);
            din.expect_end();
            try {
                return label_store::restore(d, std::move(registry), std::move(slots), std::move(head));
            } catch (const error& e) {
                din.corrupt(e.what());
            }
        };
    };

    std::vector<std::string> keys;
    {
        auto in = reader(section::node_keys);
        const auto n = in.count(8);
        keys.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) keys.push_back(in.str());
        in.expect_end();
    }
    std::vector<edge> edges;
    {
        auto in = reader(section::edges);
        const auto n = in.count(8);
        edges.resize(n);
        for (auto& e : edges) {
            e.source = in.u32();
            e.target = in.u32();
        }
        in.expect_end();
    }
    auto g = graph::restore(std::move(dict), make_store(section::node_registry, section::node_dls),
                            make_store(section::edge_registry, section::edge_dls), std::move(keys), std::move(edges));
    return g;
}

inline void save_file(const graph& g, const std::filesystem::path& path) {
    const auto bytes = dump(g);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(errc::io_error, "short write to '" + path.string() + "'");
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline graph load_file(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
    const auto bytes = read_bytes(path);
    auto g = load(bytes, warnings);
    g.freeze();
    return g;
}

} // namespace kglb

#pragma once
// Graph ingestion from delimited text files described by a JSON manifest.
//
// {
//   "seed_labels": ["FEMALE", "chess", ...],            (optional)
//   "node_files": [{ "path": "people.csv", "delimiter": ",", "key_column": "name",
//                    "label_columns": [{ "column": "Gender", "mode": "keyed" }] }],
//   "edge_files": [{ "path": "knows.csv", "delimiter": ",",
//                    "source_column": "name1", "target_column": "name2",
//                    "label_columns": [{ "column": "RELATION", "mode": "value" }] }]
// }
//
// "value" mode attaches the cell string as a label. "keyed" mode also interns
// the column header as a key-label and groups the cell under it. Relative
// paths resolve against the manifest's directory. Seed labels are interned
// first, in order, which pins their label ids.

#include "kglb/graph.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace kglb {

enum class label_mode { value, keyed };

struct label_column {
    std::string column;
    label_mode mode = label_mode::value;
};

struct node_file {
    std::filesystem::path path;
    char delimiter = ',';
    std::string key_column;
    std::vector<label_column> label_columns;
};

struct edge_file {
    std::filesystem::path path;
    char delimiter = ',';
    std::string source_column;
    std::string target_column;
    std::vector<label_column> label_columns;
};

struct ingest_manifest {
    std::vector<std::string> seed_labels;
    std::vector<node_file> node_files;
    std::vector<edge_file> edge_files;
};

namespace detail {

inline char parse_delimiter(const nlohmann::json& j) {
    if (!j.contains("delimiter")) return ',';
    const auto d = j.at("delimiter").get<std::string>();
    if (d == "\\t" || d == "tab") return '\t';
    if (d.size() != 1) fail(errc::manifest_error, "delimiter must be a single character, got '" + d + "'");
    return d[0];
}

inline std::vector<label_column> parse_label_columns(const nlohmann::json& j) {
    std::vector<label_column> out;
    if (!j.contains("label_columns")) return out;
    for (const auto& c : j.at("label_columns")) {
        label_column lc;
        lc.column = c.at("column").get<std::string>();
        const auto mode = c.value("mode", std::string("value"));
        if (mode == "value") lc.mode = label_mode::value;
        else if (mode == "keyed") lc.mode = label_mode::keyed;
        else fail(errc::manifest_error, "unknown label column mode '" + mode + "'");
        out.push_back(std::move(lc));
    }
    return out;
}

// Splits one record. Double-quoted fields may contain the delimiter; a
// doubled quote inside quotes is a literal quote.
inline std::vector<std::string> split_record(std::string_view line, char delim) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"' && fields.back().empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

class delimited_reader {
public:
    delimited_reader(const std::filesystem::path& path, char delim) : path_(path), delim_(delim), in_(path) {
        if (!in_) fail(errc::io_error, "cannot open '" + path.string() + "'");
        std::vector<std::string> row;
        if (!next(row)) fail(errc::parse_error, path.string() + ": missing header row");
        header_ = std::move(row);
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return i;
        fail(errc::manifest_error, path_.string() + ": no column '" + name + "'");
    }

    const std::vector<std::string>& header() const noexcept { return header_; }

    // Reads the next non-blank record; throws parse_error on ragged rows.
    bool next(std::vector<std::string>& row) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            row = split_record(line, delim_);
            if (!header_.empty() && row.size() != header_.size())
                fail(errc::parse_error, path_.string() + ":" + std::to_string(line_no_) + ": expected " +
                                            std::to_string(header_.size()) + " fields, found " +
                                            std::to_string(row.size()));
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    std::filesystem::path path_;
    char delim_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::size_t line_no_ = 0;
};

struct bound_label_column {
    std::size_t index;
    label_mode mode;
    std::string header;
};

inline std::vector<bound_label_column> bind(const delimited_reader& r, const std::vector<label_column>& cols) {
    std::vector<bound_label_column> out;
    for (const auto& c : cols) out.push_back({r.column(c.column), c.mode, c.column});
    return out;
}

inline std::vector<std::string> row_labels(label_dictionary& dict, const std::vector<bound_label_column>& cols,
                                           const std::vector<std::string>& row) {
    std::vector<std::string> labels;
    for (const auto& c : cols) {
        const auto& cell = row[c.index];
        if (cell.empty()) continue;
        if (c.mode == label_mode::keyed) {
            const label_id key = dict.intern(c.header);
            const label_id value = dict.intern(cell);
            dict.group_add(key, value);
        }
        labels.push_back(cell);
    }
    return labels;
}

} // namespace detail

inline ingest_manifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    ingest_manifest m;
    try {
        if (j.contains("seed_labels")) m.seed_labels = j.at("seed_labels").get<std::vector<std::string>>();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_relative() ? base_dir / path : path;
        };
        if (j.contains("node_files")) {
            for (const auto& f : j.at("node_files")) {
                node_file nf;
                nf.path = resolve(f.at("path").get<std::string>());
                nf.delimiter = detail::parse_delimiter(f);
                nf.key_column = f.at("key_column").get<std::string>();
                nf.label_columns = detail::parse_label_columns(f);
                m.node_files.push_back(std::move(nf));
            }
        }
        if (j.contains("edge_files")) {
            for (const auto& f : j.at("edge_files")) {
                edge_file ef;
                ef.path = resolve(f.at("path").get<std::string>());
                ef.delimiter = detail::parse_delimiter(f);
                ef.source_column = f.at("source_column").get<std::string>();
                ef.target_column = f.at("target_column").get<std::string>();
                ef.label_columns = detail::parse_label_columns(f);
                m.edge_files.push_back(std::move(ef));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::manifest_error, e.what());
    }
    return m;
}

inline ingest_manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open manifest '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::manifest_error, path.string() + ": " + e.what());
    }
    return parse_manifest(j, path.parent_path());
}

inline graph ingest(const ingest_manifest& manifest) {
    graph g;
    auto& dict = g.dictionary();
    for (const auto& s : manifest.seed_labels) dict.intern(s);

    std::vector<std::string> row;
    for (const auto& f : manifest.node_files) {
        detail::delimited_reader reader(f.path, f.delimiter);
        const auto key_col = reader.column(f.key_column);
        const auto cols = detail::bind(reader, f.label_columns);
        while (reader.next(row)) {
            if (row[key_col].empty())
                fail(errc::parse_error, f.path.string() + ":" + std::to_string(reader.line()) + ": empty node key");
            const entity_id v = g.add_node(row[key_col]);
            const auto labels = detail::row_labels(dict, cols, row);
            if (!labels.empty()) g.node_labels().add_labels(v, labels);
        }
    }
    for (const auto& f : manifest.edge_files) {
        detail::delimited_reader reader(f.path, f.delimiter);
        const auto src_col = reader.column(f.source_column);
        const auto dst_col = reader.column(f.target_column);
        const auto cols = detail::bind(reader, f.label_columns);
        while (reader.next(row)) {
            if (row[src_col].empty() || row[dst_col].empty())
                fail(errc::parse_error, f.path.string() + ":" + std::to_string(reader.line()) + ": empty endpoint");
            const entity_id s = g.add_node(row[src_col]);
            const entity_id t = g.add_node(row[dst_col]);
            const entity_id e = g.append_edge(s, t);
            const auto labels = detail::row_labels(dict, cols, row);
            if (!labels.empty()) g.edge_labels().add_labels(e, labels);
        }
    }
    g.freeze();
    return g;
}

inline graph ingest(const std::filesystem::path& manifest_path) { return ingest(load_manifest(manifest_path)); }

} // namespace kglb

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

/// One line of a dataset manifest: `<filename>\t<domain>\t<source>`.
struct ManifestRecord {
    std::string filename;
    std::string domain;
    std::string source;
};

inline void write_manifest(const std::string& path,
                           const std::vector<ManifestRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    for (const auto& r : records)
        out << r.filename << '\t' << r.domain << '\t' << r.source << '\n';
    if (!out) throw IoError("manifest write failed: " + path);
}

inline std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read manifest: " + path);
    std::vector<ManifestRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos
                                          : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw FormatError("manifest line " + std::to_string(lineno) +
                              " is not <filename>\\t<domain>\\t<source>: " + path);
        records.push_back({line.substr(0, t1),
                           line.substr(t1 + 1, t2 - t1 - 1),
                           line.substr(t2 + 1)});
    }
    return records;
}

/// Exclusion manifest: one `<id>\t<label>` per line. An id may repeat with
/// different labels.
struct ExclusionEntry {
    std::string id;
    std::string label;
};

inline std::vector<ExclusionEntry> read_exclusion_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read exclusion manifest: " + path);
    std::vector<ExclusionEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = line.find('\t');
        if (t == std::string::npos)
            throw FormatError("exclusion line " + std::to_string(lineno) +
                              " is not <id>\\t<label>: " + path);
        entries.push_back({line.substr(0, t), line.substr(t + 1)});
    }
    return entries;
}

inline void write_exclusion_manifest(const std::string& path,
                                     const std::vector<ExclusionEntry>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write exclusion manifest: " + path);
    for (const auto& e : entries) out << e.id << '\t' << e.label << '\n';
    if (!out) throw IoError("exclusion manifest write failed: " + path);
}

} // namespace endo

#pragma once

#include <array>
#include <bitset>
#include <string>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

enum class Domain { Virtual, Real };

inline std::string domain_name(Domain d) {
    return d == Domain::Virtual ? "virtual" : "real";
}

inline Domain parse_domain(const std::string& s) {
    if (s == "virtual") return Domain::Virtual;
    if (s == "real") return Domain::Real;
    throw FormatError("unknown domain tag: " + s);
}

/// Reasons a real frame is excluded from translator training.
enum class ExclusionLabel {
    EndoscopePart = 0,
    SurgicalTool,
    Feces,
    Fluid,
    NarrowBand,
    Magnification,
    kCount
};

constexpr int kExclusionLabelCount = static_cast<int>(ExclusionLabel::kCount);

inline const std::array<std::string, kExclusionLabelCount>& exclusion_label_names() {
    static const std::array<std::string, kExclusionLabelCount> names = {
        "endoscope_part", "surgical_tool", "feces",
        "fluid",          "narrow_band",   "magnification"};
    return names;
}

inline std::string exclusion_label_name(ExclusionLabel l) {
    return exclusion_label_names()[static_cast<int>(l)];
}

inline ExclusionLabel parse_exclusion_label(const std::string& s) {
    const auto& names = exclusion_label_names();
    for (int i = 0; i < kExclusionLabelCount; ++i)
        if (names[i] == s) return static_cast<ExclusionLabel>(i);
    throw FormatError("unknown exclusion label: " + s);
}

/// Set of exclusion labels; empty means "none".
class ExclusionSet {
public:
    bool none() const { return bits_.none(); }
    bool has(ExclusionLabel l) const { return bits_.test(static_cast<int>(l)); }
    void add(ExclusionLabel l) { bits_.set(static_cast<int>(l)); }
    ExclusionSet& operator|=(const ExclusionSet& o) {
        bits_ |= o.bits_;
        return *this;
    }
    bool operator==(const ExclusionSet& o) const { return bits_ == o.bits_; }

    std::vector<ExclusionLabel> labels() const {
        std::vector<ExclusionLabel> out;
        for (int i = 0; i < kExclusionLabelCount; ++i)
            if (bits_.test(i)) out.push_back(static_cast<ExclusionLabel>(i));
        return out;
    }

    std::string to_string() const {
        if (none()) return "none";
        std::string s;
        for (auto l : labels()) {
            if (!s.empty()) s += ',';
            s += exclusion_label_name(l);
        }
        return s;
    }

private:
    std::bitset<kExclusionLabelCount> bits_;
};

enum class SourceFlag { Manifest, Heuristic };

/// One image in a domain set, with its cleansing state.
struct ImageRecord {
    std::string id;
    std::string path;
    Domain domain = Domain::Real;
    ExclusionSet exclusion_labels;
    bool flagged_by_manifest = false;
    bool flagged_by_heuristic = false;
};

/// Unpaired image collection for one domain. `count()` is the size after
/// cleansing (I for virtual, J for real).
class DomainDataset {
public:
    DomainDataset() = default;
    DomainDataset(Domain domain, std::vector<ImageRecord> records)
        : domain_(domain), records_(std::move(records)) {
        for (const auto& r : records_)
            if (r.domain != domain_)
                throw DatasetError("record " + r.id +
                                   " does not match dataset domain " +
                                   domain_name(domain_));
    }

    Domain domain() const { return domain_; }
    const std::vector<ImageRecord>& records() const { return records_; }
    std::size_t count() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

private:
    Domain domain_ = Domain::Real;
    std::vector<ImageRecord> records_;
};

} // namespace endo

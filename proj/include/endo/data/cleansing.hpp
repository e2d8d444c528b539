#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "endo/core/image.hpp"
#include "endo/data/records.hpp"
#include "endo/io/manifest.hpp"

namespace endo {

/// Color heuristics for the two exclusion classes that have a reliable
/// chromatic signature. The remaining labels are manifest-only.
struct HeuristicRules {
    bool enabled = false;

    // narrow_band: green-dominant frames.
    double narrow_band_area = 0.60;      // fraction of pixels
    double narrow_band_hue_min = 80.0;   // degrees
    double narrow_band_hue_max = 170.0;
    double narrow_band_saturation = 0.25;

    // surgical_tool: saturated blue regions.
    double tool_area = 0.10;
    double tool_hue_min = 200.0;
    double tool_hue_max = 260.0;
    double tool_saturation = 0.50;
};

/// Pure advisory detector. Flags narrow_band when enough of the frame is
/// saturated green, surgical_tool when enough is saturated blue; returns an
/// empty set ("none") otherwise.
inline ExclusionSet heuristic_flag(const Image& image,
                                   const HeuristicRules& rules = {}) {
    if (image.channels != 3)
        throw ShapeError("heuristic_flag expects a 3-channel image, got " +
                         std::to_string(image.channels));
    std::size_t green = 0, blue = 0;
    const std::size_t total = image.pixel_count();
    for (std::size_t i = 0; i < total; ++i) {
        float r = image.data[3 * i], g = image.data[3 * i + 1],
              b = image.data[3 * i + 2];
        float h, s, v;
        rgb_to_hsv(r, g, b, h, s, v);
        if (h >= rules.narrow_band_hue_min && h <= rules.narrow_band_hue_max &&
            s >= rules.narrow_band_saturation)
            ++green;
        if (h >= rules.tool_hue_min && h <= rules.tool_hue_max &&
            s >= rules.tool_saturation)
            ++blue;
    }
    ExclusionSet flags;
    if (total > 0) {
        if (static_cast<double>(green) / total >= rules.narrow_band_area)
            flags.add(ExclusionLabel::NarrowBand);
        if (static_cast<double>(blue) / total >= rules.tool_area)
            flags.add(ExclusionLabel::SurgicalTool);
    }
    return flags;
}

struct CleansingReport {
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
    std::size_t removed_count = 0;
    std::map<std::string, std::size_t> per_label;

    /// UTF-8 key-value lines, `label = count`.
    std::string to_string() const {
        std::ostringstream out;
        out << "input = " << input_count << '\n'
            << "kept = " << kept_count << '\n'
            << "removed = " << removed_count << '\n';
        for (const auto& [label, count] : per_label)
            out << label << " = " << count << '\n';
        return out.str();
    }
};

struct CleansingResult {
    DomainDataset kept;
    std::vector<ImageRecord> removed;
    CleansingReport report;
};

using ImageLoader = std::function<Image(const ImageRecord&)>;

/// Partitions `records` into kept and removed. Manifest exclusions are
/// ground truth; heuristics (when enabled) add advisory flags via the
/// supplied loader. Every manifest id must name an existing record.
inline CleansingResult apply_cleansing(
    const std::vector<ImageRecord>& records,
    const std::vector<ExclusionEntry>& manifest_exclusions,
    const HeuristicRules& rules = {}, const ImageLoader& loader = nullptr) {
    std::unordered_map<std::string, std::size_t> by_id;
    by_id.reserve(records.size());
    Domain domain = records.empty() ? Domain::Real : records.front().domain;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!by_id.emplace(records[i].id, i).second)
            throw DatasetError("duplicate record id: " + records[i].id);
        if (records[i].domain != domain)
            throw DatasetError("records span multiple domains");
    }

    std::vector<std::string> unknown;
    std::vector<ExclusionSet> manifest_flags(records.size());
    for (const auto& entry : manifest_exclusions) {
        auto it = by_id.find(entry.id);
        if (it == by_id.end()) {
            unknown.push_back(entry.id);
            continue;
        }
        manifest_flags[it->second].add(parse_exclusion_label(entry.label));
    }
    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
        std::string msg = "exclusion manifest names unknown record ids:";
        for (const auto& id : unknown) msg += ' ' + id;
        throw DatasetError(msg);
    }

    CleansingResult result;
    result.report.input_count = records.size();
    std::vector<ImageRecord> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        ImageRecord rec = records[i];
        if (!manifest_flags[i].none()) {
            rec.exclusion_labels |= manifest_flags[i];
            rec.flagged_by_manifest = true;
        }
        if (rules.enabled && loader) {
            ExclusionSet h = heuristic_flag(loader(rec), rules);
            if (!h.none()) {
                rec.exclusion_labels |= h;
                rec.flagged_by_heuristic = true;
            }
        }
        if (rec.exclusion_labels.none()) {
            kept.push_back(std::move(rec));
        } else {
            for (auto l : rec.exclusion_labels.labels())
                ++result.report.per_label[exclusion_label_name(l)];
            result.removed.push_back(std::move(rec));
        }
    }
    result.report.kept_count = kept.size();
    result.report.removed_count = result.removed.size();
    result.kept = DomainDataset(domain, std::move(kept));
    return result;
}

} // namespace endo

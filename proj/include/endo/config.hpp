#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

/// Sectioned key-value run configuration. Every key has a documented
/// default; unknown sections or keys are rejected, all offenders reported
/// at once. File format:
///
///   # comment
///   [section]
///   key = value
class RunConfig {
public:
    struct KeyDef {
        std::string section, key, default_value, doc;
    };

    static const std::vector<KeyDef>& schema() {
        static const std::vector<KeyDef> defs = {
            {"render", "volume", "", "volume header file to render ('' = use phantom)"},
            {"render", "phantom", "tube", "phantom kind when no volume given: sphere|tube|torus"},
            {"render", "phantom_size", "64", "phantom grid size per axis"},
            {"render", "phantom_radius", "14", "phantom primary radius, voxels"},
            {"render", "phantom_wall", "6", "tube wall thickness, voxels"},
            {"render", "image_size", "256", "output frame side, pixels"},
            {"render", "fov", "70", "vertical field of view, degrees"},
            {"render", "step_size", "0.5", "ray march step, mm"},
            {"render", "path_file", "", "keyframe file: 'px py pz tx ty tz' per line ('' = axial path)"},
            {"render", "samples_per_segment", "8", "rendered frames per path segment"},
            {"render", "source_tag", "render", "source field written to the manifest"},

            {"cleanse", "manifest", "", "input manifest of one domain"},
            {"cleanse", "image_root", "", "directory holding the manifest images"},
            {"cleanse", "exclusions", "", "exclusion manifest: '<id>\\t<label>' lines ('' = none)"},
            {"cleanse", "heuristics", "false", "enable color heuristics"},
            {"cleanse", "narrow_band_area", "0.6", "green-area fraction flagging narrow_band"},
            {"cleanse", "narrow_band_saturation", "0.25", "saturation gate for narrow_band"},
            {"cleanse", "tool_area", "0.1", "blue-area fraction flagging surgical_tool"},
            {"cleanse", "tool_saturation", "0.5", "saturation gate for surgical_tool"},

            {"train", "virtual_manifest", "", "manifest of the cleansed virtual domain"},
            {"train", "virtual_root", "", "image root of the virtual domain"},
            {"train", "real_manifest", "", "manifest of the cleansed real domain"},
            {"train", "real_root", "", "image root of the real domain"},
            {"train", "variant", "unet", "shallow_unet|unet|deep_unet|residual_unet"},
            {"train", "base_channels", "64", "generator base channel width"},
            {"train", "image_size", "256", "training image side, pixels"},
            {"train", "epochs", "100", "training epochs"},
            {"train", "batch_size", "20", "mini batch size"},
            {"train", "learning_rate", "0.0002", "optimizer learning rate"},
            {"train", "beta1", "0.5", "first moment decay"},
            {"train", "beta2", "0.999", "second moment decay"},
            {"train", "lambda_cyc", "10", "cycle-consistency weight"},
            {"train", "epsilon_log", "1e-7", "log clamp epsilon"},
            {"train", "gan_form", "log_nonsaturating", "log_saturating|log_nonsaturating"},
            {"train", "fake_buffer_size", "50", "fake history buffer size (0 = off)"},
            {"train", "checkpoint_every", "1", "checkpoint period, epochs"},
            {"train", "max_steps", "0", "step cap (0 = full epoch schedule)"},
            {"train", "disc_layers", "4", "discriminator stride-2 layer count"},
            {"train", "disc_base_channels", "64", "discriminator base channel width"},
            {"train", "seed", "0", "training seed"},
            {"train", "resume", "", "checkpoint to resume from ('' = fresh run)"},

            {"translate", "checkpoint", "", "trained checkpoint"},
            {"translate", "input_manifest", "", "manifest of images to translate"},
            {"translate", "input_root", "", "image root of the inputs"},
            {"translate", "variant", "", "expected variant ('' = accept checkpoint's)"},
            {"translate", "batch_size", "1", "translation batch size"},
            {"translate", "resize", "true", "center-crop inputs to the model size"},

            {"eval", "input_manifest", "", "source sequence manifest"},
            {"eval", "input_root", "", "source sequence image root"},
            {"eval", "translated_manifest", "", "translated sequence manifest"},
            {"eval", "translated_root", "", "translated sequence image root"},
            {"eval", "real_manifest", "", "reference real-domain manifest"},
            {"eval", "real_root", "", "reference real-domain image root"},
            {"eval", "bins", "32", "histogram bins per channel"},
            {"eval", "checkpoint", "", "checkpoint to time ('' = skip timing)"},
            {"eval", "runs", "20", "timing repetitions"},

            {"bench", "image_size", "256", "benchmark image side, pixels"},
            {"bench", "base_channels", "64", "generator base channel width"},
            {"bench", "runs", "20", "timing repetitions per variant"},
            {"bench", "warmup", "3", "untimed warm-up runs"},
            {"bench", "seed", "0", "parameter init seed"},
        };
        return defs;
    }

    RunConfig() {
        for (const auto& def : schema())
            values_[def.section + "." + def.key] = def.default_value;
    }

    /// Merges a config file over the defaults. Unknown keys are collected
    /// and reported together.
    void load_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file: " + path);
        std::string line, section;
        std::vector<std::string> unknown;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  " is not 'key = value': " + path);
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            std::string full = section + "." + key;
            if (values_.find(full) == values_.end()) {
                unknown.push_back(full);
                continue;
            }
            values_[full] = value;
        }
        if (!unknown.empty()) {
            std::string msg = "unknown config keys:";
            for (const auto& k : unknown) msg += ' ' + k;
            throw ConfigError(msg);
        }
    }

    void set(const std::string& section, const std::string& key,
             const std::string& value) {
        auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("unknown config keys: " + section + "." + key);
        it->second = value;
    }

    const std::string& get(const std::string& section,
                           const std::string& key) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("unknown config keys: " + section + "." + key);
        return it->second;
    }

    double get_double(const std::string& s, const std::string& k) const {
        try {
            return std::stod(get(s, k));
        } catch (const std::exception&) {
            throw ConfigError("key " + s + "." + k + " is not a number: " +
                              get(s, k));
        }
    }
    int get_int(const std::string& s, const std::string& k) const {
        try {
            return std::stoi(get(s, k));
        } catch (const std::exception&) {
            throw ConfigError("key " + s + "." + k + " is not an integer: " +
                              get(s, k));
        }
    }
    std::uint64_t get_u64(const std::string& s, const std::string& k) const {
        try {
            return std::stoull(get(s, k));
        } catch (const std::exception&) {
            throw ConfigError("key " + s + "." + k + " is not an integer: " +
                              get(s, k));
        }
    }
    bool get_bool(const std::string& s, const std::string& k) const {
        const std::string& v = get(s, k);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key " + s + "." + k + " is not a boolean: " + v);
    }

    /// Writes the effective merged configuration, grouped by section.
    void echo(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write effective config: " + path);
        std::string current;
        for (const auto& def : schema()) {
            if (def.section != current) {
                if (!current.empty()) out << '\n';
                out << '[' << def.section << "]\n";
                current = def.section;
            }
            out << def.key << " = " << values_.at(def.section + "." + def.key)
                << '\n';
        }
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

} // namespace endo

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

/// Single-file archive: a text metadata block followed by named float32
/// arrays with explicit shapes, little-endian.
///
///   endockpt 1
///   <key> = <value>            (repeated, insertion order preserved)
///   end_header
///   tensor <name> <ndim> <d0> ... <d{n-1}> <nbytes>\n<raw bytes>\n  (repeated)
struct CheckpointTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
};

class Checkpoint {
public:
    void set_meta(const std::string& key, const std::string& value) {
        for (auto& kv : meta_)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        meta_.emplace_back(key, value);
    }
    void set_meta(const std::string& key, double value) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        set_meta(key, os.str());
    }
    void set_meta(const std::string& key, std::int64_t value) {
        set_meta(key, std::to_string(value));
    }

    bool has_meta(const std::string& key) const {
        for (const auto& kv : meta_)
            if (kv.first == key) return true;
        return false;
    }
    const std::string& meta(const std::string& key) const {
        for (const auto& kv : meta_)
            if (kv.first == key) return kv.second;
        throw FormatError("checkpoint metadata missing key: " + key);
    }
    double meta_double(const std::string& key) const {
        return std::stod(meta(key));
    }
    std::int64_t meta_int(const std::string& key) const {
        return std::stoll(meta(key));
    }
    const std::vector<std::pair<std::string, std::string>>& meta_items() const {
        return meta_;
    }

    void add_tensor(CheckpointTensor t) {
        std::size_t expect = 1;
        for (int d : t.shape) expect *= static_cast<std::size_t>(d);
        if (expect != t.data.size())
            throw ShapeError("checkpoint tensor " + t.name +
                             " data does not match declared shape");
        tensors_.push_back(std::move(t));
    }

    const std::vector<CheckpointTensor>& tensors() const { return tensors_; }

    const CheckpointTensor* find(const std::string& name) const {
        for (const auto& t : tensors_)
            if (t.name == name) return &t;
        return nullptr;
    }

    /// Finds a tensor, validating its presence and shape.
    const CheckpointTensor& expect(const std::string& name,
                                   const std::vector<int>& shape) const {
        const CheckpointTensor* t = find(name);
        if (!t) throw FormatError("checkpoint missing tensor: " + name);
        if (t->shape != shape) {
            std::ostringstream os;
            os << "checkpoint tensor " << name << " has shape [";
            for (int d : t->shape) os << ' ' << d;
            os << " ], expected [";
            for (int d : shape) os << ' ' << d;
            os << " ]";
            throw ShapeError(os.str());
        }
        return *t;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write checkpoint: " + path);
        out << "endockpt 1\n";
        for (const auto& [k, v] : meta_) out << k << " = " << v << '\n';
        out << "end_header\n";
        for (const auto& t : tensors_) {
            out << "tensor " << t.name << ' ' << t.shape.size();
            for (int d : t.shape) out << ' ' << d;
            out << ' ' << t.data.size() * 4 << '\n';
            write_le(out, t.data);
            out << '\n';
        }
        if (!out) throw IoError("checkpoint write failed: " + path);
    }

    static Checkpoint load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read checkpoint: " + path);
        std::string line;
        if (!std::getline(in, line) || line != "endockpt 1")
            throw FormatError("not a checkpoint file: " + path);
        Checkpoint ckpt;
        while (std::getline(in, line)) {
            if (line == "end_header") break;
            auto eq = line.find(" = ");
            if (eq == std::string::npos)
                throw FormatError("malformed checkpoint metadata line: " + line);
            ckpt.set_meta(line.substr(0, eq), line.substr(eq + 3));
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string tag, name;
            std::size_t ndim = 0;
            if (!(ls >> tag >> name >> ndim) || tag != "tensor")
                throw FormatError("malformed checkpoint tensor line: " + line);
            CheckpointTensor t;
            t.name = name;
            std::size_t count = 1;
            for (std::size_t i = 0; i < ndim; ++i) {
                int d = 0;
                if (!(ls >> d) || d <= 0)
                    throw FormatError("bad tensor shape in checkpoint: " + line);
                t.shape.push_back(d);
                count *= static_cast<std::size_t>(d);
            }
            std::size_t nbytes = 0;
            if (!(ls >> nbytes) || nbytes != count * 4)
                throw FormatError("tensor byte count mismatch: " + line);
            t.data.resize(count);
            read_le(in, t.data);
            if (!in) throw FormatError("truncated checkpoint tensor: " + name);
            ckpt.tensors_.push_back(std::move(t));
        }
        return ckpt;
    }

private:
    static void write_le(std::ostream& out, const std::vector<float>& data) {
        // Serialize explicitly little-endian, bytewise.
        std::vector<unsigned char> buf(data.size() * 4);
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::uint32_t u;
            std::memcpy(&u, &data[i], 4);
            buf[4 * i] = static_cast<unsigned char>(u & 0xff);
            buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
            buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
            buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }

    static void read_le(std::istream& in, std::vector<float>& data) {
        std::vector<unsigned char> buf(data.size() * 4);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                              (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                              (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                              (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
            std::memcpy(&data[i], &u, 4);
        }
    }

    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<CheckpointTensor> tensors_;
};

} // namespace endo

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "endo/core/error.hpp"

namespace endo {

/// Counter-based pseudo-random generator (splitmix64). The whole state is a
/// single 64-bit word, which makes checkpointing and replay exact: restoring
/// the word restores the full stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ParamError("Rng::next_below requires n > 0");
        // 128-bit multiply keeps the draw unbiased enough for shuffling/sampling.
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller. Uses two uniforms per draw so the
    /// state never carries a cached spare.
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        while (u1 <= 0.0) u1 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

    std::string state_hex() const {
        char buf[19];
        std::snprintf(buf, sizeof buf, "0x%016llx",
                      static_cast<unsigned long long>(state_));
        return buf;
    }

    static Rng from_state_hex(const std::string& hex) {
        if (hex.size() < 3 || hex[0] != '0' || (hex[1] != 'x' && hex[1] != 'X'))
            throw FormatError("rng state not in 0x... form: " + hex);
        Rng r;
        r.state_ = std::stoull(hex.substr(2), nullptr, 16);
        return r;
    }

    /// Derives an independent stream, e.g. one per (purpose, index) pair.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
        return Rng(mix.next_u64());
    }

private:
    std::uint64_t state_;
};

} // namespace endo

#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "endo/core/rng.hpp"
#include "endo/data/records.hpp"

namespace endo {

/// Draws unpaired batches from two domains. Each domain is consumed in
/// per-epoch shuffled order; the smaller set wraps around with a fresh
/// shuffle. The index sequence is a pure function of (seed, draw history),
/// and the whole state is four integers, so training can checkpoint and
/// resume the stream exactly.
class UnpairedSampler {
public:
    struct State {
        std::uint64_t seed = 0;
        std::uint64_t virtual_pass = 0, virtual_cursor = 0;
        std::uint64_t real_pass = 0, real_cursor = 0;

        bool operator==(const State&) const = default;
    };

    UnpairedSampler(std::size_t virtual_count, std::size_t real_count,
                    std::uint64_t seed)
        : v_count_(virtual_count), r_count_(real_count) {
        if (virtual_count == 0 || real_count == 0)
            throw DatasetError("cannot sample from an empty dataset");
        state_.seed = seed;
        v_perm_ = permutation(v_count_, 0, state_.virtual_pass);
        r_perm_ = permutation(r_count_, 1, state_.real_pass);
    }

    UnpairedSampler(std::size_t virtual_count, std::size_t real_count,
                    const State& state)
        : UnpairedSampler(virtual_count, real_count, state.seed) {
        state_ = state;
        v_perm_ = permutation(v_count_, 0, state_.virtual_pass);
        r_perm_ = permutation(r_count_, 1, state_.real_pass);
    }

    /// Draws batch_size indices from each domain independently.
    void next_batch(std::size_t batch_size, std::vector<std::size_t>& v_indices,
                    std::vector<std::size_t>& r_indices) {
        if (batch_size < 1) throw ParamError("batch_size must be >= 1");
        v_indices.clear();
        r_indices.clear();
        for (std::size_t i = 0; i < batch_size; ++i) {
            v_indices.push_back(draw(v_perm_, v_count_, 0, state_.virtual_pass,
                                     state_.virtual_cursor));
            r_indices.push_back(draw(r_perm_, r_count_, 1, state_.real_pass,
                                     state_.real_cursor));
        }
    }

    const State& state() const { return state_; }

private:
    std::vector<std::size_t> permutation(std::size_t n, std::uint64_t domain_tag,
                                         std::uint64_t pass) const {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng = Rng::derive(state_.seed ^ (domain_tag + 1) * 0x9e3779b9ull, pass);
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.next_below(i)]);
        return perm;
    }

    std::size_t draw(std::vector<std::size_t>& perm, std::size_t n,
                     std::uint64_t domain_tag, std::uint64_t& pass,
                     std::uint64_t& cursor) {
        if (cursor >= n) {
            ++pass;
            cursor = 0;
            perm = permutation(n, domain_tag, pass);
        }
        return perm[cursor++];
    }

    std::size_t v_count_, r_count_;
    State state_;
    std::vector<std::size_t> v_perm_, r_perm_;
};

} // namespace endo

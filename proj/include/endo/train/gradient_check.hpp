#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "endo/train/cyclegan.hpp"

namespace endo {

struct GradCheckOptions {
    int samples_per_network = 50; // parameters probed in G and in F each
    double fd_step = 1e-4;        // relative central-difference step
    int batch_size = 1;
    int disc_layers = 2;           // small discriminator for small inputs
    int disc_base_channels = 8;
    bool corrupt_one_entry = false; // fault injection for the harness test
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t parameters_checked = 0;
};

/// Compares the analytic parameter gradients of the total generator
/// objective against central finite differences on randomly chosen
/// parameters of G and F. Runs entirely in double precision.
inline GradCheckResult numeric_gradient_check(const ArchitectureSpec& spec_small,
                                              const LossWeights& w,
                                              std::uint64_t seed,
                                              const GradCheckOptions& opts = {}) {
    using T = double;
    CycleGan<T> model = CycleGan<T>::build(spec_small, opts.disc_layers,
                                           opts.disc_base_channels);
    model.init_parameters(seed);

    Rng data_rng = Rng::derive(seed, 21);
    auto random_batch = [&]() {
        Tensor<T> t(opts.batch_size, spec_small.input_channels,
                    spec_small.input_height, spec_small.input_width);
        for (auto& v : t.v) v = 2.0 * data_rng.next_uniform() - 1.0;
        return t;
    };
    Tensor<T> v_batch = random_batch();
    Tensor<T> r_batch = random_batch();

    ParamStore<T> gG = make_param_store<T>(model.G.description());
    ParamStore<T> gF = make_param_store<T>(model.F.description());
    generator_objective(model, v_batch, r_batch, w, &gG, &gF);

    Rng pick_rng = Rng::derive(seed, 22);
    GradCheckResult result;

    // Central difference with step refinement. The objective is piecewise
    // smooth (ReLU and L1 kinks), so a fixed step straddling a kink poisons
    // the quotient; the function is still differentiable at the evaluation
    // point itself, so shrinking the step until two consecutive estimates
    // agree recovers the true local slope.
    auto central_difference = [&](Network<T>& net, std::size_t slot,
                                  std::size_t idx) {
        T saved = net.params()[slot][idx];
        auto estimate = [&](double h) {
            net.params()[slot][idx] = saved + h;
            double f_plus = generator_objective(model, v_batch, r_batch, w);
            net.params()[slot][idx] = saved - h;
            double f_minus = generator_objective(model, v_batch, r_batch, w);
            net.params()[slot][idx] = saved;
            return (f_plus - f_minus) / (2.0 * h);
        };
        double h = opts.fd_step * std::max(1.0, std::abs(saved));
        double numeric = estimate(h);
        for (int iter = 0; iter < 6; ++iter) {
            h /= 8.0;
            double refined = estimate(h);
            double gap = std::abs(refined - numeric) /
                         std::max({std::abs(refined), std::abs(numeric), 1e-8});
            numeric = refined;
            if (gap < 1e-4) break;
        }
        return numeric;
    };

    auto check_network = [&](Network<T>& net, ParamStore<T>& grads) {
        // Uniform over all scalar parameters of the network.
        std::vector<std::size_t> offsets;
        std::size_t total = 0;
        for (const auto& slot : net.params()) {
            offsets.push_back(total);
            total += slot.size();
        }
        double corrupt_best = -1.0;
        std::size_t corrupt_slot = 0, corrupt_idx = 0;
        for (int s = 0; s < opts.samples_per_network; ++s) {
            std::size_t flat = pick_rng.next_below(total);
            std::size_t slot = 0;
            while (slot + 1 < offsets.size() && offsets[slot + 1] <= flat) ++slot;
            std::size_t idx = flat - offsets[slot];

            double numeric = central_difference(net, slot, idx);
            double analytic = grads[slot][idx];
            double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            result.max_rel_error = std::max(result.max_rel_error, rel);
            ++result.parameters_checked;

            if (std::abs(analytic) > corrupt_best) {
                corrupt_best = std::abs(analytic);
                corrupt_slot = slot;
                corrupt_idx = idx;
            }
        }
        if (opts.corrupt_one_entry && corrupt_best > 0.0) {
            // Re-evaluate the strongest sampled coordinate with its analytic
            // gradient doubled; a correct harness must flag this.
            double numeric = central_difference(net, corrupt_slot, corrupt_idx);
            double analytic = 2.0 * grads[corrupt_slot][corrupt_idx];
            double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            result.max_rel_error = std::max(result.max_rel_error, rel);
        }
    };

    check_network(model.G, gG);
    check_network(model.F, gF);
    return result;
}

} // namespace endo

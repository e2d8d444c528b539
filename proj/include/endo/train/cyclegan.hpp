#pragma once

#include <cmath>
#include <string>

#include "endo/core/rng.hpp"
#include "endo/nets/graph.hpp"
#include "endo/nets/network.hpp"
#include "endo/train/losses.hpp"

namespace endo {

/// Builds a discriminator sized for the generator input. Tiny inputs (as
/// used by the gradient-check harness) get fewer stride-2 layers so the
/// patch grid stays non-empty.
inline NetworkDescription build_discriminator_for(int image_size,
                                                  int input_channels,
                                                  int base_channels,
                                                  int layers = 4) {
    if (layers == 4)
        return build_discriminator(image_size, input_channels, base_channels);
    if (layers < 1 || layers > 4)
        throw SpecError("discriminator layers must lie in [1,4]");
    GraphBuilder g(input_channels);
    int x = g.input();
    for (int i = 0; i < layers; ++i) {
        std::string path = "disc" + std::to_string(i);
        int ch = std::min(base_channels << i, base_channels * 8);
        x = g.conv(x, ch, 4, 2, 1, path + "/conv");
        if (i > 0) x = g.instance_norm(x, path + "/norm");
        x = g.leaky_relu(x, 0.2);
    }
    x = g.conv(x, 1, 3, 1, 1, "head/conv");
    x = g.sigmoid(x);
    NetworkDescription desc = g.finish(x);
    desc.role = "discriminator";
    desc.base_channels = base_channels;
    desc.input_height = image_size;
    desc.input_width = image_size;
    desc.input_channels = input_channels;
    return desc;
}

/// The quadruple (G, F, D_R, D_V): G translates virtual -> real, F is the
/// inverse mapping, and each discriminator scores its target domain. G and
/// F share one architecture spec; the discriminators share another. All
/// four parameter stores are disjoint.
template <typename T>
struct CycleGan {
    ArchitectureSpec spec;
    Network<T> G, F, D_R, D_V;

    static CycleGan build(const ArchitectureSpec& spec, int disc_layers = 4,
                          int disc_base_channels = 64) {
        spec.validate();
        NetworkDescription gen = build_translator(spec);
        NetworkDescription disc = build_discriminator_for(
            spec.input_height, spec.input_channels, disc_base_channels,
            disc_layers);
        return CycleGan{spec, Network<T>(gen), Network<T>(gen),
                        Network<T>(disc), Network<T>(disc)};
    }

    /// Deterministic initialization; each network draws its own stream.
    void init_parameters(std::uint64_t seed) {
        Rng rg = Rng::derive(seed, 1);
        Rng rf = Rng::derive(seed, 2);
        Rng rdr = Rng::derive(seed, 3);
        Rng rdv = Rng::derive(seed, 4);
        G.init_parameters(rg);
        F.init_parameters(rf);
        D_R.init_parameters(rdr);
        D_V.init_parameters(rdv);
    }
};

/// Losses of one step evaluated on frozen parameters.
struct LossRecord {
    std::int64_t step = 0;
    int epoch = 0;
    double gan_G = 0, gan_F = 0, cyc = 0, total = 0;
    double acc_DR = 0, acc_DV = 0;
};

/// Forward artifacts of both translation cycles, with tapes when gradients
/// will be needed.
template <typename T>
struct GeneratorPass {
    Tensor<T> fake_r, fake_v, rec_v, rec_r;
    Tape<T> tape_G1, tape_F1, tape_F2, tape_G2;
    bool taped = false;
};

template <typename T>
GeneratorPass<T> generator_forward(const CycleGan<T>& model,
                                   const Tensor<T>& v_batch,
                                   const Tensor<T>& r_batch, bool with_tapes) {
    GeneratorPass<T> pass;
    pass.taped = with_tapes;
    pass.fake_r = model.G.forward(v_batch, with_tapes ? &pass.tape_G1 : nullptr);
    pass.fake_v = model.F.forward(r_batch, with_tapes ? &pass.tape_F1 : nullptr);
    pass.rec_v = model.F.forward(pass.fake_r, with_tapes ? &pass.tape_F2 : nullptr);
    pass.rec_r = model.G.forward(pass.fake_v, with_tapes ? &pass.tape_G2 : nullptr);
    return pass;
}

/// Total generator objective over a completed forward pass: both
/// adversarial terms (current discriminators, frozen) plus the weighted
/// cycle term. When gG/gF are non-null, accumulates the analytic parameter
/// gradients; this one code path serves both training and the
/// finite-difference verification harness.
template <typename T>
double generator_objective_from_pass(const CycleGan<T>& model,
                                     const GeneratorPass<T>& pass,
                                     const Tensor<T>& v_batch,
                                     const Tensor<T>& r_batch,
                                     const LossWeights& w,
                                     ParamStore<T>* gG = nullptr,
                                     ParamStore<T>* gF = nullptr) {
    w.validate();
    const bool want_grads = gG != nullptr || gF != nullptr;
    if (want_grads && !pass.taped)
        throw TrainingError("generator gradients require a taped forward pass");

    Tape<T> tape_DR, tape_DV;
    Tensor<T> dr_fake =
        model.D_R.forward(pass.fake_r, want_grads ? &tape_DR : nullptr);
    Tensor<T> dv_fake =
        model.D_V.forward(pass.fake_v, want_grads ? &tape_DV : nullptr);

    Tensor<T> g_dr, g_dv;
    double adv_G = generator_gan_term_grad(dr_fake, w.gan_form, w.epsilon_log, g_dr);
    double adv_F = generator_gan_term_grad(dv_fake, w.gan_form, w.epsilon_log, g_dv);

    Tensor<T> g_rec_v, g_rec_r;
    double l1_v = l1_mean_grad(pass.rec_v, v_batch, g_rec_v, w.lambda_cyc);
    double l1_r = l1_mean_grad(pass.rec_r, r_batch, g_rec_r, w.lambda_cyc);

    double objective = adv_G + adv_F + w.lambda_cyc * (l1_v + l1_r);

    if (want_grads) {
        ParamStore<T> scratch_G = make_param_store<T>(model.G.description());
        ParamStore<T> scratch_F = make_param_store<T>(model.F.description());
        ParamStore<T> scratch_D = make_param_store<T>(model.D_R.description());
        ParamStore<T>& grads_G = gG ? *gG : scratch_G;
        ParamStore<T>& grads_F = gF ? *gF : scratch_F;

        // Virtual-side chain: adversarial term through D_R into fake_r,
        // plus the cycle path through F; both feed G's backward pass.
        Tensor<T> d_fake_r = model.D_R.backward(tape_DR, g_dr, scratch_D);
        Tensor<T> d_fake_r_cyc = model.F.backward(pass.tape_F2, g_rec_v, grads_F);
        for (std::size_t i = 0; i < d_fake_r.v.size(); ++i)
            d_fake_r.v[i] += d_fake_r_cyc.v[i];
        model.G.backward(pass.tape_G1, d_fake_r, grads_G);

        // Real-side chain, symmetric.
        for (auto& slot : scratch_D) std::fill(slot.begin(), slot.end(), T(0));
        Tensor<T> d_fake_v = model.D_V.backward(tape_DV, g_dv, scratch_D);
        Tensor<T> d_fake_v_cyc = model.G.backward(pass.tape_G2, g_rec_r, grads_G);
        for (std::size_t i = 0; i < d_fake_v.v.size(); ++i)
            d_fake_v.v[i] += d_fake_v_cyc.v[i];
        model.F.backward(pass.tape_F1, d_fake_v, grads_F);
    }
    return objective;
}

template <typename T>
double generator_objective(const CycleGan<T>& model, const Tensor<T>& v_batch,
                           const Tensor<T>& r_batch, const LossWeights& w,
                           ParamStore<T>* gG = nullptr,
                           ParamStore<T>* gF = nullptr) {
    GeneratorPass<T> pass = generator_forward(
        model, v_batch, r_batch, gG != nullptr || gF != nullptr);
    return generator_objective_from_pass(model, pass, v_batch, r_batch, w, gG, gF);
}

/// Evaluates the record losses without touching any parameters.
template <typename T>
LossRecord evaluate_losses(const CycleGan<T>& model, const Tensor<T>& v_batch,
                           const Tensor<T>& r_batch, const LossWeights& w) {
    GeneratorPass<T> pass = generator_forward(model, v_batch, r_batch, false);
    Tensor<T> dr_real = model.D_R.forward(r_batch);
    Tensor<T> dr_fake = model.D_R.forward(pass.fake_r);
    Tensor<T> dv_real = model.D_V.forward(v_batch);
    Tensor<T> dv_fake = model.D_V.forward(pass.fake_v);

    LossRecord rec;
    rec.gan_G = gan_value(dr_real, dr_fake, w.epsilon_log);
    rec.gan_F = gan_value(dv_real, dv_fake, w.epsilon_log);
    rec.cyc = cycle_loss(v_batch, pass.rec_v, r_batch, pass.rec_r);
    rec.total = total_loss(rec.gan_G, rec.gan_F, rec.cyc, w);
    rec.acc_DR = discriminator_accuracy(dr_real, dr_fake);
    rec.acc_DV = discriminator_accuracy(dv_real, dv_fake);
    return rec;
}

} // namespace endo

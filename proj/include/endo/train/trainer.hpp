#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "endo/core/image.hpp"
#include "endo/data/sampler.hpp"
#include "endo/train/checkpoint.hpp"
#include "endo/train/cyclegan.hpp"
#include "endo/train/optimizer.hpp"

namespace endo {

struct TrainingConfig {
    int epochs = 100;
    int batch_size = 20;
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    int fake_buffer_size = 50; // 0 disables the history buffer
    int checkpoint_every = 1;  // epochs
    std::uint64_t seed = 0;
    int max_steps = 0;          // 0 = run the full epoch schedule
    int disc_layers = 4;
    int disc_base_channels = 64;

    void validate() const {
        if (epochs < 1) throw ParamError("epochs must be >= 1");
        if (batch_size < 1) throw ParamError("batch_size must be >= 1");
        if (learning_rate < 0) throw ParamError("learning_rate must be >= 0");
        if (fake_buffer_size < 0) throw ParamError("fake_buffer_size must be >= 0");
        if (checkpoint_every < 1) throw ParamError("checkpoint_every must be >= 1");
    }
};

/// History buffer of generated images. Each query pushes the incoming fake
/// and, once full, returns a stored one half the time. Capacity 0 passes
/// fakes straight through.
template <typename T>
class FakePool {
public:
    FakePool() = default;
    FakePool(std::size_t capacity, Rng rng) : capacity_(capacity), rng_(rng) {}

    Tensor<T> query(const Tensor<T>& fakes) {
        if (capacity_ == 0) return fakes;
        Tensor<T> out = fakes;
        const std::size_t image_size = fakes.size() / fakes.n;
        for (int i = 0; i < fakes.n; ++i) {
            const T* src = fakes.image(i);
            if (images_.size() < capacity_) {
                images_.emplace_back(src, src + image_size);
            } else if (rng_.next_uniform() < 0.5) {
                std::size_t idx = rng_.next_below(capacity_);
                std::copy(images_[idx].begin(), images_[idx].end(), out.image(i));
                images_[idx].assign(src, src + image_size);
            }
        }
        return out;
    }

    std::size_t capacity() const { return capacity_; }
    const std::vector<std::vector<T>>& images() const { return images_; }
    std::vector<std::vector<T>>& images() { return images_; }
    Rng& rng() { return rng_; }
    const Rng& rng() const { return rng_; }

private:
    std::size_t capacity_ = 0;
    Rng rng_;
    std::vector<std::vector<T>> images_;
};

/// Everything one training run owns: the model, optimizer state, fake
/// pools, the sampler cursor and step counters. train_step mutates this
/// exclusively (single writer).
template <typename T>
struct TrainerState {
    CycleGan<T> model;
    Adam<T> opt_G, opt_F, opt_DR, opt_DV;
    FakePool<T> pool_R, pool_V;
    UnpairedSampler::State sampler_state;
    std::int64_t step = 0;
    int epoch = 0;

    static TrainerState make(const ArchitectureSpec& spec,
                             const TrainingConfig& cfg) {
        cfg.validate();
        TrainerState st{CycleGan<T>::build(spec, cfg.disc_layers,
                                           cfg.disc_base_channels)};
        st.model.init_parameters(cfg.seed);
        st.opt_G = Adam<T>(st.model.G.description(), cfg.learning_rate,
                           cfg.beta1, cfg.beta2);
        st.opt_F = Adam<T>(st.model.F.description(), cfg.learning_rate,
                           cfg.beta1, cfg.beta2);
        st.opt_DR = Adam<T>(st.model.D_R.description(), cfg.learning_rate,
                            cfg.beta1, cfg.beta2);
        st.opt_DV = Adam<T>(st.model.D_V.description(), cfg.learning_rate,
                            cfg.beta1, cfg.beta2);
        st.pool_R = FakePool<T>(cfg.fake_buffer_size, Rng::derive(cfg.seed, 11));
        st.pool_V = FakePool<T>(cfg.fake_buffer_size, Rng::derive(cfg.seed, 12));
        st.sampler_state.seed = cfg.seed;
        return st;
    }
};

namespace detail {

template <typename T>
void check_finite(double value, const char* term, std::int64_t step) {
    if (!std::isfinite(value))
        throw TrainingError(std::string("non-finite ") + term + " at step " +
                            std::to_string(step));
}

template <typename T>
void check_finite_grid(const Tensor<T>& grid, const char* term,
                       std::int64_t step) {
    for (const T& v : grid.v)
        if (!std::isfinite(static_cast<double>(v)))
            throw TrainingError(std::string("non-finite ") + term + " at step " +
                                std::to_string(step));
}

template <typename T>
void update_discriminator(Network<T>& disc, const Tensor<T>& real,
                          const Tensor<T>& fake, const LossWeights& w,
                          Adam<T>& opt) {
    Tape<T> tape_real, tape_fake;
    Tensor<T> d_real = disc.forward(real, &tape_real);
    Tensor<T> d_fake = disc.forward(fake, &tape_fake);
    Tensor<T> g_real, g_fake;
    discriminator_loss_grad(d_real, d_fake, w.epsilon_log, g_real, g_fake);
    ParamStore<T> grads = make_param_store<T>(disc.description());
    disc.backward(tape_real, g_real, grads);
    disc.backward(tape_fake, g_fake, grads);
    opt.step(disc.params(), grads);
}

} // namespace detail

/// One alternating update: the discriminators ascend the adversarial value
/// on current fakes (optionally drawn through the history buffer), then the
/// generators descend their objective against the refreshed discriminators.
/// The returned record holds the losses evaluated before any update.
template <typename T>
LossRecord train_step(TrainerState<T>& st, const Tensor<T>& v_batch,
                      const Tensor<T>& r_batch, const TrainingConfig& cfg,
                      const LossWeights& w) {
    w.validate();

    GeneratorPass<T> pass = generator_forward(st.model, v_batch, r_batch, true);

    LossRecord rec;
    rec.step = st.step;
    rec.epoch = st.epoch;
    {
        rec.cyc = cycle_loss(v_batch, pass.rec_v, r_batch, pass.rec_r);
        detail::check_finite<T>(rec.cyc, "L_cyc", st.step);
        Tensor<T> dr_real = st.model.D_R.forward(r_batch);
        Tensor<T> dr_fake = st.model.D_R.forward(pass.fake_r);
        Tensor<T> dv_real = st.model.D_V.forward(v_batch);
        Tensor<T> dv_fake = st.model.D_V.forward(pass.fake_v);
        detail::check_finite_grid(dr_real, "L_gan_G", st.step);
        detail::check_finite_grid(dr_fake, "L_gan_G", st.step);
        detail::check_finite_grid(dv_real, "L_gan_F", st.step);
        detail::check_finite_grid(dv_fake, "L_gan_F", st.step);
        rec.gan_G = gan_value(dr_real, dr_fake, w.epsilon_log);
        rec.gan_F = gan_value(dv_real, dv_fake, w.epsilon_log);
        detail::check_finite<T>(rec.gan_G, "L_gan_G", st.step);
        detail::check_finite<T>(rec.gan_F, "L_gan_F", st.step);
        rec.total = total_loss(rec.gan_G, rec.gan_F, rec.cyc, w);
        rec.acc_DR = discriminator_accuracy(dr_real, dr_fake);
        rec.acc_DV = discriminator_accuracy(dv_real, dv_fake);
    }

    // (1) Discriminators, on pooled fakes.
    Tensor<T> fake_r_d = st.pool_R.query(pass.fake_r);
    Tensor<T> fake_v_d = st.pool_V.query(pass.fake_v);
    detail::update_discriminator(st.model.D_R, r_batch, fake_r_d, w, st.opt_DR);
    detail::update_discriminator(st.model.D_V, v_batch, fake_v_d, w, st.opt_DV);

    // (2) Generators, jointly (the cycle term couples G and F).
    ParamStore<T> gG = make_param_store<T>(st.model.G.description());
    ParamStore<T> gF = make_param_store<T>(st.model.F.description());
    double obj = generator_objective_from_pass(st.model, pass, v_batch, r_batch,
                                               w, &gG, &gF);
    detail::check_finite<T>(obj, "generator objective", st.step);
    st.opt_G.step(st.model.G.params(), gG);
    st.opt_F.step(st.model.F.params(), gF);

    ++st.step;
    return rec;
}

/// Loss log as CSV, one row per step.
inline void write_loss_csv(const std::string& path,
                           const std::vector<LossRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write loss log: " + path);
    out << "step,epoch,L_gan_G,L_gan_F,L_cyc,L_total,acc_DR,acc_DV\n";
    out.precision(10);
    for (const auto& r : records)
        out << r.step << ',' << r.epoch << ',' << r.gan_G << ',' << r.gan_F
            << ',' << r.cyc << ',' << r.total << ',' << r.acc_DR << ','
            << r.acc_DV << '\n';
    if (!out) throw IoError("loss log write failed: " + path);
}

namespace detail {

template <typename T>
void put_store(Checkpoint& ckpt, const std::string& prefix,
               const NetworkDescription& desc, const ParamStore<T>& store,
               const std::string& suffix = "") {
    for (std::size_t i = 0; i < desc.params.size(); ++i) {
        CheckpointTensor t;
        t.name = prefix + "/" + desc.params[i].name + suffix;
        t.shape = desc.params[i].shape;
        t.data.assign(store[i].begin(), store[i].end());
        ckpt.add_tensor(std::move(t));
    }
}

template <typename T>
void get_store(const Checkpoint& ckpt, const std::string& prefix,
               const NetworkDescription& desc, ParamStore<T>& store,
               const std::string& suffix = "") {
    for (std::size_t i = 0; i < desc.params.size(); ++i) {
        const CheckpointTensor& t =
            ckpt.expect(prefix + "/" + desc.params[i].name + suffix,
                        desc.params[i].shape);
        store[i].assign(t.data.begin(), t.data.end());
    }
}

template <typename T>
void put_pool(Checkpoint& ckpt, const std::string& prefix, const FakePool<T>& pool,
              int c, int h, int w) {
    for (std::size_t i = 0; i < pool.images().size(); ++i) {
        CheckpointTensor t;
        t.name = prefix + "/" + std::to_string(i);
        t.shape = {c, h, w};
        t.data.assign(pool.images()[i].begin(), pool.images()[i].end());
        ckpt.add_tensor(std::move(t));
    }
}

template <typename T>
void get_pool(const Checkpoint& ckpt, const std::string& prefix, FakePool<T>& pool,
              std::size_t count, int c, int h, int w) {
    pool.images().clear();
    for (std::size_t i = 0; i < count; ++i) {
        const CheckpointTensor& t =
            ckpt.expect(prefix + "/" + std::to_string(i), {c, h, w});
        pool.images().emplace_back(t.data.begin(), t.data.end());
    }
}

} // namespace detail

/// Serializes the full training state: model parameters, optimizer
/// moments, fake-pool contents and all random stream states, so a resumed
/// run continues the uninterrupted one exactly.
template <typename T>
Checkpoint make_checkpoint(const TrainerState<T>& st, const TrainingConfig& cfg,
                           const LossWeights& w) {
    Checkpoint ckpt;
    const ArchitectureSpec& spec = st.model.spec;
    ckpt.set_meta("variant", variant_name(spec.variant));
    ckpt.set_meta("base_channels", static_cast<std::int64_t>(spec.base_channels));
    ckpt.set_meta("input_height", static_cast<std::int64_t>(spec.input_height));
    ckpt.set_meta("input_width", static_cast<std::int64_t>(spec.input_width));
    ckpt.set_meta("input_channels",
                  static_cast<std::int64_t>(spec.input_channels));
    ckpt.set_meta("disc_layers", static_cast<std::int64_t>(cfg.disc_layers));
    ckpt.set_meta("disc_base_channels",
                  static_cast<std::int64_t>(cfg.disc_base_channels));
    ckpt.set_meta("epoch", static_cast<std::int64_t>(st.epoch));
    ckpt.set_meta("step", st.step);
    ckpt.set_meta("lambda_cyc", w.lambda_cyc);
    ckpt.set_meta("epsilon_log", w.epsilon_log);
    ckpt.set_meta("gan_form", gan_form_name(w.gan_form));
    ckpt.set_meta("learning_rate", cfg.learning_rate);
    ckpt.set_meta("beta1", cfg.beta1);
    ckpt.set_meta("beta2", cfg.beta2);
    ckpt.set_meta("batch_size", static_cast<std::int64_t>(cfg.batch_size));
    ckpt.set_meta("epochs", static_cast<std::int64_t>(cfg.epochs));
    ckpt.set_meta("fake_buffer_size",
                  static_cast<std::int64_t>(cfg.fake_buffer_size));
    ckpt.set_meta("seed", static_cast<std::int64_t>(cfg.seed));
    ckpt.set_meta("sampler_seed",
                  static_cast<std::int64_t>(st.sampler_state.seed));
    ckpt.set_meta("sampler_vpass",
                  static_cast<std::int64_t>(st.sampler_state.virtual_pass));
    ckpt.set_meta("sampler_vcursor",
                  static_cast<std::int64_t>(st.sampler_state.virtual_cursor));
    ckpt.set_meta("sampler_rpass",
                  static_cast<std::int64_t>(st.sampler_state.real_pass));
    ckpt.set_meta("sampler_rcursor",
                  static_cast<std::int64_t>(st.sampler_state.real_cursor));
    ckpt.set_meta("pool_R_rng", st.pool_R.rng().state_hex());
    ckpt.set_meta("pool_V_rng", st.pool_V.rng().state_hex());
    ckpt.set_meta("pool_R_count",
                  static_cast<std::int64_t>(st.pool_R.images().size()));
    ckpt.set_meta("pool_V_count",
                  static_cast<std::int64_t>(st.pool_V.images().size()));
    ckpt.set_meta("adam_t_G", st.opt_G.step_count());
    ckpt.set_meta("adam_t_F", st.opt_F.step_count());
    ckpt.set_meta("adam_t_DR", st.opt_DR.step_count());
    ckpt.set_meta("adam_t_DV", st.opt_DV.step_count());
    // Digest of the stochastic state, for quick log comparison.
    std::uint64_t digest = st.pool_R.rng().state() * 0x9e3779b97f4a7c15ull ^
                           st.pool_V.rng().state() ^
                           (st.sampler_state.virtual_pass << 32) ^
                           st.sampler_state.real_cursor ^
                           static_cast<std::uint64_t>(st.step);
    ckpt.set_meta("rng_digest", Rng(digest).state_hex());

    detail::put_store(ckpt, "G", st.model.G.description(), st.model.G.params());
    detail::put_store(ckpt, "F", st.model.F.description(), st.model.F.params());
    detail::put_store(ckpt, "D_R", st.model.D_R.description(),
                      st.model.D_R.params());
    detail::put_store(ckpt, "D_V", st.model.D_V.description(),
                      st.model.D_V.params());
    detail::put_store(ckpt, "opt/G", st.model.G.description(),
                      st.opt_G.first_moments(), "/m");
    detail::put_store(ckpt, "opt/G", st.model.G.description(),
                      st.opt_G.second_moments(), "/v");
    detail::put_store(ckpt, "opt/F", st.model.F.description(),
                      st.opt_F.first_moments(), "/m");
    detail::put_store(ckpt, "opt/F", st.model.F.description(),
                      st.opt_F.second_moments(), "/v");
    detail::put_store(ckpt, "opt/D_R", st.model.D_R.description(),
                      st.opt_DR.first_moments(), "/m");
    detail::put_store(ckpt, "opt/D_R", st.model.D_R.description(),
                      st.opt_DR.second_moments(), "/v");
    detail::put_store(ckpt, "opt/D_V", st.model.D_V.description(),
                      st.opt_DV.first_moments(), "/m");
    detail::put_store(ckpt, "opt/D_V", st.model.D_V.description(),
                      st.opt_DV.second_moments(), "/v");
    const int c = spec.input_channels;
    const int h = spec.input_height, wd = spec.input_width;
    detail::put_pool(ckpt, "pool/R", st.pool_R, c, h, wd);
    detail::put_pool(ckpt, "pool/V", st.pool_V, c, h, wd);
    return ckpt;
}

/// Reads config and loss weights back out of a checkpoint.
inline void read_checkpoint_config(const Checkpoint& ckpt, ArchitectureSpec& spec,
                                   TrainingConfig& cfg, LossWeights& w) {
    spec.variant = parse_variant(ckpt.meta("variant"));
    spec.base_channels = static_cast<int>(ckpt.meta_int("base_channels"));
    spec.input_height = static_cast<int>(ckpt.meta_int("input_height"));
    spec.input_width = static_cast<int>(ckpt.meta_int("input_width"));
    spec.input_channels = static_cast<int>(ckpt.meta_int("input_channels"));
    cfg.disc_layers = static_cast<int>(ckpt.meta_int("disc_layers"));
    cfg.disc_base_channels =
        static_cast<int>(ckpt.meta_int("disc_base_channels"));
    cfg.learning_rate = ckpt.meta_double("learning_rate");
    cfg.beta1 = ckpt.meta_double("beta1");
    cfg.beta2 = ckpt.meta_double("beta2");
    cfg.batch_size = static_cast<int>(ckpt.meta_int("batch_size"));
    cfg.epochs = static_cast<int>(ckpt.meta_int("epochs"));
    cfg.fake_buffer_size = static_cast<int>(ckpt.meta_int("fake_buffer_size"));
    cfg.seed = static_cast<std::uint64_t>(ckpt.meta_int("seed"));
    w.lambda_cyc = ckpt.meta_double("lambda_cyc");
    w.epsilon_log = ckpt.meta_double("epsilon_log");
    w.gan_form = parse_gan_form(ckpt.meta("gan_form"));
}

/// Restores a full training state. Every expected tensor name and shape is
/// validated against the rebuilt architecture.
template <typename T>
TrainerState<T> restore_trainer(const Checkpoint& ckpt) {
    ArchitectureSpec spec;
    TrainingConfig cfg;
    LossWeights w;
    read_checkpoint_config(ckpt, spec, cfg, w);
    TrainerState<T> st = TrainerState<T>::make(spec, cfg);
    st.epoch = static_cast<int>(ckpt.meta_int("epoch"));
    st.step = ckpt.meta_int("step");
    st.sampler_state.seed = static_cast<std::uint64_t>(ckpt.meta_int("sampler_seed"));
    st.sampler_state.virtual_pass =
        static_cast<std::uint64_t>(ckpt.meta_int("sampler_vpass"));
    st.sampler_state.virtual_cursor =
        static_cast<std::uint64_t>(ckpt.meta_int("sampler_vcursor"));
    st.sampler_state.real_pass =
        static_cast<std::uint64_t>(ckpt.meta_int("sampler_rpass"));
    st.sampler_state.real_cursor =
        static_cast<std::uint64_t>(ckpt.meta_int("sampler_rcursor"));
    st.pool_R.rng() = Rng::from_state_hex(ckpt.meta("pool_R_rng"));
    st.pool_V.rng() = Rng::from_state_hex(ckpt.meta("pool_V_rng"));

    detail::get_store(ckpt, "G", st.model.G.description(), st.model.G.params());
    detail::get_store(ckpt, "F", st.model.F.description(), st.model.F.params());
    detail::get_store(ckpt, "D_R", st.model.D_R.description(),
                      st.model.D_R.params());
    detail::get_store(ckpt, "D_V", st.model.D_V.description(),
                      st.model.D_V.params());
    detail::get_store(ckpt, "opt/G", st.model.G.description(),
                      st.opt_G.first_moments(), "/m");
    detail::get_store(ckpt, "opt/G", st.model.G.description(),
                      st.opt_G.second_moments(), "/v");
    detail::get_store(ckpt, "opt/F", st.model.F.description(),
                      st.opt_F.first_moments(), "/m");
    detail::get_store(ckpt, "opt/F", st.model.F.description(),
                      st.opt_F.second_moments(), "/v");
    detail::get_store(ckpt, "opt/D_R", st.model.D_R.description(),
                      st.opt_DR.first_moments(), "/m");
    detail::get_store(ckpt, "opt/D_R", st.model.D_R.description(),
                      st.opt_DR.second_moments(), "/v");
    detail::get_store(ckpt, "opt/D_V", st.model.D_V.description(),
                      st.opt_DV.first_moments(), "/m");
    detail::get_store(ckpt, "opt/D_V", st.model.D_V.description(),
                      st.opt_DV.second_moments(), "/v");
    st.opt_G.set_step_count(ckpt.meta_int("adam_t_G"));
    st.opt_F.set_step_count(ckpt.meta_int("adam_t_F"));
    st.opt_DR.set_step_count(ckpt.meta_int("adam_t_DR"));
    st.opt_DV.set_step_count(ckpt.meta_int("adam_t_DV"));
    detail::get_pool(ckpt, "pool/R", st.pool_R,
                     static_cast<std::size_t>(ckpt.meta_int("pool_R_count")),
                     spec.input_channels, spec.input_height, spec.input_width);
    detail::get_pool(ckpt, "pool/V", st.pool_V,
                     static_cast<std::size_t>(ckpt.meta_int("pool_V_count")),
                     spec.input_channels, spec.input_height, spec.input_width);
    return st;
}

/// Lazily evaluated image source for one domain.
struct DomainImages {
    std::size_t count = 0;
    std::function<Image(std::size_t)> get;
};

inline DomainImages in_memory_domain(std::vector<Image> images) {
    auto shared = std::make_shared<std::vector<Image>>(std::move(images));
    return {shared->size(),
            [shared](std::size_t i) { return (*shared)[i]; }};
}

struct TrainResult {
    std::vector<LossRecord> records;
    std::string final_checkpoint;
    std::string loss_csv;
};

namespace detail {

template <typename T>
Tensor<T> gather_batch(const DomainImages& domain,
                       const std::vector<std::size_t>& indices) {
    std::vector<Image> images;
    images.reserve(indices.size());
    for (std::size_t idx : indices) images.push_back(domain.get(idx));
    return batch_from_images<T>(images);
}

} // namespace detail

/// Full training loop: epochs * ceil(max(I, J) / batch_size) steps,
/// checkpoints every cfg.checkpoint_every epochs plus a final one, and a
/// CSV loss log. Resumable: pass a checkpoint to continue an interrupted
/// run; given the stored random stream states the continuation matches the
/// uninterrupted run.
template <typename T = float>
TrainResult train(const DomainImages& V, const DomainImages& R,
                  const ArchitectureSpec& spec, const TrainingConfig& cfg,
                  const LossWeights& w, const std::string& out_dir,
                  const std::string& resume_from = "") {
    cfg.validate();
    w.validate();
    if (V.count == 0 || R.count == 0)
        throw DatasetError("training requires non-empty cleansed datasets");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    TrainerState<T> st = resume_from.empty()
                             ? TrainerState<T>::make(spec, cfg)
                             : restore_trainer<T>(Checkpoint::load(resume_from));

    const std::int64_t steps_per_epoch = static_cast<std::int64_t>(
        (std::max(V.count, R.count) + cfg.batch_size - 1) / cfg.batch_size);
    std::int64_t total_steps = steps_per_epoch * cfg.epochs;
    if (cfg.max_steps > 0) total_steps = std::min<std::int64_t>(total_steps,
                                                                cfg.max_steps);

    UnpairedSampler sampler(V.count, R.count, st.sampler_state);
    TrainResult result;
    std::vector<std::size_t> v_idx, r_idx;

    auto checkpoint_path = [&](const std::string& tag) {
        return (fs::path(out_dir) / ("checkpoint_" + tag + ".ckpt")).string();
    };

    while (st.step < total_steps) {
        sampler.next_batch(static_cast<std::size_t>(cfg.batch_size), v_idx, r_idx);
        Tensor<T> v_batch = detail::gather_batch<T>(V, v_idx);
        Tensor<T> r_batch = detail::gather_batch<T>(R, r_idx);
        st.sampler_state = sampler.state();
        LossRecord rec = train_step(st, v_batch, r_batch, cfg, w);
        result.records.push_back(rec);

        const bool epoch_end = st.step % steps_per_epoch == 0;
        if (epoch_end) {
            ++st.epoch;
            if (st.epoch % cfg.checkpoint_every == 0 && st.step < total_steps) {
                make_checkpoint(st, cfg, w)
                    .save(checkpoint_path("epoch_" + std::to_string(st.epoch)));
            }
        }
    }

    result.final_checkpoint = checkpoint_path("final");
    make_checkpoint(st, cfg, w).save(result.final_checkpoint);
    result.loss_csv = (fs::path(out_dir) / "loss_log.csv").string();
    write_loss_csv(result.loss_csv, result.records);
    return result;
}

} // namespace endo

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "endo/core/tensor.hpp"

namespace endo {

enum class GanForm { LogSaturating, LogNonSaturating };

inline std::string gan_form_name(GanForm f) {
    return f == GanForm::LogSaturating ? "log_saturating" : "log_nonsaturating";
}

inline GanForm parse_gan_form(const std::string& s) {
    if (s == "log_saturating") return GanForm::LogSaturating;
    if (s == "log_nonsaturating") return GanForm::LogNonSaturating;
    throw ParamError("unknown gan_form: " + s);
}

struct LossWeights {
    double lambda_cyc = 10.0;
    double epsilon_log = 1e-7;
    GanForm gan_form = GanForm::LogNonSaturating;

    void validate() const {
        if (lambda_cyc < 0) throw ParamError("lambda_cyc must be >= 0");
        if (epsilon_log <= 0 || epsilon_log > 1e-3)
            throw ParamError("epsilon_log must lie in (0, 1e-3]");
    }
};

namespace detail {

template <typename T>
void check_probability_grid(const Tensor<T>& g, const char* what) {
    for (const T& v : g.v)
        if (!(v >= T(-1e-6) && v <= T(1) + T(1e-6)))
            throw DomainError(std::string(what) +
                              " grid value outside [0,1]: " + std::to_string(v));
}

inline double clamped_log(double v, double eps) {
    return std::log(std::clamp(v, eps, 1.0));
}

} // namespace detail

/// Adversarial objective value: mean over batch and patch positions of
/// log(clamp(d_real)) + log(clamp(1 - d_fake)). The discriminator ascends
/// this quantity; the saturating generator descends it.
template <typename T>
double gan_value(const Tensor<T>& d_real, const Tensor<T>& d_fake, double eps) {
    if (eps <= 0) throw ParamError("gan_value eps must be positive");
    detail::check_probability_grid(d_real, "d_real");
    detail::check_probability_grid(d_fake, "d_fake");
    double real_term = 0.0, fake_term = 0.0;
    for (const T& v : d_real.v) real_term += detail::clamped_log(v, eps);
    for (const T& v : d_fake.v) fake_term += detail::clamped_log(1.0 - v, eps);
    return real_term / static_cast<double>(d_real.size()) +
           fake_term / static_cast<double>(d_fake.size());
}

/// Cycle-consistency loss: per-element mean L1 of the virtual
/// reconstruction plus per-element mean L1 of the real reconstruction.
template <typename T>
double cycle_loss(const Tensor<T>& v_batch, const Tensor<T>& v_reconstructed,
                  const Tensor<T>& r_batch, const Tensor<T>& r_reconstructed) {
    if (!v_batch.same_shape(v_reconstructed))
        throw ShapeError("cycle_loss: virtual pair shape mismatch");
    if (!r_batch.same_shape(r_reconstructed))
        throw ShapeError("cycle_loss: real pair shape mismatch");
    double sv = 0.0, sr = 0.0;
    for (std::size_t i = 0; i < v_batch.size(); ++i)
        sv += std::abs(static_cast<double>(v_reconstructed.v[i]) - v_batch.v[i]);
    for (std::size_t i = 0; i < r_batch.size(); ++i)
        sr += std::abs(static_cast<double>(r_reconstructed.v[i]) - r_batch.v[i]);
    return sv / static_cast<double>(v_batch.size()) +
           sr / static_cast<double>(r_batch.size());
}

/// Overall objective: gan_G + gan_F + lambda * cyc.
inline double total_loss(double gan_G, double gan_F, double cyc,
                         const LossWeights& w) {
    w.validate();
    if (cyc < 0) throw ParamError("cycle loss must be nonnegative");
    return gan_G + gan_F + w.lambda_cyc * cyc;
}

/// Discriminator loss (negated gan_value) with gradients w.r.t. both patch
/// grids. Entries pushed outside the clamp range contribute zero gradient.
template <typename T>
double discriminator_loss_grad(const Tensor<T>& d_real, const Tensor<T>& d_fake,
                               double eps, Tensor<T>& g_real, Tensor<T>& g_fake) {
    const double value = gan_value(d_real, d_fake, eps);
    g_real = Tensor<T>(d_real.n, d_real.c, d_real.h, d_real.w);
    g_fake = Tensor<T>(d_fake.n, d_fake.c, d_fake.h, d_fake.w);
    const double mr = static_cast<double>(d_real.size());
    const double mf = static_cast<double>(d_fake.size());
    for (std::size_t i = 0; i < d_real.size(); ++i) {
        double v = d_real.v[i];
        g_real.v[i] = v > eps ? static_cast<T>(-1.0 / (std::min(v, 1.0) * mr)) : T(0);
    }
    for (std::size_t i = 0; i < d_fake.size(); ++i) {
        double u = 1.0 - static_cast<double>(d_fake.v[i]);
        g_fake.v[i] = u > eps ? static_cast<T>(1.0 / (std::min(u, 1.0) * mf)) : T(0);
    }
    return -value;
}

/// Generator adversarial term for one direction, with gradient w.r.t.
/// D(fake). Non-saturating: -mean log D(fake); saturating: the fake half of
/// gan_value, mean log(1 - D(fake)).
template <typename T>
double generator_gan_term_grad(const Tensor<T>& d_fake, GanForm form, double eps,
                               Tensor<T>& g_fake) {
    detail::check_probability_grid(d_fake, "d_fake");
    g_fake = Tensor<T>(d_fake.n, d_fake.c, d_fake.h, d_fake.w);
    const double m = static_cast<double>(d_fake.size());
    double value = 0.0;
    if (form == GanForm::LogNonSaturating) {
        for (std::size_t i = 0; i < d_fake.size(); ++i) {
            double v = d_fake.v[i];
            value -= detail::clamped_log(v, eps);
            g_fake.v[i] =
                v > eps ? static_cast<T>(-1.0 / (std::min(v, 1.0) * m)) : T(0);
        }
    } else {
        for (std::size_t i = 0; i < d_fake.size(); ++i) {
            double u = 1.0 - static_cast<double>(d_fake.v[i]);
            value += detail::clamped_log(u, eps);
            g_fake.v[i] =
                u > eps ? static_cast<T>(-1.0 / (std::min(u, 1.0) * m)) : T(0);
        }
    }
    return value / m;
}

/// Mean L1 between a reconstruction and its target, with gradient w.r.t.
/// the reconstruction scaled by `scale`.
template <typename T>
double l1_mean_grad(const Tensor<T>& rec, const Tensor<T>& target,
                    Tensor<T>& g_rec, double scale) {
    if (!rec.same_shape(target)) throw ShapeError("l1_mean_grad shape mismatch");
    g_rec = Tensor<T>(rec.n, rec.c, rec.h, rec.w);
    const double m = static_cast<double>(rec.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        double d = static_cast<double>(rec.v[i]) - target.v[i];
        sum += std::abs(d);
        g_rec.v[i] = static_cast<T>((d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * scale / m);
    }
    return sum / m;
}

/// Fraction of patch decisions the discriminator gets right at threshold 0.5.
template <typename T>
double discriminator_accuracy(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    std::size_t correct = 0;
    for (const T& v : d_real.v) correct += v > T(0.5) ? 1 : 0;
    std::size_t real_total = d_real.size();
    std::size_t correct_fake = 0;
    for (const T& v : d_fake.v) correct_fake += v < T(0.5) ? 1 : 0;
    return 0.5 * (static_cast<double>(correct) / real_total +
                  static_cast<double>(correct_fake) / d_fake.size());
}

} // namespace endo

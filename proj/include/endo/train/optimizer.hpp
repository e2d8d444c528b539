#pragma once

#include <cmath>
#include <cstdint>

#include "endo/nets/network.hpp"

namespace endo {

/// Adaptive-moment optimizer with bias correction. One instance owns the
/// moment estimates for one network's parameter store.
template <typename T>
class Adam {
public:
    Adam() = default;
    Adam(const NetworkDescription& desc, double lr, double beta1 = 0.5,
         double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
          m_(make_param_store<T>(desc)), v_(make_param_store<T>(desc)) {}

    void step(ParamStore<T>& params, const ParamStore<T>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t s = 0; s < params.size(); ++s) {
            auto& p = params[s];
            auto& m = m_[s];
            auto& v = v_[s];
            const auto& g = grads[s];
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double gi = g[i];
                const double mi = beta1_ * m[i] + (1.0 - beta1_) * gi;
                const double vi = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
                m[i] = static_cast<T>(mi);
                v[i] = static_cast<T>(vi);
                p[i] -= static_cast<T>(lr_ * (mi / bc1) /
                                       (std::sqrt(vi / bc2) + eps_));
            }
        }
    }

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }
    std::int64_t step_count() const { return t_; }
    void set_step_count(std::int64_t t) { t_ = t; }
    ParamStore<T>& first_moments() { return m_; }
    ParamStore<T>& second_moments() { return v_; }
    const ParamStore<T>& first_moments() const { return m_; }
    const ParamStore<T>& second_moments() const { return v_; }

private:
    double lr_ = 2e-4, beta1_ = 0.5, beta2_ = 0.999, eps_ = 1e-8;
    std::int64_t t_ = 0;
    ParamStore<T> m_, v_;
};

} // namespace endo

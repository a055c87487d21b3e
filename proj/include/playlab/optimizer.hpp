#pragma once

#include <cmath>
#include <cstdint>

#include "playlab/encoder.hpp"

namespace playlab {

struct AdamConfig {
    double learning_rate = 5e-4;
    double weight_decay = 1e-6;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
struct OptimizerState {
    std::vector<Tensor<T>> first_moment;
    std::vector<Tensor<T>> second_moment;
    int64_t step = 0;

    static OptimizerState like(EncoderParams<T>& params) {
        OptimizerState state;
        for (Tensor<T>* t : params.tensors()) {
            state.first_moment.emplace_back(t->shape);
            state.second_moment.emplace_back(t->shape);
        }
        return state;
    }
};

// Decoupled weight decay: theta <- theta - lr*wd*theta - lr*mhat/(sqrt(vhat)+eps),
// with bias-corrected moments. Element math runs in double.
template <typename T>
void adamw_step(EncoderParams<T>& params, const EncoderGrads<T>& grads, OptimizerState<T>& state,
                const AdamConfig& cfg) {
    auto tensors = params.tensors();
    if (grads.tensors.size() != tensors.size())
        throw InputError("adamw_step: gradient registry size mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t t = 0; t < tensors.size(); ++t) {
        Tensor<T>& theta = *tensors[t];
        const Tensor<T>& g = grads.tensors[t];
        if (g.numel() != theta.numel()) throw InputError("adamw_step: gradient shape mismatch");
        Tensor<T>& m = state.first_moment[t];
        Tensor<T>& v = state.second_moment[t];
        for (size_t i = 0; i < theta.numel(); ++i) {
            const double grad = static_cast<double>(g.data[i]);
            const double mi = cfg.beta1 * static_cast<double>(m.data[i]) + (1.0 - cfg.beta1) * grad;
            const double vi = cfg.beta2 * static_cast<double>(v.data[i]) + (1.0 - cfg.beta2) * grad * grad;
            m.data[i] = static_cast<T>(mi);
            v.data[i] = static_cast<T>(vi);
            const double m_hat = mi / bc1;
            const double v_hat = vi / bc2;
            const double value = static_cast<double>(theta.data[i]);
            theta.data[i] = static_cast<T>(value - cfg.learning_rate * cfg.weight_decay * value -
                                           cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps));
        }
    }
}

} // namespace playlab

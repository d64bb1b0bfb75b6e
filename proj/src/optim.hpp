#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cipherlab {

// First/second moment accumulators for one group of parameters. Buffers are
// lazily sized to match the parameters on the first step.
template <class T>
struct AdamState {
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
    std::int64_t step = 0;
};

struct AdamHyper {
    double lr = 2e-4;
    double beta1 = 0.0;
    double beta2 = 0.9;
    double eps = 1e-8;
};

// Standard Adam with bias correction, applied in place. `params` and `grads`
// are parallel lists of raw buffers.
template <class T>
void adam_step(std::vector<std::vector<T>*> params, const std::vector<const std::vector<T>*>& grads,
               AdamState<T>& state, const AdamHyper& h) {
    if (!(h.lr > 0.0)) throw std::invalid_argument("adam_step: learning rate must be positive");
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: param/grad count mismatch");
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            state.m[i].assign(params[i]->size(), T(0));
            state.v[i].assign(params[i]->size(), T(0));
        }
    }
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state/param count mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<T>& p = *params[i];
        const std::vector<T>& g = *grads[i];
        if (p.size() != g.size() || p.size() != state.m[i].size())
            throw std::invalid_argument("adam_step: shape mismatch");
        std::vector<T>& m = state.m[i];
        std::vector<T>& v = state.v[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            const double mj = h.beta1 * static_cast<double>(m[j]) + (1.0 - h.beta1) * gj;
            const double vj = h.beta2 * static_cast<double>(v[j]) + (1.0 - h.beta2) * gj * gj;
            m[j] = static_cast<T>(mj);
            v[j] = static_cast<T>(vj);
            const double mhat = mj / bc1;
            const double vhat = vj / bc2;
            p[j] = static_cast<T>(static_cast<double>(p[j]) - h.lr * mhat / (std::sqrt(vhat) + h.eps));
        }
    }
}

// Log-linear warmup over three decades, ending at `base_lr` after
// `warmup_steps`, constant thereafter.
inline double lr_schedule(std::int64_t step, double base_lr = 2e-4, std::int64_t warmup_steps = 2500) {
    if (step < 0) throw std::invalid_argument("lr_schedule: negative step");
    if (warmup_steps <= 0 || step >= warmup_steps) return base_lr;
    const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(warmup_steps);
    return base_lr * std::pow(10.0, -3.0 * frac);
}

} // namespace cipherlab

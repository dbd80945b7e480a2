#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fshar/errors.hpp"
#include "fshar/network.hpp"

namespace fshar {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment accumulators, one pair per parameter tensor in
// NetworkParams traversal order.
struct AdamState {
    AdamConfig cfg;
    std::uint64_t t = 0;
    std::vector<Matrix> m;
    std::vector<Matrix> v;

    static AdamState init(const NetworkParams& params, const AdamConfig& cfg = {}) {
        AdamState s;
        s.cfg = cfg;
        for (const Matrix* p : params.tensors()) {
            s.m.push_back(Matrix::zeros_like(*p));
            s.v.push_back(Matrix::zeros_like(*p));
        }
        return s;
    }
};

// Standard Adam update with bias correction; increments the step counter.
inline void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state) {
    auto ps = params.tensors();
    auto gs = grads.tensors();
    if (state.m.size() != ps.size())
        throw InvalidConfigError("adam_step: state does not match parameter count");
    state.t += 1;
    const double b1 = state.cfg.beta1;
    const double b2 = state.cfg.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < ps.size(); ++k) {
        Matrix& p = *ps[k];
        const Matrix& g = *gs[k];
        if (!p.same_shape(g) || !p.same_shape(state.m[k]))
            throw InvalidConfigError("adam_step: shape mismatch in tensor " + std::to_string(k));
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            double& m = state.m[k].data[i];
            double& v = state.v[k].data[i];
            m = b1 * m + (1.0 - b1) * g.data[i];
            v = b2 * v + (1.0 - b2) * g.data[i] * g.data[i];
            const double mhat = m / corr1;
            const double vhat = v / corr2;
            p.data[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
        }
    }
}

// Scale all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
inline double clip_global_norm(NetworkParams& grads, double max_norm) {
    double sq = 0.0;
    for (const Matrix* g : grads.tensors()) sq += frobenius_sq(*g);
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (Matrix* g : grads.tensors()) scale_inplace(*g, s);
    }
    return norm;
}

}  // namespace fshar

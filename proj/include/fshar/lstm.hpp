#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fshar/errors.hpp"
#include "fshar/matrix.hpp"

namespace fshar {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One LSTM layer. The 4H gate dimension is ordered [input, forget, cell, output].
struct LstmLayerParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    Matrix w_ih;   // 4H x input
    Matrix w_hh;   // 4H x H
    Matrix bias;   // 4H x 1

    void validate() const {
        if (w_ih.rows != 4 * hidden_size || w_ih.cols != input_size ||
            w_hh.rows != 4 * hidden_size || w_hh.cols != hidden_size ||
            bias.rows != 4 * hidden_size || bias.cols != 1)
            throw InvalidConfigError("LstmLayerParams: weight shapes inconsistent with sizes");
    }
};

// Per-timestep activations retained for backpropagation through time.
struct LstmCache {
    std::size_t n = 0;
    std::size_t T = 0;
    std::vector<Matrix> x;        // inputs, T entries of n x input
    std::vector<Matrix> i_gate;   // post-sigmoid, n x H
    std::vector<Matrix> f_gate;
    std::vector<Matrix> g_gate;   // post-tanh candidate
    std::vector<Matrix> o_gate;
    std::vector<Matrix> c_state;  // cell state after update
    std::vector<Matrix> tanh_c;
    std::vector<Matrix> h_state;  // layer output per timestep
};

// Run the cell over a sequence given as T matrices of shape n x input.
// Initial hidden and cell states are zero.
inline LstmCache lstm_forward(const LstmLayerParams& p, const std::vector<Matrix>& x_seq) {
    p.validate();
    const std::size_t T = x_seq.size();
    const std::size_t n = T > 0 ? x_seq[0].rows : 0;
    const std::size_t H = p.hidden_size;

    LstmCache cache;
    cache.n = n;
    cache.T = T;
    cache.x = x_seq;
    cache.i_gate.resize(T);
    cache.f_gate.resize(T);
    cache.g_gate.resize(T);
    cache.o_gate.resize(T);
    cache.c_state.resize(T);
    cache.tanh_c.resize(T);
    cache.h_state.resize(T);

    Matrix h_prev(n, H);
    Matrix c_prev(n, H);
    for (std::size_t t = 0; t < T; ++t) {
        if (x_seq[t].cols != p.input_size || x_seq[t].rows != n)
            throw InvalidConfigError("lstm_forward: input shape mismatch at timestep " +
                                     std::to_string(t));
        if (!x_seq[t].all_finite())
            throw NumericInputError("lstm_forward: non-finite input at timestep " +
                                    std::to_string(t));

        // pre-activations: n x 4H
        Matrix pre = matmul_bt(x_seq[t], p.w_ih);
        Matrix rec = matmul_bt(h_prev, p.w_hh);
        add_inplace(pre, rec);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < 4 * H; ++j) pre(r, j) += p.bias(j, 0);

        Matrix ig(n, H), fg(n, H), gg(n, H), og(n, H), c(n, H), tc(n, H), h(n, H);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < H; ++j) {
                const double ai = pre(r, j);
                const double af = pre(r, H + j);
                const double ag = pre(r, 2 * H + j);
                const double ao = pre(r, 3 * H + j);
                const double iv = sigmoid(ai);
                const double fv = sigmoid(af);
                const double gv = std::tanh(ag);
                const double ov = sigmoid(ao);
                const double cv = fv * c_prev(r, j) + iv * gv;
                const double tcv = std::tanh(cv);
                ig(r, j) = iv;
                fg(r, j) = fv;
                gg(r, j) = gv;
                og(r, j) = ov;
                c(r, j) = cv;
                tc(r, j) = tcv;
                h(r, j) = ov * tcv;
            }
        }
        cache.i_gate[t] = std::move(ig);
        cache.f_gate[t] = std::move(fg);
        cache.g_gate[t] = std::move(gg);
        cache.o_gate[t] = std::move(og);
        cache.c_state[t] = c;
        cache.tanh_c[t] = std::move(tc);
        cache.h_state[t] = h;
        h_prev = std::move(h);
        c_prev = std::move(c);
    }
    return cache;
}

struct LstmBackwardResult {
    Matrix dw_ih;            // 4H x input
    Matrix dw_hh;            // 4H x H
    Matrix dbias;            // 4H x 1
    std::vector<Matrix> dx;  // T entries of n x input
};

// Backpropagation through time. dh_ext[t] is the external gradient flowing
// into h_t (n x H); recurrent contributions are accumulated internally.
inline LstmBackwardResult lstm_backward(const LstmLayerParams& p, const LstmCache& cache,
                                        const std::vector<Matrix>& dh_ext) {
    const std::size_t T = cache.T;
    const std::size_t n = cache.n;
    const std::size_t H = p.hidden_size;
    if (dh_ext.size() != T)
        throw InvalidConfigError("lstm_backward: dh_ext length does not match sequence");

    LstmBackwardResult res;
    res.dw_ih = Matrix(4 * H, p.input_size);
    res.dw_hh = Matrix(4 * H, H);
    res.dbias = Matrix(4 * H, 1);
    res.dx.resize(T);

    Matrix dh_rec(n, H);
    Matrix dc(n, H);
    for (std::size_t ti = T; ti-- > 0;) {
        const Matrix& ig = cache.i_gate[ti];
        const Matrix& fg = cache.f_gate[ti];
        const Matrix& gg = cache.g_gate[ti];
        const Matrix& og = cache.o_gate[ti];
        const Matrix& tc = cache.tanh_c[ti];
        const Matrix* c_prev = ti > 0 ? &cache.c_state[ti - 1] : nullptr;
        const Matrix* h_prev = ti > 0 ? &cache.h_state[ti - 1] : nullptr;

        // gate pre-activation gradients, packed n x 4H in gate order
        Matrix da(n, 4 * H);
        Matrix dc_prev(n, H);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < H; ++j) {
                const double dh = dh_ext[ti](r, j) + dh_rec(r, j);
                const double dtc = dh * og(r, j);
                const double dcv = dc(r, j) + dtc * (1.0 - tc(r, j) * tc(r, j));
                const double cp = c_prev ? (*c_prev)(r, j) : 0.0;
                const double di = dcv * gg(r, j);
                const double df = dcv * cp;
                const double dg = dcv * ig(r, j);
                const double do_ = dh * tc(r, j);
                da(r, j) = di * ig(r, j) * (1.0 - ig(r, j));
                da(r, H + j) = df * fg(r, j) * (1.0 - fg(r, j));
                da(r, 2 * H + j) = dg * (1.0 - gg(r, j) * gg(r, j));
                da(r, 3 * H + j) = do_ * og(r, j) * (1.0 - og(r, j));
                dc_prev(r, j) = dcv * fg(r, j);
            }
        }

        add_inplace(res.dw_ih, matmul_at(da, cache.x[ti]));
        if (h_prev) add_inplace(res.dw_hh, matmul_at(da, *h_prev));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < 4 * H; ++j) res.dbias(j, 0) += da(r, j);

        res.dx[ti] = matmul(da, p.w_ih);
        dh_rec = matmul(da, p.w_hh);
        dc = std::move(dc_prev);
    }
    return res;
}

}  // namespace fshar

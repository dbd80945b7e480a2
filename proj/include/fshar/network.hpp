#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fshar/batch.hpp"
#include "fshar/errors.hpp"
#include "fshar/lstm.hpp"
#include "fshar/matrix.hpp"

namespace fshar {

// Layer sizes for the stacked-LSTM classifier: two LSTM layers with the same
// hidden size, fc1 with ReLU, fc2 as linear embedding, softmax classifier.
struct NetworkShape {
    std::size_t input_channels = 0;
    std::size_t lstm_hidden = 0;
    std::size_t fc1_size = 0;
    std::size_t embed_dim = 0;
    std::size_t num_classes = 0;

    void validate() const {
        if (input_channels == 0 || lstm_hidden == 0 || fc1_size == 0 || embed_dim == 0 ||
            num_classes == 0)
            throw InvalidConfigError("NetworkShape: all sizes must be positive");
    }

    bool operator==(const NetworkShape&) const = default;
};

// All learnable parameters. Gradients reuse this type with matching shapes.
struct NetworkParams {
    LstmLayerParams lstm1;
    LstmLayerParams lstm2;
    Matrix fc1_w;          // fc1_size x lstm_hidden
    Matrix fc1_b;          // fc1_size x 1
    Matrix fc2_w;          // embed_dim x fc1_size
    Matrix fc2_b;          // embed_dim x 1
    Matrix classifier_w;   // num_classes x embed_dim

    NetworkShape shape() const {
        return {lstm1.input_size, lstm1.hidden_size, fc1_w.rows, fc2_w.rows, classifier_w.rows};
    }

    static NetworkParams zeros(const NetworkShape& s) {
        s.validate();
        NetworkParams p;
        p.lstm1.input_size = s.input_channels;
        p.lstm1.hidden_size = s.lstm_hidden;
        p.lstm1.w_ih = Matrix(4 * s.lstm_hidden, s.input_channels);
        p.lstm1.w_hh = Matrix(4 * s.lstm_hidden, s.lstm_hidden);
        p.lstm1.bias = Matrix(4 * s.lstm_hidden, 1);
        p.lstm2.input_size = s.lstm_hidden;
        p.lstm2.hidden_size = s.lstm_hidden;
        p.lstm2.w_ih = Matrix(4 * s.lstm_hidden, s.lstm_hidden);
        p.lstm2.w_hh = Matrix(4 * s.lstm_hidden, s.lstm_hidden);
        p.lstm2.bias = Matrix(4 * s.lstm_hidden, 1);
        p.fc1_w = Matrix(s.fc1_size, s.lstm_hidden);
        p.fc1_b = Matrix(s.fc1_size, 1);
        p.fc2_w = Matrix(s.embed_dim, s.fc1_size);
        p.fc2_b = Matrix(s.embed_dim, 1);
        p.classifier_w = Matrix(s.num_classes, s.embed_dim);
        return p;
    }

    // Fixed traversal order shared by Adam, gradient clipping, and the checker.
    std::vector<Matrix*> tensors() {
        return {&lstm1.w_ih, &lstm1.w_hh, &lstm1.bias, &lstm2.w_ih, &lstm2.w_hh, &lstm2.bias,
                &fc1_w,      &fc1_b,      &fc2_w,      &fc2_b,      &classifier_w};
    }
    std::vector<const Matrix*> tensors() const {
        return {&lstm1.w_ih, &lstm1.w_hh, &lstm1.bias, &lstm2.w_ih, &lstm2.w_hh, &lstm2.bias,
                &fc1_w,      &fc1_b,      &fc2_w,      &fc2_b,      &classifier_w};
    }
    static const std::array<const char*, 11>& tensor_names() {
        static const std::array<const char*, 11> names = {
            "lstm1.w_ih", "lstm1.w_hh", "lstm1.bias", "lstm2.w_ih", "lstm2.w_hh", "lstm2.bias",
            "fc1.w",      "fc1.b",      "fc2.w",      "fc2.b",      "classifier.w"};
        return names;
    }

    bool operator==(const NetworkParams& other) const {
        auto a = tensors();
        auto b = other.tensors();
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!(*a[k] == *b[k])) return false;
        }
        return true;
    }
};

namespace detail {

inline void glorot_fill(Matrix& m, std::mt19937_64& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    std::uniform_real_distribution<double> dist(-s, s);
    for (double& v : m.data) v = dist(rng);
}

}  // namespace detail

// Glorot-uniform weights, zero biases, LSTM forget-gate bias offset +1.
// Deterministic for a given seed.
inline NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
    NetworkParams p = NetworkParams::zeros(shape);
    std::mt19937_64 rng(seed);
    detail::glorot_fill(p.lstm1.w_ih, rng);
    detail::glorot_fill(p.lstm1.w_hh, rng);
    detail::glorot_fill(p.lstm2.w_ih, rng);
    detail::glorot_fill(p.lstm2.w_hh, rng);
    detail::glorot_fill(p.fc1_w, rng);
    detail::glorot_fill(p.fc2_w, rng);
    detail::glorot_fill(p.classifier_w, rng);
    const std::size_t H = shape.lstm_hidden;
    for (std::size_t j = 0; j < H; ++j) {
        p.lstm1.bias(H + j, 0) = 1.0;
        p.lstm2.bias(H + j, 0) = 1.0;
    }
    return p;
}

namespace detail {

struct ForwardCache {
    LstmCache lstm1;
    LstmCache lstm2;
    Matrix last_h;    // n x H
    Matrix fc1_pre;   // n x fc1
    Matrix fc1_out;   // n x fc1, after ReLU
    Matrix emb;       // n x embed
};

inline ForwardCache forward_embed(const NetworkParams& p, const SequenceBatch& batch) {
    if (batch.C != p.lstm1.input_size)
        throw InvalidConfigError("feature_extract: batch has " + std::to_string(batch.C) +
                                 " channels, network expects " +
                                 std::to_string(p.lstm1.input_size));
    std::vector<Matrix> x_seq(batch.T);
    for (std::size_t t = 0; t < batch.T; ++t) x_seq[t] = batch.timestep(t);

    ForwardCache fc;
    fc.lstm1 = lstm_forward(p.lstm1, x_seq);
    fc.lstm2 = lstm_forward(p.lstm2, fc.lstm1.h_state);
    fc.last_h = batch.T > 0 ? fc.lstm2.h_state[batch.T - 1] : Matrix(batch.n, p.lstm2.hidden_size);

    fc.fc1_pre = matmul_bt(fc.last_h, p.fc1_w);
    for (std::size_t i = 0; i < fc.fc1_pre.rows; ++i)
        for (std::size_t j = 0; j < fc.fc1_pre.cols; ++j) fc.fc1_pre(i, j) += p.fc1_b(j, 0);
    fc.fc1_out = fc.fc1_pre;
    for (double& v : fc.fc1_out.data) v = std::max(0.0, v);

    fc.emb = matmul_bt(fc.fc1_out, p.fc2_w);
    for (std::size_t i = 0; i < fc.emb.rows; ++i)
        for (std::size_t j = 0; j < fc.emb.cols; ++j) fc.emb(i, j) += p.fc2_b(j, 0);
    return fc;
}

// Row-wise log-softmax of emb * w^T, numerically safe via max subtraction.
inline Matrix log_softmax_logits(const Matrix& classifier_w, const Matrix& emb) {
    if (emb.cols != classifier_w.cols)
        throw InvalidConfigError("classify: embedding dim " + std::to_string(emb.cols) +
                                 " does not match classifier dim " +
                                 std::to_string(classifier_w.cols));
    Matrix logp = matmul_bt(emb, classifier_w);
    for (std::size_t i = 0; i < logp.rows; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < logp.cols; ++j) mx = std::max(mx, logp(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < logp.cols; ++j) sum += std::exp(logp(i, j) - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t j = 0; j < logp.cols; ++j) logp(i, j) -= lse;
    }
    return logp;
}

}  // namespace detail

// Encoder output f(X): lstm1 -> lstm2 -> last hidden state -> fc1+ReLU -> fc2.
inline Matrix feature_extract(const NetworkParams& p, const SequenceBatch& batch) {
    return detail::forward_embed(p, batch).emb;
}

// Softmax class probabilities, one row per embedding row.
inline Matrix classify(const Matrix& classifier_w, const Matrix& emb) {
    Matrix probs = detail::log_softmax_logits(classifier_w, emb);
    for (double& v : probs.data) v = std::exp(v);
    return probs;
}

inline std::vector<int> predict(const NetworkParams& p, const SequenceBatch& batch) {
    const Matrix logp = detail::log_softmax_logits(p.classifier_w, feature_extract(p, batch));
    std::vector<int> out(logp.rows);
    for (std::size_t i = 0; i < logp.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < logp.cols; ++j) {
            if (logp(i, j) > logp(i, best)) best = j;
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

inline double accuracy_pct(const NetworkParams& p, const SequenceBatch& batch) {
    if (batch.n == 0) throw InvalidInputError("accuracy_pct: empty batch");
    const std::vector<int> pred = predict(p, batch);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < batch.n; ++i) {
        if (pred[i] == batch.labels[i]) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(batch.n);
}

struct LossGrads {
    double loss = 0.0;
    NetworkParams grads;
};

// Mean cross-entropy over the batch plus gradients for every parameter,
// backpropagated through both LSTM layers.
inline LossGrads loss_and_grads(const NetworkParams& p, const SequenceBatch& batch) {
    if (batch.n == 0) throw InvalidInputError("loss_and_grads: empty batch");
    const std::size_t c = p.classifier_w.rows;
    for (int l : batch.labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= c)
            throw InvalidInputError("loss_and_grads: label " + std::to_string(l) +
                                    " outside [0, " + std::to_string(c) + ")");
    }

    detail::ForwardCache fc = detail::forward_embed(p, batch);
    const Matrix logp = detail::log_softmax_logits(p.classifier_w, fc.emb);

    const std::size_t n = batch.n;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss -= logp(i, static_cast<std::size_t>(batch.labels[i]));
    loss /= static_cast<double>(n);

    // d loss / d logits = (softmax - onehot) / n
    Matrix dlogits(n, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j)
            dlogits(i, j) = (std::exp(logp(i, j)) -
                             (static_cast<std::size_t>(batch.labels[i]) == j ? 1.0 : 0.0)) /
                            static_cast<double>(n);

    LossGrads out;
    out.loss = loss;
    out.grads = NetworkParams::zeros(p.shape());

    out.grads.classifier_w = matmul_at(dlogits, fc.emb);
    Matrix demb = matmul(dlogits, p.classifier_w);

    out.grads.fc2_w = matmul_at(demb, fc.fc1_out);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < demb.cols; ++j) out.grads.fc2_b(j, 0) += demb(i, j);
    Matrix dfc1 = matmul(demb, p.fc2_w);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dfc1.cols; ++j)
            if (fc.fc1_pre(i, j) <= 0.0) dfc1(i, j) = 0.0;

    out.grads.fc1_w = matmul_at(dfc1, fc.last_h);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dfc1.cols; ++j) out.grads.fc1_b(j, 0) += dfc1(i, j);
    Matrix dlast_h = matmul(dfc1, p.fc1_w);

    // only the last timestep of lstm2 feeds the fully connected stack
    std::vector<Matrix> dh2(batch.T, Matrix(n, p.lstm2.hidden_size));
    if (batch.T > 0) dh2[batch.T - 1] = std::move(dlast_h);
    LstmBackwardResult back2 = lstm_backward(p.lstm2, fc.lstm2, dh2);
    out.grads.lstm2.w_ih = std::move(back2.dw_ih);
    out.grads.lstm2.w_hh = std::move(back2.dw_hh);
    out.grads.lstm2.bias = std::move(back2.dbias);

    LstmBackwardResult back1 = lstm_backward(p.lstm1, fc.lstm1, back2.dx);
    out.grads.lstm1.w_ih = std::move(back1.dw_ih);
    out.grads.lstm1.w_hh = std::move(back1.dw_hh);
    out.grads.lstm1.bias = std::move(back1.dbias);
    return out;
}

}  // namespace fshar

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fshar/adam.hpp"
#include "fshar/batch.hpp"
#include "fshar/errors.hpp"
#include "fshar/network.hpp"
#include "fshar/relevance.hpp"

namespace fshar {

struct TrainConfig {
    std::size_t epochs = 100;
    AdamConfig adam{};
    double clip_norm = 5.0;
    std::size_t full_batch_limit = 256;  // above this, switch to minibatches
    std::size_t minibatch = 64;
};

namespace detail {

// Adam training loop: full batch for small sets, shuffled minibatches above
// full_batch_limit. Deterministic for a given seed.
inline void train_params(NetworkParams& params, const SequenceBatch& batch,
                         const TrainConfig& cfg, std::uint64_t seed) {
    if (batch.n == 0) throw InvalidInputError("train: empty training set");
    AdamState state = AdamState::init(params, cfg.adam);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (batch.n <= cfg.full_batch_limit) {
            LossGrads lg = loss_and_grads(params, batch);
            clip_global_norm(lg.grads, cfg.clip_norm);
            adam_step(params, lg.grads, state);
            continue;
        }
        std::vector<std::size_t> order(batch.n);
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(mix_seed(seed, epoch));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < batch.n; start += cfg.minibatch) {
            const std::size_t end = std::min(batch.n, start + cfg.minibatch);
            const SequenceBatch mb =
                batch.select({order.begin() + static_cast<std::ptrdiff_t>(start),
                              order.begin() + static_cast<std::ptrdiff_t>(end)});
            LossGrads lg = loss_and_grads(params, mb);
            clip_global_norm(lg.grads, cfg.clip_norm);
            adam_step(params, lg.grads, state);
        }
    }
}

}  // namespace detail

// Source network plus training metadata; read-only once trained.
struct SourceModel {
    NetworkParams params;
    std::size_t epochs = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::uint64_t seed = 0;
    bool trained = false;

    std::size_t num_classes() const { return params.classifier_w.rows; }
    std::size_t embed_dim() const { return params.classifier_w.cols; }
};

// Train the source classifier from a random initialization. Labels must be
// contiguous from 0 with at least two classes.
inline SourceModel train_source(const SequenceBatch& data, const NetworkShape& shape,
                                const TrainConfig& cfg, std::uint64_t seed) {
    data.validate();
    if (data.n == 0) throw InvalidInputError("train_source: empty source set");
    const std::size_t c = data.num_classes();
    if (c < 2) throw InvalidInputError("train_source: need at least two source classes");
    std::vector<std::size_t> counts(c, 0);
    for (int l : data.labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t k = 0; k < c; ++k) {
        if (counts[k] == 0)
            throw InvalidInputError("train_source: class " + std::to_string(k) +
                                    " has no samples; labels must be contiguous from 0");
    }
    NetworkShape full = shape;
    full.num_classes = c;
    full.input_channels = data.C;
    full.validate();

    SourceModel model;
    model.params = init_params(full, seed);
    model.seed = seed;
    model.epochs = cfg.epochs;
    model.initial_loss = loss_and_grads(model.params, data).loss;
    detail::train_params(model.params, data, cfg, mix_seed(seed, 0x5A5A5A5AULL));
    model.final_loss = loss_and_grads(model.params, data).loss;
    model.trained = true;
    return model;
}

// A target network ready for fine-tuning: the source feature extractor plus
// a classifier initialized by one of the transfer schemes.
struct TargetInit {
    NetworkParams params;
    std::string method;
};

// W_trg^0 = W^T W_src with W the normalized class relevance matrix; the
// feature extractor is copied verbatim.
inline TargetInit init_target(const SourceModel& source, const Matrix& transfer_weights) {
    if (transfer_weights.rows != source.num_classes())
        throw InvalidConfigError("init_target: transfer weights have " +
                                 std::to_string(transfer_weights.rows) + " rows, source has " +
                                 std::to_string(source.num_classes()) + " classes");
    if (transfer_weights.cols == 0)
        throw InvalidConfigError("init_target: no target classes");
    TargetInit init;
    init.params = source.params;
    init.params.classifier_w = matmul_at(transfer_weights, source.params.classifier_w);
    return init;
}

// Imprinting: each target class row is the mean source-encoder embedding of
// its training samples. The normalize switch adds the row re-normalization
// used by the imprinting literature; the default keeps plain means.
inline TargetInit imprint_weights(const SourceModel& source, const SequenceBatch& trg_train,
                                  bool normalize_rows = false) {
    if (trg_train.n == 0) throw InvalidInputError("imprint_weights: empty training set");
    const std::size_t c_trg = trg_train.num_classes();
    const Matrix emb = feature_extract(source.params, trg_train);

    Matrix w(c_trg, emb.cols);
    std::vector<std::size_t> counts(c_trg, 0);
    for (std::size_t i = 0; i < trg_train.n; ++i) {
        const std::size_t k = static_cast<std::size_t>(trg_train.labels[i]);
        ++counts[k];
        for (std::size_t j = 0; j < emb.cols; ++j) w(k, j) += emb(i, j);
    }
    for (std::size_t k = 0; k < c_trg; ++k) {
        if (counts[k] == 0)
            throw InvalidInputError("imprint_weights: target class " + std::to_string(k) +
                                    " has no training samples");
        for (std::size_t j = 0; j < w.cols; ++j) w(k, j) /= static_cast<double>(counts[k]);
        if (normalize_rows) {
            const double norm = row_norm2(w, k);
            if (norm == 0.0)
                throw DegenerateEmbeddingError("imprint_weights: zero-norm class mean " +
                                               std::to_string(k));
            for (std::size_t j = 0; j < w.cols; ++j) w(k, j) /= norm;
        }
    }

    TargetInit init;
    init.params = source.params;
    init.params.classifier_w = std::move(w);
    init.method = "imprint";
    return init;
}

// Feature-extractor-only transfer: copied encoder, fresh Glorot classifier.
inline TargetInit fetr_softmax_init(const SourceModel& source, std::size_t c_trg,
                                    std::uint64_t seed) {
    if (c_trg == 0) throw InvalidConfigError("fetr_softmax_init: no target classes");
    TargetInit init;
    init.params = source.params;
    init.params.classifier_w = Matrix(c_trg, source.embed_dim());
    std::mt19937_64 rng(seed);
    detail::glorot_fill(init.params.classifier_w, rng);
    init.method = "fetr_softmax";
    return init;
}

// Nearest-neighbor classification on embeddings: each test sample takes the
// label of the training sample with the highest softmax-normalized
// exponential cosine similarity. The softmax is monotone, so the argmax
// equals the raw cosine argmax; no fine-tuning is involved.
inline std::vector<int> nn_classify_embeddings(const Matrix& train_emb,
                                               const std::vector<int>& train_labels,
                                               const Matrix& test_emb) {
    if (train_emb.rows == 0) throw InvalidInputError("nn_classify: empty training set");
    if (train_labels.size() != train_emb.rows)
        throw InvalidConfigError("nn_classify: label count does not match embeddings");
    const Matrix sim = cosine_relevance(train_emb, test_emb);  // n_train x n_test

    std::vector<int> labels(test_emb.rows);
    for (std::size_t j = 0; j < test_emb.rows; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < train_emb.rows; ++i) {
            if (sim(i, j) > sim(best, j)) best = i;
        }
        labels[j] = train_labels[best];
    }
    return labels;
}

inline std::vector<int> nn_classify(const SourceModel& source, const SequenceBatch& trg_train,
                                    const SequenceBatch& test) {
    return nn_classify_embeddings(feature_extract(source.params, trg_train), trg_train.labels,
                                  feature_extract(source.params, test));
}

// Fine-tune the whole target network (feature extractor and classifier) on
// the target training samples. Zero epochs returns the initialization as is.
inline NetworkParams fine_tune(const TargetInit& init, const SequenceBatch& trg_train,
                               const TrainConfig& cfg, std::uint64_t seed = 0) {
    if (trg_train.n == 0) throw InvalidInputError("fine_tune: empty training set");
    const std::size_t c = init.params.classifier_w.rows;
    for (int l : trg_train.labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= c)
            throw InvalidInputError("fine_tune: label " + std::to_string(l) + " outside [0, " +
                                    std::to_string(c) + ")");
    }
    NetworkParams params = init.params;
    if (cfg.epochs == 0) return params;
    detail::train_params(params, trg_train, cfg, seed);
    return params;
}

// Combined classifier over source and target label spaces: source rows
// first, verbatim, then the initialized target rows; encoder from the source.
inline NetworkParams merge_models(const SourceModel& source, const TargetInit& init) {
    const Matrix& w_src = source.params.classifier_w;
    const Matrix& w_trg = init.params.classifier_w;
    if (w_src.cols != w_trg.cols)
        throw InvalidConfigError("merge_models: embedding dimensions differ");

    NetworkParams merged = source.params;
    Matrix combined(w_src.rows + w_trg.rows, w_src.cols);
    std::copy(w_src.data.begin(), w_src.data.end(), combined.data.begin());
    std::copy(w_trg.data.begin(), w_trg.data.end(),
              combined.data.begin() + static_cast<std::ptrdiff_t>(w_src.data.size()));
    merged.classifier_w = std::move(combined);
    return merged;
}

}  // namespace fshar

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "fshar/errors.hpp"
#include "fshar/matrix.hpp"

namespace fshar {

// A set of fixed-length multichannel windows with integer class labels.
// values is laid out [sample][timestep][channel].
struct SequenceBatch {
    std::size_t n = 0;  // samples
    std::size_t T = 0;  // timesteps per window
    std::size_t C = 0;  // channels
    std::vector<double> values;  // n * T * C
    std::vector<int> labels;     // size n

    SequenceBatch() = default;
    SequenceBatch(std::size_t n_, std::size_t T_, std::size_t C_)
        : n(n_), T(T_), C(C_), values(n_ * T_ * C_, 0.0), labels(n_, 0) {}

    double& value(std::size_t i, std::size_t t, std::size_t c) {
        return values[(i * T + t) * C + c];
    }
    double value(std::size_t i, std::size_t t, std::size_t c) const {
        return values[(i * T + t) * C + c];
    }

    // Largest label + 1; labels are expected contiguous from 0.
    std::size_t num_classes() const {
        int maxl = -1;
        for (int l : labels) maxl = std::max(maxl, l);
        return static_cast<std::size_t>(maxl + 1);
    }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    void validate() const {
        if (values.size() != n * T * C)
            throw InvalidConfigError("SequenceBatch: values size does not match n*T*C");
        if (labels.size() != n)
            throw InvalidConfigError("SequenceBatch: label count does not match n");
        if (!all_finite()) throw NumericInputError("SequenceBatch: non-finite value");
        for (int l : labels) {
            if (l < 0) throw InvalidInputError("SequenceBatch: negative label");
        }
    }

    // Gather the given samples into a new batch (order preserved).
    SequenceBatch select(const std::vector<std::size_t>& indices) const {
        SequenceBatch out(indices.size(), T, C);
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const std::size_t i = indices[k];
            std::copy(values.begin() + i * T * C, values.begin() + (i + 1) * T * C,
                      out.values.begin() + k * T * C);
            out.labels[k] = labels[i];
        }
        return out;
    }

    // Timestep t of every sample as an n x C matrix.
    Matrix timestep(std::size_t t) const {
        Matrix m(n, C);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < C; ++c) m(i, c) = value(i, t, c);
        return m;
    }
};

}  // namespace fshar

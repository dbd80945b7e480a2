#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "fshar/network.hpp"

namespace fshar {

struct GradCheckEntry {
    std::string tensor;
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    std::size_t entries_checked = 0;
    double max_rel_err = 0.0;
    bool passed = false;
    GradCheckEntry worst;
    std::vector<double> per_tensor_max;  // NetworkParams traversal order
};

// Compare every analytic gradient entry against a central finite difference
// of the loss. The relative error denominator is floored at 1e-4 so entries
// that are numerically zero on both sides compare by absolute error.
inline GradCheckReport check_gradients(const NetworkParams& params, const SequenceBatch& batch,
                                       double h = 1e-5, double tol = 1e-4) {
    NetworkParams work = params;
    const LossGrads analytic = loss_and_grads(work, batch);

    GradCheckReport report;
    auto ws = work.tensors();
    auto gs = analytic.grads.tensors();
    report.per_tensor_max.assign(ws.size(), 0.0);

    for (std::size_t k = 0; k < ws.size(); ++k) {
        Matrix& tensor = *ws[k];
        const Matrix& grad = *gs[k];
        for (std::size_t i = 0; i < tensor.data.size(); ++i) {
            const double saved = tensor.data[i];
            tensor.data[i] = saved + h;
            const double loss_plus = loss_and_grads(work, batch).loss;
            tensor.data[i] = saved - h;
            const double loss_minus = loss_and_grads(work, batch).loss;
            tensor.data[i] = saved;

            const double numeric = (loss_plus - loss_minus) / (2.0 * h);
            const double a = grad.data[i];
            const double denom = std::max(std::abs(a) + std::abs(numeric), 1e-4);
            const double rel = std::abs(a - numeric) / denom;

            ++report.entries_checked;
            report.per_tensor_max[k] = std::max(report.per_tensor_max[k], rel);
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = {NetworkParams::tensor_names()[k], i, a, numeric, rel};
            }
        }
    }
    report.passed = report.max_rel_err < tol;
    return report;
}

}  // namespace fshar

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fshar/errors.hpp"
#include "fshar/matrix.hpp"

namespace fshar {

// A_ij = exp(cos(src_i, trg_j)) over L2-normalized embedding rows.
// Entries land in [1/e, e]; rows with zero norm are rejected.
inline Matrix cosine_relevance(const Matrix& src_emb, const Matrix& trg_emb) {
    if (src_emb.cols != trg_emb.cols)
        throw InvalidConfigError("cosine_relevance: embedding dimensions differ");
    auto normalize_rows = [](const Matrix& m, const char* side) {
        Matrix out = m;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double norm = row_norm2(m, i);
            if (norm == 0.0)
                throw DegenerateEmbeddingError(std::string("cosine_relevance: zero-norm ") +
                                               side + " embedding row " + std::to_string(i));
            for (std::size_t j = 0; j < m.cols; ++j) out(i, j) /= norm;
        }
        return out;
    };
    const Matrix s = normalize_rows(src_emb, "source");
    const Matrix t = normalize_rows(trg_emb, "target");
    Matrix a = matmul_bt(s, t);
    for (double& v : a.data) v = std::exp(v);
    return a;
}

struct SparseSolveResult {
    Matrix a;                            // n_src x n_trg reconstruction matrix
    std::vector<double> objective_trace; // objective per iterate, starting at A = 0
    bool converged = false;
    std::size_t iterations = 0;
};

namespace detail {

// smooth part: (1 / (2 n_trg)) * ||A^T F_src - F_trg||_F^2
inline double sparse_smooth(const Matrix& a, const Matrix& src, const Matrix& trg) {
    Matrix resid = matmul_at(a, src);
    for (std::size_t i = 0; i < resid.data.size(); ++i) resid.data[i] -= trg.data[i];
    return frobenius_sq(resid) / (2.0 * static_cast<double>(trg.rows));
}

inline Matrix sparse_smooth_grad(const Matrix& a, const Matrix& src, const Matrix& trg) {
    Matrix resid = matmul_at(a, src);  // n_trg x d
    for (std::size_t i = 0; i < resid.data.size(); ++i) resid.data[i] -= trg.data[i];
    Matrix grad = matmul_bt(src, resid);  // n_src x n_trg
    scale_inplace(grad, 1.0 / static_cast<double>(trg.rows));
    return grad;
}

// row-wise group soft threshold: prox of thresh * ||.||_{2,1}
inline Matrix group_soft_threshold(const Matrix& a, double thresh) {
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double norm = row_norm2(a, i);
        const double scale = norm <= thresh ? 0.0 : 1.0 - thresh / norm;
        for (std::size_t j = 0; j < a.cols; ++j) out(i, j) = a(i, j) * scale;
    }
    return out;
}

}  // namespace detail

// Minimize (1/(2 n_trg)) ||A^T F_src - F_trg||_F^2 + lambda ||A||_{2,1} by
// proximal gradient descent with backtracking line search, starting at A = 0.
// The backtracking condition makes the objective trace non-increasing.
inline SparseSolveResult sparse_reconstruction(const Matrix& src_emb, const Matrix& trg_emb,
                                               double lambda, double tol = 1e-6,
                                               std::size_t max_iter = 1000) {
    if (src_emb.cols != trg_emb.cols)
        throw InvalidConfigError("sparse_reconstruction: embedding dimensions differ");
    if (lambda <= 0.0) throw InvalidConfigError("sparse_reconstruction: lambda must be > 0");
    if (trg_emb.rows == 0) throw InvalidInputError("sparse_reconstruction: empty target set");

    const std::size_t m = trg_emb.rows;
    SparseSolveResult res;
    res.a = Matrix(src_emb.rows, m);

    auto objective = [&](const Matrix& a) {
        return detail::sparse_smooth(a, src_emb, trg_emb) + lambda * l_rp_norm(a, 2, 1);
    };

    // conservative Lipschitz bound: trace(F_src F_src^T) / n_trg; start a bit above 1/L
    double trace = 0.0;
    for (double v : src_emb.data) trace += v * v;
    double step = trace > 0.0 ? 4.0 * static_cast<double>(m) / trace : 1.0;

    double f_cur = objective(res.a);
    res.objective_trace.push_back(f_cur);

    for (std::size_t it = 0; it < max_iter; ++it) {
        const Matrix grad = detail::sparse_smooth_grad(res.a, src_emb, trg_emb);
        const double g_cur = detail::sparse_smooth(res.a, src_emb, trg_emb);

        Matrix next;
        while (true) {
            Matrix cand = res.a;
            for (std::size_t i = 0; i < cand.data.size(); ++i)
                cand.data[i] -= step * grad.data[i];
            cand = detail::group_soft_threshold(cand, step * lambda);

            double lin = 0.0, dist_sq = 0.0;
            for (std::size_t i = 0; i < cand.data.size(); ++i) {
                const double diff = cand.data[i] - res.a.data[i];
                lin += grad.data[i] * diff;
                dist_sq += diff * diff;
            }
            const double g_next = detail::sparse_smooth(cand, src_emb, trg_emb);
            if (g_next <= g_cur + lin + dist_sq / (2.0 * step) + 1e-15) {
                next = std::move(cand);
                break;
            }
            step *= 0.5;
            if (step < 1e-16) {  // no progress possible at machine precision
                next = res.a;
                break;
            }
        }

        // The descent lemma guarantees objective decrease; the acceptance test
        // below only rejects steps lost to floating-point noise.
        const double f_candidate = objective(next);
        const bool accepted = f_candidate <= f_cur;
        if (accepted) res.a = std::move(next);
        const double f_new = accepted ? f_candidate : f_cur;
        res.objective_trace.push_back(f_new);
        res.iterations = it + 1;

        const double rel_change = std::abs(f_cur - f_new) / std::max(1.0, std::abs(f_cur));
        f_cur = f_new;
        if (rel_change < tol) {
            res.converged = true;
            break;
        }
        step *= 1.25;  // let the step recover after backtracking
    }
    return res;
}

// Pairwise sample relevance read off the reconstruction matrix: |A_ij|.
inline Matrix sparse_relevance(const Matrix& a) {
    Matrix out = a;
    for (double& v : out.data) v = std::abs(v);
    return out;
}

// Row L2 norms of A, the per-source-sample relevance diagnostic.
inline std::vector<double> row_l2_norms(const Matrix& a) {
    std::vector<double> norms(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) norms[i] = row_norm2(a, i);
    return norms;
}

// O_pq = sum over samples of class p (source) and class q (target) of A_ij.
inline Matrix aggregate_classwise(const Matrix& a, const std::vector<int>& src_labels,
                                  const std::vector<int>& trg_labels) {
    if (src_labels.size() != a.rows || trg_labels.size() != a.cols)
        throw InvalidConfigError("aggregate_classwise: label counts do not match matrix");
    int c_src = 0, c_trg = 0;
    for (int l : src_labels) {
        if (l < 0) throw InvalidInputError("aggregate_classwise: negative source label");
        c_src = std::max(c_src, l + 1);
    }
    for (int l : trg_labels) {
        if (l < 0) throw InvalidInputError("aggregate_classwise: negative target label");
        c_trg = std::max(c_trg, l + 1);
    }
    Matrix o(static_cast<std::size_t>(c_src), static_cast<std::size_t>(c_trg));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            o(static_cast<std::size_t>(src_labels[i]), static_cast<std::size_t>(trg_labels[j])) +=
                a(i, j);
    return o;
}

// Column-stochastic rescaling; an all-zero column falls back to uniform.
inline Matrix normalize_soft(const Matrix& o) {
    for (double v : o.data) {
        if (v < 0.0) throw InvalidInputError("normalize_soft: negative relevance entry");
    }
    Matrix w = o;
    for (std::size_t q = 0; q < o.cols; ++q) {
        double sum = 0.0;
        for (std::size_t p = 0; p < o.rows; ++p) sum += o(p, q);
        if (sum == 0.0) {
            const double u = 1.0 / static_cast<double>(o.rows);
            for (std::size_t p = 0; p < o.rows; ++p) w(p, q) = u;
        } else {
            for (std::size_t p = 0; p < o.rows; ++p) w(p, q) = o(p, q) / sum;
        }
    }
    return w;
}

// One-hot column argmax; ties go to the smallest source-class index.
inline Matrix normalize_hard(const Matrix& o) {
    for (double v : o.data) {
        if (v < 0.0) throw InvalidInputError("normalize_hard: negative relevance entry");
    }
    Matrix w(o.rows, o.cols);
    for (std::size_t q = 0; q < o.cols; ++q) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < o.rows; ++p) {
            if (o(p, q) > o(best, q)) best = p;
        }
        w(best, q) = 1.0;
    }
    return w;
}

}  // namespace fshar

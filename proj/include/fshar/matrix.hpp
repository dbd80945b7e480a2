#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fshar/errors.hpp"

namespace fshar {

// Dense row-major matrix of doubles. Column vectors are k x 1 matrices.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, size rows * cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

    static Matrix zeros_like(const Matrix& m) { return Matrix(m.rows, m.cols); }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool operator==(const Matrix& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }
};

// c = a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw InvalidConfigError("matmul: inner dimensions differ (" + std::to_string(a.cols) +
                                 " vs " + std::to_string(b.rows) + ")");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        double* crow = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

// c = a * b^T
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols)
        throw InvalidConfigError("matmul_bt: inner dimensions differ (" + std::to_string(a.cols) +
                                 " vs " + std::to_string(b.cols) + ")");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.data.data() + j * b.cols;
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            c(i, j) = acc;
        }
    }
    return c;
}

// c = a^T * b
inline Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows)
        throw InvalidConfigError("matmul_at: inner dimensions differ (" + std::to_string(a.rows) +
                                 " vs " + std::to_string(b.rows) + ")");
    Matrix c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* arow = a.data.data() + k * a.cols;
        const double* brow = b.data.data() + k * b.cols;
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.data.data() + i * c.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

inline void add_inplace(Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw InvalidConfigError("add_inplace: shape mismatch");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

inline void scale_inplace(Matrix& a, double s) {
    for (double& v : a.data) v *= s;
}

inline double frobenius_sq(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.data) acc += v * v;
    return acc;
}

inline double row_norm2(const Matrix& a, std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
}

// Entrywise matrix norm: (sum_i (sum_j |m_ij|^r)^(p/r))^(1/p).
// r = p = 2 gives Frobenius; r = 2, p = 1 gives the row-sparsity norm used by
// the sparse reconstruction objective.
inline double l_rp_norm(const Matrix& m, double r, double p) {
    if (r < 1.0 || p < 1.0)
        throw InvalidConfigError("l_rp_norm: r and p must be >= 1, got r=" + std::to_string(r) +
                                 " p=" + std::to_string(p));
    double outer = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) inner += std::pow(std::abs(m(i, j)), r);
        outer += std::pow(inner, p / r);
    }
    return std::pow(outer, 1.0 / p);
}

// Deterministic 64-bit mix for deriving independent seed streams; the
// avalanche constants are the splitmix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fshar

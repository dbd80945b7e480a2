#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fshar/relevance.hpp"

using namespace fshar;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(r, c);
    for (double& v : m.data) v = dist(rng);
    return m;
}

// objective evaluated with plain loops, independent of the solver internals
double naive_objective(const Matrix& a, const Matrix& src, const Matrix& trg, double lambda) {
    const std::size_t d = src.cols;
    double fit = 0.0;
    for (std::size_t j = 0; j < trg.rows; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            double recon = 0.0;
            for (std::size_t i = 0; i < src.rows; ++i) recon += a(i, j) * src(i, k);
            const double diff = recon - trg(j, k);
            fit += diff * diff;
        }
    }
    double reg = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double rn = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) rn += a(i, j) * a(i, j);
        reg += std::sqrt(rn);
    }
    return fit / (2.0 * static_cast<double>(trg.rows)) + lambda * reg;
}

std::size_t nonzero_rows(const Matrix& a) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (row_norm2(a, i) > 0.0) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("cosine_relevance on canonical vector pairs") {
    Matrix src(3, 2);
    src.data = {2.0, 0.0,   // same direction as the target
                0.0, 5.0,   // orthogonal
                -1.0, 0.0}; // antipodal
    Matrix trg(1, 2);
    trg.data = {0.5, 0.0};
    const Matrix a = cosine_relevance(src, trg);
    CHECK(a(0, 0) == Catch::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(a(1, 0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(a(2, 0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("cosine_relevance is invariant to positive row rescaling") {
    const Matrix src = random_matrix(4, 3, 1);
    const Matrix trg = random_matrix(2, 3, 2);
    const Matrix base = cosine_relevance(src, trg);

    Matrix scaled_src = src;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    for (std::size_t i = 0; i < scaled_src.rows; ++i) {
        const double s = dist(rng);
        for (std::size_t j = 0; j < scaled_src.cols; ++j) scaled_src(i, j) *= s;
    }
    const Matrix scaled = cosine_relevance(scaled_src, trg);
    for (std::size_t i = 0; i < base.data.size(); ++i)
        CHECK(scaled.data[i] == Catch::Approx(base.data[i]).epsilon(1e-12));
}

TEST_CASE("cosine_relevance entries stay within [1/e, e]") {
    const Matrix a = cosine_relevance(random_matrix(5, 4, 10), random_matrix(6, 4, 11));
    for (double v : a.data) {
        CHECK(v >= std::exp(-1.0) - 1e-12);
        CHECK(v <= std::exp(1.0) + 1e-12);
    }
}

TEST_CASE("cosine_relevance rejects a zero-norm row") {
    Matrix src(2, 3);
    src.data = {1, 2, 3, 0, 0, 0};
    const Matrix trg = random_matrix(1, 3, 4);
    CHECK_THROWS_AS(cosine_relevance(src, trg), DegenerateEmbeddingError);
    CHECK_THROWS_AS(cosine_relevance(trg, src), DegenerateEmbeddingError);
}

TEST_CASE("sparse_reconstruction: large lambda kills every row") {
    const Matrix src = random_matrix(4, 3, 20);
    const Matrix trg = random_matrix(2, 3, 21);
    // row norms of F_src F_trg^T / n_trg bound the useful lambda range
    const Matrix cross = matmul_bt(src, trg);
    double max_row = 0.0;
    for (std::size_t i = 0; i < cross.rows; ++i) max_row = std::max(max_row, row_norm2(cross, i));
    const double lambda = max_row / static_cast<double>(trg.rows) + 0.1;

    const SparseSolveResult res = sparse_reconstruction(src, trg, lambda);
    CHECK(res.converged);
    for (double v : res.a.data) CHECK(v == 0.0);
}

TEST_CASE("sparse_reconstruction: identity recovery with orthonormal rows") {
    // F_trg = F_src with orthonormal rows; small lambda should give A near I.
    Matrix src(2, 2);
    src.data = {1.0, 0.0, 0.0, 1.0};
    const Matrix trg = src;
    const double lambda = 1e-4;
    const SparseSolveResult res = sparse_reconstruction(src, trg, lambda, 1e-10, 5000);
    CHECK(res.converged);
    CHECK(res.a(0, 0) == Catch::Approx(1.0).margin(0.05));
    CHECK(res.a(1, 1) == Catch::Approx(1.0).margin(0.05));
    CHECK(std::abs(res.a(0, 1)) < 1e-6);
    CHECK(std::abs(res.a(1, 0)) < 1e-6);
    // objective no worse than the exact-identity candidate
    CHECK(naive_objective(res.a, src, trg, lambda) <=
          naive_objective(Matrix::identity(2), src, trg, lambda) + 1e-12);
}

TEST_CASE("sparse_reconstruction beats random search on a random instance") {
    const Matrix src = random_matrix(4, 3, 30);
    const Matrix trg = random_matrix(3, 3, 31);
    const double lambda = 0.01;
    const SparseSolveResult res = sparse_reconstruction(src, trg, lambda);
    CHECK(res.converged);
    const double solver_obj = naive_objective(res.a, src, trg, lambda);

    std::mt19937_64 rng(32);
    std::normal_distribution<double> dist(0.0, 0.5);
    double best = naive_objective(Matrix(4, 3), src, trg, lambda);
    for (int k = 0; k < 10000; ++k) {
        Matrix cand(4, 3);
        for (double& v : cand.data) v = dist(rng);
        best = std::min(best, naive_objective(cand, src, trg, lambda));
    }
    CHECK(solver_obj <= best + 1e-6);
}

TEST_CASE("sparse_reconstruction trace is non-increasing and bounded by A=0") {
    const Matrix src = random_matrix(6, 4, 40);
    const Matrix trg = random_matrix(3, 4, 41);
    const SparseSolveResult res = sparse_reconstruction(src, trg, 0.01);
    REQUIRE(res.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
        CHECK(res.objective_trace[i] <= res.objective_trace[i - 1]);
    // trace starts at the A = 0 objective, so the final value never exceeds it
    CHECK(res.objective_trace.back() <= res.objective_trace.front());
    CHECK(res.objective_trace.front() ==
          Catch::Approx(naive_objective(Matrix(6, 3), src, trg, 0.01)));
}

TEST_CASE("larger lambda never increases the number of nonzero rows") {
    const Matrix src = random_matrix(6, 4, 50);
    const Matrix trg = random_matrix(3, 4, 51);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        const SparseSolveResult res = sparse_reconstruction(src, trg, lambda, 1e-9, 5000);
        const std::size_t rows = nonzero_rows(res.a);
        CHECK(rows <= prev);
        prev = rows;
    }
}

TEST_CASE("sparse_reconstruction flags non-convergence at tiny iteration budgets") {
    const Matrix src = random_matrix(6, 4, 60);
    const Matrix trg = random_matrix(3, 4, 61);
    const SparseSolveResult res = sparse_reconstruction(src, trg, 1e-4, 1e-14, 2);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 2);
    CHECK(res.a.rows == 6);  // best iterate still returned
}

TEST_CASE("sparse_reconstruction validates arguments") {
    const Matrix src = random_matrix(3, 3, 70);
    const Matrix trg = random_matrix(2, 2, 71);
    CHECK_THROWS_AS(sparse_reconstruction(src, trg, 0.1), InvalidConfigError);
    CHECK_THROWS_AS(sparse_reconstruction(src, random_matrix(2, 3, 72), 0.0),
                    InvalidConfigError);
}

TEST_CASE("sparse_relevance takes entry magnitudes; row norms reported separately") {
    Matrix a(3, 2);
    a.data = {0.0, 0.0, -2.0, 1.0, 0.0, 0.0};
    const Matrix rel = sparse_relevance(a);
    CHECK(rel(1, 0) == 2.0);
    CHECK(rel(1, 1) == 1.0);
    // only the middle source sample carries relevance
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(rel(0, j) == 0.0);
        CHECK(rel(2, j) == 0.0);
    }
    const std::vector<double> norms = row_l2_norms(a);
    CHECK(norms[0] == 0.0);
    CHECK(norms[1] == Catch::Approx(std::sqrt(5.0)));
    CHECK(norms[2] == 0.0);

    const Matrix zero_rel = sparse_relevance(Matrix(3, 2));
    for (double v : zero_rel.data) CHECK(v == 0.0);
}

TEST_CASE("aggregate_classwise: one sample per class reproduces A") {
    const Matrix a = sparse_relevance(random_matrix(3, 2, 80));
    const Matrix o = aggregate_classwise(a, {0, 1, 2}, {0, 1});
    REQUIRE(o.rows == 3);
    REQUIRE(o.cols == 2);
    for (std::size_t i = 0; i < o.data.size(); ++i) CHECK(o.data[i] == a.data[i]);
}

TEST_CASE("aggregate_classwise counts block sums") {
    Matrix a(5, 4, 1.0);  // all ones
    // class p=0 has 3 source samples, class q=1 has 2 target samples
    const Matrix o = aggregate_classwise(a, {0, 0, 0, 1, 1}, {0, 0, 1, 1});
    CHECK(o(0, 1) == 6.0);
    CHECK(o(0, 0) == 6.0);
    CHECK(o(1, 1) == 4.0);
}

TEST_CASE("aggregate_classwise matches the naive double loop") {
    std::mt19937_64 rng(90);
    std::uniform_int_distribution<int> src_label(0, 3);
    std::uniform_int_distribution<int> trg_label(0, 2);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = random_matrix(6, 5, 900 + rep);
        std::vector<int> sl(6), tl(5);
        for (int& l : sl) l = src_label(rng);
        for (int& l : tl) l = trg_label(rng);
        const Matrix o = aggregate_classwise(a, sl, tl);

        Matrix expected(4, 3);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                expected(static_cast<std::size_t>(sl[i]), static_cast<std::size_t>(tl[j])) +=
                    a(i, j);
        for (std::size_t p = 0; p < o.rows; ++p)
            for (std::size_t q = 0; q < o.cols; ++q)
                CHECK(o(p, q) == Catch::Approx(expected(p, q)).margin(1e-12));
    }
}

TEST_CASE("aggregate_classwise is permutation-equivariant") {
    const Matrix a = random_matrix(5, 4, 101);
    const std::vector<int> sl = {0, 1, 0, 2, 1};
    const std::vector<int> tl = {1, 0, 1, 0};
    const Matrix o = aggregate_classwise(a, sl, tl);

    // permute source samples together with their labels
    const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
    Matrix pa(5, 4);
    std::vector<int> psl(5);
    for (std::size_t i = 0; i < 5; ++i) {
        psl[i] = sl[perm[i]];
        for (std::size_t j = 0; j < 4; ++j) pa(i, j) = a(perm[i], j);
    }
    const Matrix po = aggregate_classwise(pa, psl, tl);
    REQUIRE(po.same_shape(o));
    for (std::size_t i = 0; i < o.data.size(); ++i)
        CHECK(po.data[i] == Catch::Approx(o.data[i]).margin(1e-12));
}

TEST_CASE("aggregate_classwise rejects bad labels") {
    const Matrix a = random_matrix(2, 2, 110);
    CHECK_THROWS_AS(aggregate_classwise(a, {0, -1}, {0, 1}), InvalidInputError);
    CHECK_THROWS_AS(aggregate_classwise(a, {0}, {0, 1}), InvalidConfigError);
}

TEST_CASE("normalize_soft on the worked example") {
    Matrix o(2, 2);
    o.data = {1, 3, 3, 1};
    const Matrix w = normalize_soft(o);
    CHECK(w(0, 0) == Catch::Approx(0.25));
    CHECK(w(0, 1) == Catch::Approx(0.75));
    CHECK(w(1, 0) == Catch::Approx(0.75));
    CHECK(w(1, 1) == Catch::Approx(0.25));
}

TEST_CASE("normalize_soft: zero column falls back to uniform") {
    Matrix o(4, 2);
    for (std::size_t p = 0; p < 4; ++p) o(p, 0) = static_cast<double>(p + 1);
    const Matrix w = normalize_soft(o);
    for (std::size_t p = 0; p < 4; ++p) CHECK(w(p, 1) == Catch::Approx(0.25));
}

TEST_CASE("normalize_hard on the worked example and tie-break") {
    Matrix o(2, 2);
    o.data = {1, 3, 3, 1};
    const Matrix w = normalize_hard(o);
    CHECK(w(0, 0) == 0.0);
    CHECK(w(0, 1) == 1.0);
    CHECK(w(1, 0) == 1.0);
    CHECK(w(1, 1) == 0.0);

    Matrix tied(3, 1);
    tied.data = {2.0, 2.0, 1.0};
    const Matrix wt = normalize_hard(tied);
    CHECK(wt(0, 0) == 1.0);  // smallest index wins
    CHECK(wt(1, 0) == 0.0);
}

TEST_CASE("normalization invariants over random relevance matrices") {
    std::mt19937_64 rng(120);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    for (int rep = 0; rep < 300; ++rep) {
        Matrix o(dim(rng), dim(rng));
        for (double& v : o.data) v = dist(rng);
        const Matrix soft = normalize_soft(o);
        const Matrix hard = normalize_hard(o);
        for (std::size_t q = 0; q < o.cols; ++q) {
            double soft_sum = 0.0, hard_sum = 0.0;
            std::size_t ones = 0;
            std::size_t o_argmax = 0, soft_argmax = 0, hard_argmax = 0;
            for (std::size_t p = 0; p < o.rows; ++p) {
                soft_sum += soft(p, q);
                hard_sum += hard(p, q);
                CHECK(soft(p, q) >= 0.0);
                CHECK(soft(p, q) <= 1.0);
                if (hard(p, q) == 1.0) ++ones;
                if (o(p, q) > o(o_argmax, q)) o_argmax = p;
                if (soft(p, q) > soft(soft_argmax, q)) soft_argmax = p;
                if (hard(p, q) > hard(hard_argmax, q)) hard_argmax = p;
            }
            CHECK(soft_sum == Catch::Approx(1.0).margin(1e-9));
            CHECK(hard_sum == 1.0);
            CHECK(ones == 1);
            CHECK(soft_argmax == o_argmax);
            CHECK(hard_argmax == o_argmax);
        }
    }
}

TEST_CASE("l_rp_norm(.,2,1) equals the regularizer used by the solver objective") {
    const Matrix a = random_matrix(4, 3, 130);
    double reg = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) reg += row_norm2(a, i);
    CHECK(l_rp_norm(a, 2, 1) == Catch::Approx(reg).margin(1e-12));
}

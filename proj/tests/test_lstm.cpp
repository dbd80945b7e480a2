#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fshar/lstm.hpp"

using namespace fshar;

namespace {

LstmLayerParams make_layer(std::size_t in, std::size_t H) {
    LstmLayerParams p;
    p.input_size = in;
    p.hidden_size = H;
    p.w_ih = Matrix(4 * H, in);
    p.w_hh = Matrix(4 * H, H);
    p.bias = Matrix(4 * H, 1);
    return p;
}

void fill_random(Matrix& m, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double& v : m.data) v = dist(rng);
}

std::vector<Matrix> random_sequence(std::size_t T, std::size_t n, std::size_t in,
                                    std::mt19937_64& rng) {
    std::vector<Matrix> xs(T, Matrix(n, in));
    for (auto& x : xs) fill_random(x, rng, 1.0);
    return xs;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Independent scalar re-evaluation of the cell equations, one unit at a time.
std::vector<Matrix> scalar_oracle_forward(const LstmLayerParams& p,
                                          const std::vector<Matrix>& xs) {
    const std::size_t T = xs.size();
    const std::size_t n = xs[0].rows;
    const std::size_t H = p.hidden_size;
    std::vector<Matrix> hs(T, Matrix(n, H));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> h(H, 0.0), c(H, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> h_next(H), c_next(H);
            for (std::size_t j = 0; j < H; ++j) {
                double ai = p.bias(j, 0);
                double af = p.bias(H + j, 0);
                double ag = p.bias(2 * H + j, 0);
                double ao = p.bias(3 * H + j, 0);
                for (std::size_t k = 0; k < p.input_size; ++k) {
                    const double xv = xs[t](s, k);
                    ai += p.w_ih(j, k) * xv;
                    af += p.w_ih(H + j, k) * xv;
                    ag += p.w_ih(2 * H + j, k) * xv;
                    ao += p.w_ih(3 * H + j, k) * xv;
                }
                for (std::size_t k = 0; k < H; ++k) {
                    ai += p.w_hh(j, k) * h[k];
                    af += p.w_hh(H + j, k) * h[k];
                    ag += p.w_hh(2 * H + j, k) * h[k];
                    ao += p.w_hh(3 * H + j, k) * h[k];
                }
                const double iv = sig(ai), fv = sig(af), gv = std::tanh(ag), ov = sig(ao);
                c_next[j] = fv * c[j] + iv * gv;
                h_next[j] = ov * std::tanh(c_next[j]);
            }
            h = h_next;
            c = c_next;
            for (std::size_t j = 0; j < H; ++j) hs[t](s, j) = h[j];
        }
    }
    return hs;
}

}  // namespace

TEST_CASE("lstm_forward: zero weights and zero input give zero hidden states") {
    LstmLayerParams p = make_layer(3, 4);
    std::vector<Matrix> xs(5, Matrix(2, 3));
    const LstmCache cache = lstm_forward(p, xs);
    for (std::size_t t = 0; t < 5; ++t)
        for (double v : cache.h_state[t].data) CHECK(v == 0.0);
}

TEST_CASE("lstm_forward: neutral gates keep zero state") {
    // H=1, all weights and biases zero: i=f=o=sigmoid(0)=0.5, g=tanh(0)=0,
    // so c stays 0 and h stays 0 for any input.
    LstmLayerParams p = make_layer(2, 1);
    std::mt19937_64 rng(3);
    std::vector<Matrix> xs = random_sequence(4, 3, 2, rng);
    const LstmCache cache = lstm_forward(p, xs);
    for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t s = 0; s < 3; ++s) {
            CHECK(cache.i_gate[t](s, 0) == Catch::Approx(0.5));
            CHECK(cache.f_gate[t](s, 0) == Catch::Approx(0.5));
            CHECK(cache.o_gate[t](s, 0) == Catch::Approx(0.5));
            CHECK(cache.g_gate[t](s, 0) == 0.0);
            CHECK(cache.c_state[t](s, 0) == 0.0);
            CHECK(cache.h_state[t](s, 0) == 0.0);
        }
    }
}

TEST_CASE("lstm_forward matches scalar-loop oracle on random instance") {
    std::mt19937_64 rng(0);
    LstmLayerParams p = make_layer(3, 5);
    fill_random(p.w_ih, rng, 0.8);
    fill_random(p.w_hh, rng, 0.8);
    fill_random(p.bias, rng, 0.5);
    const std::vector<Matrix> xs = random_sequence(3, 2, 3, rng);

    const LstmCache cache = lstm_forward(p, xs);
    const std::vector<Matrix> expected = scalar_oracle_forward(p, xs);
    for (std::size_t t = 0; t < 3; ++t) {
        REQUIRE(cache.h_state[t].same_shape(expected[t]));
        for (std::size_t i = 0; i < expected[t].data.size(); ++i)
            CHECK(cache.h_state[t].data[i] ==
                  Catch::Approx(expected[t].data[i]).margin(1e-12));
    }
}

TEST_CASE("lstm_forward rejects non-finite input") {
    LstmLayerParams p = make_layer(2, 2);
    std::vector<Matrix> xs(2, Matrix(1, 2));
    xs[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lstm_forward(p, xs), NumericInputError);
}

TEST_CASE("lstm_forward rejects shape mismatch") {
    LstmLayerParams p = make_layer(2, 2);
    std::vector<Matrix> xs(2, Matrix(1, 3));
    CHECK_THROWS_AS(lstm_forward(p, xs), InvalidConfigError);
}

TEST_CASE("lstm_backward: finite-difference check on the layer in isolation") {
    // Scalar objective: sum of all hidden states over time.
    std::mt19937_64 rng(0xBEEF);
    LstmLayerParams p = make_layer(2, 3);
    fill_random(p.w_ih, rng, 0.7);
    fill_random(p.w_hh, rng, 0.7);
    fill_random(p.bias, rng, 0.3);
    const std::vector<Matrix> xs = random_sequence(4, 2, 2, rng);

    auto objective = [&xs](const LstmLayerParams& q) {
        const LstmCache c = lstm_forward(q, xs);
        double acc = 0.0;
        for (const Matrix& h : c.h_state)
            for (double v : h.data) acc += v;
        return acc;
    };

    const LstmCache cache = lstm_forward(p, xs);
    std::vector<Matrix> dh(4, Matrix(2, 3, 1.0));
    const LstmBackwardResult back = lstm_backward(p, cache, dh);

    const double h = 1e-6;
    auto check_tensor = [&](Matrix LstmLayerParams::* field, const Matrix& grad) {
        LstmLayerParams q = p;
        for (std::size_t i = 0; i < (q.*field).data.size(); ++i) {
            const double saved = (q.*field).data[i];
            (q.*field).data[i] = saved + h;
            const double plus = objective(q);
            (q.*field).data[i] = saved - h;
            const double minus = objective(q);
            (q.*field).data[i] = saved;
            const double numeric = (plus - minus) / (2 * h);
            CHECK(grad.data[i] == Catch::Approx(numeric).margin(1e-6));
        }
    };
    check_tensor(&LstmLayerParams::w_ih, back.dw_ih);
    check_tensor(&LstmLayerParams::w_hh, back.dw_hh);
    check_tensor(&LstmLayerParams::bias, back.dbias);
}

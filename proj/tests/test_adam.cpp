#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fshar/adam.hpp"

using namespace fshar;

namespace {

const NetworkShape kShape{2, 2, 2, 2, 2};

NetworkParams unit_grads(const NetworkShape& s, double value) {
    NetworkParams g = NetworkParams::zeros(s);
    for (Matrix* t : g.tensors())
        for (double& v : t->data) v = value;
    return g;
}

}  // namespace

TEST_CASE("adam_step with zero gradients leaves parameters unchanged") {
    NetworkParams p = init_params(kShape, 11);
    const NetworkParams before = p;
    AdamState state = AdamState::init(p);
    const NetworkParams zeros = NetworkParams::zeros(kShape);
    adam_step(p, zeros, state);
    CHECK(p == before);
    CHECK(state.t == 1);
}

TEST_CASE("adam_step first step matches the hand computation") {
    // t=1, g=1, lr=1e-3: m_hat = 1, v_hat = 1, update = -lr / (1 + eps).
    NetworkParams p = NetworkParams::zeros(kShape);
    AdamState state = AdamState::init(p);
    const NetworkParams g = unit_grads(kShape, 1.0);
    adam_step(p, g, state);
    const double expected = -1e-3 / (1.0 + 1e-8);
    for (const Matrix* t : p.tensors())
        for (double v : t->data) CHECK(v == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam trajectories are identical for identical seeds") {
    auto run = [] {
        NetworkParams p = init_params(kShape, 5);
        AdamState state = AdamState::init(p);
        std::mt19937_64 rng(33);
        std::uniform_real_distribution<double> dist(-1, 1);
        for (int step = 0; step < 20; ++step) {
            NetworkParams g = NetworkParams::zeros(kShape);
            for (Matrix* t : g.tensors())
                for (double& v : t->data) v = dist(rng);
            adam_step(p, g, state);
        }
        return p;
    };
    CHECK(run() == run());
}

TEST_CASE("adam_step rejects mismatched state") {
    NetworkParams p = init_params(kShape, 2);
    AdamState state = AdamState::init(p);
    state.m.pop_back();
    const NetworkParams g = NetworkParams::zeros(kShape);
    CHECK_THROWS_AS(adam_step(p, g, state), InvalidConfigError);
}

TEST_CASE("clip_global_norm scales gradients above the threshold only") {
    NetworkParams g = unit_grads(kShape, 1.0);
    double total = 0.0;
    for (const Matrix* t : g.tensors()) total += static_cast<double>(t->data.size());
    const double norm = std::sqrt(total);

    NetworkParams clipped = g;
    const double reported = clip_global_norm(clipped, 5.0);
    CHECK(reported == Catch::Approx(norm));
    double sq = 0.0;
    for (const Matrix* t : clipped.tensors()) sq += frobenius_sq(*t);
    CHECK(std::sqrt(sq) == Catch::Approx(5.0).epsilon(1e-12));

    NetworkParams small = unit_grads(kShape, 1e-3);
    NetworkParams small_before = small;
    clip_global_norm(small, 5.0);
    CHECK(small == small_before);
}

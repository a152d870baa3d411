#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldr/layer.hpp"
#include "ldr/rng.hpp"

#include "oracles.hpp"

#include <limits>
#include <vector>

using namespace ldr;

namespace {

PairPtr workhorse_pair(Index n) {
    Vec d(n);
    for (Index i = 0; i < n; ++i)
        d[i] = n == 1 ? 0.5 : 0.3 + 0.4 * static_cast<double>(i) / static_cast<double>(n - 1);
    return make_pair_ptr(OperatorMatrix::unit_circulant(n, 1.0), OperatorMatrix::diagonal(d));
}

PairPtr lowrank_pair(Index n) {  // q = 1: W = G H^T
    return make_pair_ptr(OperatorMatrix::identity(n), OperatorMatrix::zero(n));
}

LdrLayer random_layer(PairPtr pair, Index k, Index r, Activation act, std::uint64_t seed) {
    LdrLayer layer(std::move(pair), k, r, act);
    Rng rng(seed);
    layer.randomize(rng, 0.8);
    return layer;
}

/// Objective O = c^T sigma(W^T x + theta) evaluated through forward only.
double objective(const LdrLayer& layer, const Vec& x, const Vec& c) {
    return c.dot(layer.forward(x));
}

constexpr double kFdTol = 1e-5;

double fd_rel_err(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
}

/// Central finite differences over every parameter and the input, checked
/// against the analytic gradients. c is the upstream weighting dO/dy.
void check_gradients_fd(const LdrLayer& base, const Vec& x, const Vec& c) {
    LdrLayer::ForwardCache cache;
    base.forward(x, &cache);
    const LayerGradients grads = base.backward(cache, c);

    const Index n = base.input_dim();
    const Index k = base.block_count();
    const Index r = base.generator_rank();

    for (Index i = 0; i < k; ++i) {
        for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < r; ++b) {
                // dG
                {
                    LdrLayer plus = base, minus = base;
                    Mat gp = base.G(i), gm = base.G(i);
                    const double eps = 1e-6 * (1.0 + std::abs(gp(a, b)));
                    gp(a, b) += eps;
                    gm(a, b) -= eps;
                    plus.set_block(i, gp, base.H(i));
                    minus.set_block(i, gm, base.H(i));
                    const double fd =
                        (objective(plus, x, c) - objective(minus, x, c)) / (2.0 * eps);
                    CHECK(fd_rel_err(grads.dG[static_cast<std::size_t>(i)](a, b), fd) <= kFdTol);
                }
                // dH
                {
                    LdrLayer plus = base, minus = base;
                    Mat hp = base.H(i), hm = base.H(i);
                    const double eps = 1e-6 * (1.0 + std::abs(hp(a, b)));
                    hp(a, b) += eps;
                    hm(a, b) -= eps;
                    plus.set_block(i, base.G(i), hp);
                    minus.set_block(i, base.G(i), hm);
                    const double fd =
                        (objective(plus, x, c) - objective(minus, x, c)) / (2.0 * eps);
                    CHECK(fd_rel_err(grads.dH[static_cast<std::size_t>(i)](a, b), fd) <= kFdTol);
                }
            }
        }
    }
    for (Index t = 0; t < n * k; ++t) {
        LdrLayer plus = base, minus = base;
        Vec tp = base.theta(), tm = base.theta();
        const double eps = 1e-6 * (1.0 + std::abs(tp[t]));
        tp[t] += eps;
        tm[t] -= eps;
        plus.set_theta(tp);
        minus.set_theta(tm);
        const double fd = (objective(plus, x, c) - objective(minus, x, c)) / (2.0 * eps);
        CHECK(fd_rel_err(grads.dtheta[t], fd) <= kFdTol);
    }
    for (Index t = 0; t < n; ++t) {
        Vec xp = x, xm = x;
        const double eps = 1e-6 * (1.0 + std::abs(x[t]));
        xp[t] += eps;
        xm[t] -= eps;
        const double fd = (objective(base, xp, c) - objective(base, xm, c)) / (2.0 * eps);
        CHECK(fd_rel_err(grads.dx[t], fd) <= kFdTol);
    }
}

/// Pick x (deterministically) so relu pre-activations stay away from the kink.
Vec safe_input(const LdrLayer& layer, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Vec x = rng.normal_vec(layer.input_dim());
        LdrLayer::ForwardCache cache;
        layer.forward(x, &cache);
        if (cache.pre.cwiseAbs().minCoeff() > 1e-3) return x;
    }
    FAIL("could not find an input clear of activation kinks");
    return Vec::Zero(layer.input_dim());
}

}  // namespace

TEST_CASE("zero layer with sigmoid outputs one half everywhere") {
    const LdrLayer layer(workhorse_pair(4), 2, 1, Activation::sigmoid);
    Rng rng(81);
    const Vec y = layer.forward(rng.normal_vec(4));
    for (Index i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identity block passes the input through") {
    const Index n = 4;
    LdrLayer layer(lowrank_pair(n), 1, n, Activation::identity);
    layer.set_block(0, Mat::Identity(n, n), Mat::Identity(n, n));  // W = I
    Rng rng(82);
    const Vec x = rng.normal_vec(n);
    CHECK(oracle::rel_err(layer.forward(x), x) < 1e-14);
}

TEST_CASE("fast blockwise forward equals the dense-materialized forward") {
    Rng rng(83);
    for (Index n : {Index{4}, Index{6}, Index{8}}) {
        for (Index k : {Index{1}, Index{3}}) {
            LdrLayer layer = random_layer(workhorse_pair(n), k, 2, Activation::sigmoid,
                                          900 + static_cast<std::uint64_t>(n * 10 + k));
            const Vec x = rng.normal_vec(n);
            const Vec fast = layer.forward(x);
            const Vec dense = layer.forward_dense(x);
            CHECK(max_abs(Vec(fast - dense)) <= 1e-10 * std::max(1.0, max_abs(dense)));

            // and against a loop-level oracle
            const Mat w = layer.to_dense();
            Vec pre = oracle::matvec(w.transpose(), x) + layer.theta();
            const Vec want = activate(layer.activation(), pre);
            CHECK(max_abs(Vec(fast - want)) <= 1e-10 * std::max(1.0, max_abs(want)));
        }
    }
}

TEST_CASE("materialize concatenates per-block reconstructions") {
    LdrLayer layer = random_layer(workhorse_pair(5), 3, 1, Activation::identity, 84);
    const Mat& w = layer.materialize();
    CHECK(w.rows() == 5);
    CHECK(w.cols() == 15);
    for (Index i = 0; i < 3; ++i) {
        const Mat wi = reconstruct(layer.block(i));
        CHECK(oracle::rel_err(Mat(w.middleCols(i * 5, 5)), wi) < 1e-14);
    }
    // idempotent
    const Mat again = layer.materialize();
    CHECK(max_abs(Mat(again - w)) == 0.0);
}

TEST_CASE("zero upstream gives zero gradients") {
    LdrLayer layer = random_layer(workhorse_pair(4), 2, 1, Activation::sigmoid, 85);
    Rng rng(86);
    LdrLayer::ForwardCache cache;
    layer.forward(rng.normal_vec(4), &cache);
    const LayerGradients grads = layer.backward(cache, Vec::Zero(8));
    CHECK(grads.max_abs_value() == 0.0);
}

TEST_CASE("q = 1 gradients match the textbook low-rank factorization") {
    Rng rng(87);
    const Index n = 5, r = 2;
    LdrLayer layer = random_layer(lowrank_pair(n), 1, r, Activation::identity, 88);
    const Vec x = rng.normal_vec(n);
    const Vec c = rng.normal_vec(n);

    LdrLayer::ForwardCache cache;
    layer.forward(x, &cache);
    const LayerGradients grads = layer.backward(cache, c);

    // W = G H^T, identity activation: dW = x c^T, dG = dW H, dH = dW^T G
    const Mat dw = x * c.transpose();
    CHECK(max_abs(Mat(grads.dG[0] - dw * layer.H(0))) <= 1e-12);
    CHECK(max_abs(Mat(grads.dH[0] - dw.transpose() * layer.G(0))) <= 1e-12);
    CHECK(max_abs(Vec(grads.dtheta - c)) <= 1e-12);
    CHECK(max_abs(Vec(grads.dx - (layer.G(0) * layer.H(0).transpose()) * c)) <= 1e-12);
}

TEST_CASE("analytic gradients agree with central finite differences") {
    std::uint64_t seed = 4200;
    for (Index n : {Index{4}, Index{6}, Index{8}}) {
        for (Index k : {Index{1}, Index{2}}) {
            for (Index r : {Index{1}, Index{2}}) {
                for (bool q1 : {false, true}) {
                    for (Activation act :
                         {Activation::sigmoid, Activation::relu, Activation::identity}) {
                        ++seed;
                        PairPtr pair = q1 ? lowrank_pair(n) : workhorse_pair(n);
                        LdrLayer layer = random_layer(std::move(pair), k, r, act, seed);
                        Rng rng(seed ^ 0xabcdULL);
                        const Vec x = act == Activation::relu ? safe_input(layer, rng)
                                                              : rng.normal_vec(n);
                        const Vec c = rng.normal_vec(n * k);
                        check_gradients_fd(layer, x, c);
                    }
                }
            }
        }
    }
}

TEST_CASE("backward is linear in the upstream gradient") {
    Rng rng(90);
    LdrLayer layer = random_layer(workhorse_pair(6), 2, 1, Activation::sigmoid, 91);
    LdrLayer::ForwardCache cache;
    layer.forward(rng.normal_vec(6), &cache);
    const Vec u1 = rng.normal_vec(12);
    const Vec u2 = rng.normal_vec(12);

    const LayerGradients g1 = layer.backward(cache, u1);
    const LayerGradients g2 = layer.backward(cache, u2);
    const LayerGradients gsum = layer.backward(cache, u1 + u2);

    LayerGradients combined = layer.zero_gradients();
    combined.axpy(1.0, g1);
    combined.axpy(1.0, g2);
    for (Index i = 0; i < 2; ++i) {
        CHECK(max_abs(Mat(gsum.dG[static_cast<std::size_t>(i)] -
                          combined.dG[static_cast<std::size_t>(i)])) < 1e-12);
        CHECK(max_abs(Mat(gsum.dH[static_cast<std::size_t>(i)] -
                          combined.dH[static_cast<std::size_t>(i)])) < 1e-12);
    }
    CHECK(max_abs(Vec(gsum.dtheta - combined.dtheta)) < 1e-12);
    CHECK(max_abs(Vec(gsum.dx - combined.dx)) < 1e-12);
}

TEST_CASE("parameter counting matches the storage argument") {
    const Index n = 16, k = 3, r = 2;
    const LdrLayer layer(workhorse_pair(n), k, r, Activation::sigmoid);
    const ParameterCount count = layer.count_parameters();
    CHECK(count.generators == k * 2 * n * r);
    CHECK(count.biases == k * n);
    CHECK(count.operators == k * 2 * n);
    CHECK(count.dense_equivalent == k * n * n);
    // per block: 2n + 2nr stored vs n^2 dense
    CHECK((count.generators + count.operators) / k == 2 * n + 2 * n * r);
    CHECK(count.total() < count.dense_equivalent);
}

TEST_CASE("stale caches are rejected") {
    LdrLayer layer = random_layer(workhorse_pair(4), 1, 1, Activation::sigmoid, 92);
    Rng rng(93);
    LdrLayer::ForwardCache cache;
    layer.forward(rng.normal_vec(4), &cache);
    layer.set_theta(Vec::Zero(4));  // invalidates
    CHECK_THROWS_AS(layer.backward(cache, Vec::Ones(4)), InvariantError);
}

TEST_CASE("gradient_step moves parameters and invalidates the dense cache") {
    LdrLayer layer = random_layer(workhorse_pair(4), 1, 1, Activation::identity, 94);
    Rng rng(95);
    const Vec x = rng.normal_vec(4);
    LdrLayer::ForwardCache cache;
    layer.forward(x, &cache);
    LayerGradients grads = layer.backward(cache, Vec::Ones(4));
    const Mat w_before = layer.materialize();
    layer.gradient_step(grads, 0.1);
    const Mat w_after = layer.materialize();
    CHECK(max_abs(Mat(w_after - w_before)) > 0.0);
}

TEST_CASE("non-finite inputs are rejected") {
    const LdrLayer layer(workhorse_pair(3), 1, 1, Activation::sigmoid);
    Vec x(3);
    x << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
    CHECK_THROWS_AS(layer.forward(x), ValidationError);
}

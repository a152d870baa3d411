#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldr/construct.hpp"
#include "ldr/network.hpp"
#include "ldr/rng.hpp"

#include "oracles.hpp"

#include <vector>

using namespace ldr;

namespace {

PairPtr workhorse_pair(Index n) {
    Vec d(n);
    for (Index i = 0; i < n; ++i)
        d[i] = n == 1 ? 0.5 : 0.3 + 0.4 * static_cast<double>(i) / static_cast<double>(n - 1);
    return make_pair_ptr(OperatorMatrix::unit_circulant(n, 1.0), OperatorMatrix::diagonal(d));
}

NetworkModel random_network(std::uint64_t seed, Index n, Index k1, Index k2) {
    Rng rng(seed);
    std::vector<LdrLayer> layers;
    LdrLayer l1(workhorse_pair(n), k1, 1, Activation::sigmoid);
    l1.randomize(rng, 0.8);
    layers.push_back(std::move(l1));
    if (k2 > 0) {
        LdrLayer l2(workhorse_pair(n * k1), k2, 1, Activation::sigmoid);
        l2.randomize(rng, 0.8);
        layers.push_back(std::move(l2));
    }
    const Index width = layers.back().output_dim();
    Readout ro;
    ro.alpha = rng.normal_vec(width);
    ro.bias = rng.normal();
    return NetworkModel(std::move(layers), std::move(ro));
}

constexpr double kFdTol = 1e-5;

double fd_rel_err(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
}

}  // namespace

TEST_CASE("a one-hot single-layer model reduces to the constructed neuron") {
    Rng rng(101);
    const Index n = 5;
    const PairPtr pair = workhorse_pair(n);
    const Vec v = rng.normal_vec(n);
    const double theta = 0.4;
    const OneHotNetwork onehot = embed_as_network(pair, v, theta, Activation::sigmoid);

    LdrLayer layer(pair, 1, 1, Activation::sigmoid);
    layer.set_block(0, onehot.embedding.rep.G(), onehot.embedding.rep.H());
    layer.set_theta(Vec::Constant(n, theta));
    std::vector<LdrLayer> layers;
    layers.push_back(std::move(layer));
    const NetworkModel model(std::move(layers), Readout{onehot.alpha, 0.0});

    for (int trial = 0; trial < 50; ++trial) {
        const Vec x = rng.uniform_vec(n, 0.0, 1.0);
        const double want = activate(Activation::sigmoid, v.dot(x) + theta);
        CHECK(model.forward(x) == doctest::Approx(want).epsilon(1e-8));
        CHECK(model.forward(x) == doctest::Approx(onehot.evaluate(x)).epsilon(1e-10));
    }
}

TEST_CASE("network forward composes layers and the readout") {
    const NetworkModel model = random_network(102, 3, 2, 1);
    Rng rng(103);
    const Vec x = rng.normal_vec(3);
    // recompute by hand through layer forwards
    Vec y = model.layer(0).forward(x);
    y = model.layer(1).forward(y);
    const double want = model.readout().alpha.dot(y) + model.readout().bias;
    CHECK(model.forward(x) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("two-layer model passes a full-parameter finite-difference check") {
    NetworkModel model = random_network(104, 3, 2, 1);
    Rng rng(105);
    const Vec x = rng.normal_vec(3);
    const NetworkGradients grads = model.backward(x, 1.0);

    auto objective = [&](const NetworkModel& m) { return m.forward(x); };

    for (Index l = 0; l < model.layer_count(); ++l) {
        const LdrLayer& layer = model.layer(l);
        for (Index i = 0; i < layer.block_count(); ++i) {
            for (Index a = 0; a < layer.input_dim(); ++a) {
                for (Index b = 0; b < layer.generator_rank(); ++b) {
                    NetworkModel plus = model, minus = model;
                    Mat gp = layer.G(i), gm = layer.G(i);
                    const double eps = 1e-6 * (1.0 + std::abs(gp(a, b)));
                    gp(a, b) += eps;
                    gm(a, b) -= eps;
                    plus.layer(l).set_block(i, gp, layer.H(i));
                    minus.layer(l).set_block(i, gm, layer.H(i));
                    const double fd = (objective(plus) - objective(minus)) / (2.0 * eps);
                    CHECK(fd_rel_err(
                              grads.layers[static_cast<std::size_t>(l)].dG[static_cast<std::size_t>(i)](a, b),
                              fd) <= kFdTol);

                    NetworkModel hplus = model, hminus = model;
                    Mat hp = layer.H(i), hm = layer.H(i);
                    const double eps_h = 1e-6 * (1.0 + std::abs(hp(a, b)));
                    hp(a, b) += eps_h;
                    hm(a, b) -= eps_h;
                    hplus.layer(l).set_block(i, layer.G(i), hp);
                    hminus.layer(l).set_block(i, layer.G(i), hm);
                    const double fd_h = (objective(hplus) - objective(hminus)) / (2.0 * eps_h);
                    CHECK(fd_rel_err(
                              grads.layers[static_cast<std::size_t>(l)].dH[static_cast<std::size_t>(i)](a, b),
                              fd_h) <= kFdTol);
                }
            }
        }
        for (Index t = 0; t < layer.output_dim(); ++t) {
            NetworkModel plus = model, minus = model;
            Vec tp = layer.theta(), tm = layer.theta();
            const double eps = 1e-6 * (1.0 + std::abs(tp[t]));
            tp[t] += eps;
            tm[t] -= eps;
            plus.layer(l).set_theta(tp);
            minus.layer(l).set_theta(tm);
            const double fd = (objective(plus) - objective(minus)) / (2.0 * eps);
            CHECK(fd_rel_err(grads.layers[static_cast<std::size_t>(l)].dtheta[t], fd) <= kFdTol);
        }
    }

    // readout gradients: dalpha = y_final, dbias = 1
    for (Index t = 0; t < model.readout().alpha.size(); ++t) {
        NetworkModel plus = model, minus = model;
        const double eps = 1e-6 * (1.0 + std::abs(model.readout().alpha[t]));
        plus.readout().alpha[t] += eps;
        minus.readout().alpha[t] -= eps;
        const double fd = (objective(plus) - objective(minus)) / (2.0 * eps);
        CHECK(fd_rel_err(grads.dalpha[t], fd) <= kFdTol);
    }
    CHECK(grads.dbias == doctest::Approx(1.0).epsilon(1e-12));

    // input gradient
    for (Index t = 0; t < 3; ++t) {
        Vec xp = x, xm = x;
        const double eps = 1e-6 * (1.0 + std::abs(x[t]));
        xp[t] += eps;
        xm[t] -= eps;
        const double fd = (model.forward(xp) - model.forward(xm)) / (2.0 * eps);
        CHECK(fd_rel_err(grads.dx[t], fd) <= kFdTol);
    }
}

TEST_CASE("a dead readout kills the output and the layer gradients") {
    NetworkModel model = random_network(106, 4, 2, 0);
    model.readout().alpha.setZero();
    model.readout().bias = 0.0;
    Rng rng(107);
    const Vec x = rng.normal_vec(4);
    CHECK(model.forward(x) == 0.0);
    const NetworkGradients grads = model.backward(x, 1.0);
    for (const LayerGradients& lg : grads.layers) {
        CHECK(max_abs(lg.dtheta) == 0.0);
        for (const Mat& m : lg.dG) CHECK(max_abs(m) == 0.0);
        for (const Mat& m : lg.dH) CHECK(max_abs(m) == 0.0);
    }
    // dalpha = y is generally nonzero; the readout itself still learns
    CHECK(max_abs(grads.dalpha) > 0.0);
}

TEST_CASE("incompatible layer dimensions are rejected") {
    Rng rng(108);
    std::vector<LdrLayer> layers;
    LdrLayer l1(workhorse_pair(3), 2, 1, Activation::sigmoid);  // 3 -> 6
    LdrLayer l2(workhorse_pair(4), 1, 1, Activation::sigmoid);  // 4 -> 4, mismatched
    layers.push_back(std::move(l1));
    layers.push_back(std::move(l2));
    CHECK_THROWS_AS(NetworkModel(std::move(layers), Readout{Vec::Zero(4), 0.0}),
                    ValidationError);
}

TEST_CASE("readout width must match the final layer") {
    std::vector<LdrLayer> layers;
    layers.emplace_back(workhorse_pair(3), 2, 1, Activation::sigmoid);
    CHECK_THROWS_AS(NetworkModel(std::move(layers), Readout{Vec::Zero(3), 0.0}),
                    ValidationError);
}

TEST_CASE("trainable parameter total is generators + biases + readout") {
    const Index n = 5, k = 3, r = 2;
    std::vector<LdrLayer> layers;
    layers.emplace_back(workhorse_pair(n), k, r, Activation::sigmoid);
    const NetworkModel model(std::move(layers), Readout{Vec::Zero(n * k), 0.0});
    CHECK(model.trainable_parameters() == k * 2 * n * r + k * n + n * k + 1);
}

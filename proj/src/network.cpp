#include "ldr/network.hpp"

namespace ldr {

void NetworkGradients::setZero() {
    for (LayerGradients& g : layers) g.setZero();
    dalpha.setZero();
    dbias = 0.0;
    dx.setZero();
}

void NetworkGradients::axpy(double scale, const NetworkGradients& other) {
    for (std::size_t i = 0; i < layers.size(); ++i) layers[i].axpy(scale, other.layers[i]);
    dalpha += scale * other.dalpha;
    dbias += scale * other.dbias;
    dx += scale * other.dx;
}

NetworkModel::NetworkModel(std::vector<LdrLayer> layers, Readout readout)
    : layers_(std::move(layers)), readout_(std::move(readout)) {
    require(!layers_.empty(), "NetworkModel: at least one layer required");
    for (std::size_t i = 1; i < layers_.size(); ++i) {
        require(layers_[i].input_dim() == layers_[i - 1].output_dim(),
                "NetworkModel: layer " + std::to_string(i) + " input dim does not match layer " +
                    std::to_string(i - 1) + " output dim");
    }
    require(readout_.alpha.size() == layers_.back().output_dim(),
            "NetworkModel: readout length must equal the final layer width");
}

double NetworkModel::forward(const Vec& x) const {
    Vec y = x;
    for (const LdrLayer& layer : layers_) y = layer.forward(y);
    return readout_.alpha.dot(y) + readout_.bias;
}

NetworkGradients NetworkModel::zero_gradients() const {
    NetworkGradients g;
    g.layers.reserve(layers_.size());
    for (const LdrLayer& layer : layers_) g.layers.push_back(layer.zero_gradients());
    g.dalpha = Vec::Zero(readout_.alpha.size());
    g.dbias = 0.0;
    g.dx = Vec::Zero(input_dim());
    return g;
}

NetworkGradients NetworkModel::backward(const Vec& x, double upstream) const {
    NetworkGradients acc = zero_gradients();
    backward_accumulate(x, upstream, 1.0, acc);
    return acc;
}

void NetworkModel::backward_accumulate(const Vec& x, double upstream, double scale,
                                       NetworkGradients& acc) const {
    NetworkScratch scratch = make_scratch();
    backward_scratch(x, upstream, scale, acc, scratch);
}

NetworkScratch NetworkModel::make_scratch() const {
    NetworkScratch s;
    const std::size_t depth = layers_.size();
    s.caches.resize(depth);
    s.layer_scratch.reserve(depth);
    s.sample_grads.reserve(depth);
    s.upstreams.reserve(depth);
    for (const LdrLayer& layer : layers_) {
        s.layer_scratch.push_back(layer.make_scratch());
        s.sample_grads.push_back(layer.zero_gradients());
        s.upstreams.push_back(Vec::Zero(layer.output_dim()));
    }
    return s;
}

double NetworkModel::forward_scratch(const Vec& x, NetworkScratch& scratch) const {
    const std::size_t depth = layers_.size();
    layers_[0].forward_scratch(x, scratch.caches[0], scratch.layer_scratch[0]);
    for (std::size_t l = 1; l < depth; ++l)
        layers_[l].forward_scratch(scratch.caches[l - 1].y, scratch.caches[l],
                                   scratch.layer_scratch[l]);
    return readout_.alpha.dot(scratch.caches[depth - 1].y) + readout_.bias;
}

void NetworkModel::backward_cached(double upstream, double scale, NetworkGradients& acc,
                                   NetworkScratch& scratch) const {
    const std::size_t depth = layers_.size();
    acc.dalpha += (scale * upstream) * scratch.caches[depth - 1].y;
    acc.dbias += scale * upstream;

    scratch.upstreams[depth - 1] = upstream * readout_.alpha;
    for (std::size_t l = depth; l-- > 0;) {
        scratch.sample_grads[l].setZero();
        layers_[l].backward_scratch(scratch.caches[l], scratch.upstreams[l], 1.0,
                                    scratch.sample_grads[l], scratch.layer_scratch[l]);
        acc.layers[l].axpy(scale, scratch.sample_grads[l]);
        if (l > 0) scratch.upstreams[l - 1] = scratch.sample_grads[l].dx;
    }
    acc.dx += scale * scratch.sample_grads[0].dx;
}

void NetworkModel::backward_scratch(const Vec& x, double upstream, double scale,
                                    NetworkGradients& acc, NetworkScratch& scratch) const {
    forward_scratch(x, scratch);
    backward_cached(upstream, scale, acc, scratch);
}

void NetworkModel::gradient_step(const NetworkGradients& grads, double lr) {
    require(grads.layers.size() == layers_.size(), "NetworkModel::gradient_step: shape mismatch");
    for (std::size_t l = 0; l < layers_.size(); ++l)
        layers_[l].gradient_step(grads.layers[l], lr);
    readout_.alpha -= lr * grads.dalpha;
    readout_.bias -= lr * grads.dbias;
}

Index NetworkModel::trainable_parameters() const {
    Index total = readout_.alpha.size() + 1;
    for (const LdrLayer& layer : layers_) total += layer.count_parameters().trainable();
    return total;
}

}  // namespace ldr

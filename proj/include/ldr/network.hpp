#pragma once

#include "ldr/layer.hpp"

#include <vector>

namespace ldr {

/// Linear readout over the final layer's activations.
struct Readout {
    Vec alpha;
    double bias = 0.0;
};

/// A stack of LDR layers followed by a scalar linear readout:
///   out = alpha^T y_L + bias,  y_l = layer_l(y_(l-1)).
struct NetworkGradients {
    std::vector<LayerGradients> layers;
    Vec dalpha;
    double dbias = 0.0;
    Vec dx;

    void setZero();
    void axpy(double scale, const NetworkGradients& other);
};

/// Reusable buffers for the per-sample training loop.
struct NetworkScratch {
    std::vector<LdrLayer::ForwardCache> caches;
    std::vector<LdrLayer::Scratch> layer_scratch;
    std::vector<LayerGradients> sample_grads;
    std::vector<Vec> upstreams;
};

class NetworkModel {
public:
    NetworkModel(std::vector<LdrLayer> layers, Readout readout);

    Index input_dim() const { return layers_.front().input_dim(); }
    Index layer_count() const { return static_cast<Index>(layers_.size()); }
    const LdrLayer& layer(Index i) const { return layers_[static_cast<std::size_t>(i)]; }
    LdrLayer& layer(Index i) { return layers_[static_cast<std::size_t>(i)]; }
    const Readout& readout() const { return readout_; }
    Readout& readout() { return readout_; }

    double forward(const Vec& x) const;

    /// Gradients of upstream·out with respect to every parameter and the
    /// input; dx of each layer feeds the previous one.
    NetworkGradients backward(const Vec& x, double upstream) const;
    void backward_accumulate(const Vec& x, double upstream, double scale,
                             NetworkGradients& acc) const;

    NetworkScratch make_scratch() const;
    double forward_scratch(const Vec& x, NetworkScratch& scratch) const;
    /// Backward reusing the caches filled by the matching forward_scratch.
    void backward_cached(double upstream, double scale, NetworkGradients& acc,
                         NetworkScratch& scratch) const;
    void backward_scratch(const Vec& x, double upstream, double scale, NetworkGradients& acc,
                          NetworkScratch& scratch) const;

    NetworkGradients zero_gradients() const;
    void gradient_step(const NetworkGradients& grads, double lr);

    /// Trainable parameter total (generators + biases + readout).
    Index trainable_parameters() const;

private:
    std::vector<LdrLayer> layers_;
    Readout readout_;
};

}  // namespace ldr

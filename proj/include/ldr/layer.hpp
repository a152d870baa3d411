#pragma once

#include "ldr/activation.hpp"
#include "ldr/displacement.hpp"
#include "ldr/operators.hpp"
#include "ldr/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ldr {

/// Gradients of a scalar objective with respect to one layer's
/// parameters and input.
struct LayerGradients {
    std::vector<Mat> dG;  // k matrices, n×r
    std::vector<Mat> dH;  // k matrices, n×r
    Vec dtheta;           // kn
    Vec dx;               // n

    void setZero();
    void axpy(double scale, const LayerGradients& other);
    double max_abs_value() const;
};

/// Parameter budget of a layer, split the way the storage argument counts
/// it: trainable generators + biases, plus the operator descriptors that
/// define each block (2n per block for the pair).
struct ParameterCount {
    Index generators = 0;   // k·2nr
    Index biases = 0;       // kn
    Index operators = 0;    // k·2n
    Index dense_equivalent = 0;  // k·n²
    Index trainable() const { return generators + biases; }
    Index total() const { return generators + biases + operators; }
};

/// Fully-connected layer whose n×kn weight matrix is k square blocks,
/// each stored as a width-r generator pair over a shared displacement
/// operator pair:
///   W = [W_1 | ... | W_k],
///   W_i = [sum_{m<q} A^m G_i H_i^T B^m] (I - a·B^q)^-1,
///   forward(x) = sigma(W^T x + theta).
///
/// The forward/backward pair never materializes W: products run in
/// generator space with O(q(n + nr)) work per block, which is what makes
/// the layer cheaper than a dense one. A dense copy can be materialized
/// for testing and is cached until any parameter changes.
class LdrLayer {
public:
    LdrLayer(PairPtr pair, Index k, Index r, Activation activation);

    Index input_dim() const { return n_; }
    Index output_dim() const { return n_ * k_; }
    Index block_count() const { return k_; }
    Index generator_rank() const { return r_; }
    Activation activation() const { return activation_; }
    const PairPtr& pair() const { return pair_; }

    const Mat& G(Index block) const { return g_[static_cast<std::size_t>(block)]; }
    const Mat& H(Index block) const { return h_[static_cast<std::size_t>(block)]; }
    const Vec& theta() const { return theta_; }
    DisplacementRep block(Index i) const;

    void set_block(Index i, Mat g, Mat h);
    void set_theta(Vec theta);
    /// Gaussian init of generators and biases, scaled for O(1) block output.
    void randomize(class Rng& rng, double scale);
    /// In-place SGD step: p -= lr · grad. Invalidates the dense cache.
    void gradient_step(const LayerGradients& grads, double lr);

    struct ForwardCache {
        Vec x;
        Vec pre;   // W^T x + theta
        Vec y;
        std::uint64_t version = 0;
    };

    /// Preallocated buffers for the generator-space forward/backward inner
    /// loops. One instance per training thread; reused across samples.
    struct Scratch {
        Mat u;        // n × q: (A^T)^m x
        Mat w_terms;  // n × q
        Vec s, acc, d, hs, gu, tmp;
    };
    Scratch make_scratch() const;

    /// y = sigma(W^T x + theta); fills the cache for backward when given.
    Vec forward(const Vec& x, ForwardCache* cache = nullptr) const;

    /// Allocation-free variant writing into cache.y (trainer hot path).
    void forward_scratch(const Vec& x, ForwardCache& cache, Scratch& scratch) const;

    /// Same result through the materialized dense W (testing aid).
    Vec forward_dense(const Vec& x);

    /// Exact generator-space gradients:
    ///   d = upstream ⊙ sigma'(pre), dtheta = d, dx = W d,
    ///   dG_i = sum_m (A^m)^T (x d_i^T) T^T (B^m)^T H_i,
    ///   dH_i = sum_m B^m T (x d_i^T)^T A^m G_i,
    /// computed without forming the rank-1 matrix x d_i^T.
    LayerGradients backward(const ForwardCache& cache, const Vec& upstream) const;

    /// Accumulate scale·gradients into acc (batching aid; acc must be
    /// shaped by zero_gradients).
    void backward_accumulate(const ForwardCache& cache, const Vec& upstream, double scale,
                             LayerGradients& acc) const;

    /// Allocation-free variant (trainer hot path).
    void backward_scratch(const ForwardCache& cache, const Vec& upstream, double scale,
                          LayerGradients& acc, Scratch& scratch) const;

    LayerGradients zero_gradients() const;

    /// Dense W = [W_1 | ... | W_k]; cached, invalidated by any update.
    const Mat& materialize();
    /// Uncached dense materialization (const contexts, tests).
    Mat to_dense() const;

    ParameterCount count_parameters() const;

    std::uint64_t version() const { return version_; }

private:
    void bump_version();

    PairPtr pair_;
    Index n_ = 0;
    Index k_ = 0;
    Index r_ = 0;
    Activation activation_ = Activation::sigmoid;
    std::vector<Mat> g_;
    std::vector<Mat> h_;
    Vec theta_;
    std::uint64_t version_ = 1;
    std::optional<Mat> dense_cache_;
};

}  // namespace ldr

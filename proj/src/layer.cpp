#include "ldr/layer.hpp"

#include "ldr/rng.hpp"

#include <cmath>

namespace ldr {

void LayerGradients::setZero() {
    for (Mat& m : dG) m.setZero();
    for (Mat& m : dH) m.setZero();
    dtheta.setZero();
    dx.setZero();
}

void LayerGradients::axpy(double scale, const LayerGradients& other) {
    for (std::size_t i = 0; i < dG.size(); ++i) dG[i] += scale * other.dG[i];
    for (std::size_t i = 0; i < dH.size(); ++i) dH[i] += scale * other.dH[i];
    dtheta += scale * other.dtheta;
    dx += scale * other.dx;
}

double LayerGradients::max_abs_value() const {
    double m = 0.0;
    for (const Mat& g : dG) m = std::max(m, max_abs(g));
    for (const Mat& h : dH) m = std::max(m, max_abs(h));
    m = std::max(m, max_abs(dtheta));
    m = std::max(m, max_abs(dx));
    return m;
}

LdrLayer::LdrLayer(PairPtr pair, Index k, Index r, Activation activation)
    : pair_(std::move(pair)), k_(k), r_(r), activation_(activation) {
    require(pair_ != nullptr, "LdrLayer: null operator pair");
    require(pair_->decompression_ready(),
            "LdrLayer: operator pair has no decompression data (" + pair_->limitation() + ")");
    require(k >= 1 && r >= 1, "LdrLayer: need k >= 1 blocks and generator rank r >= 1");
    n_ = pair_->size();
    g_.assign(static_cast<std::size_t>(k_), Mat::Zero(n_, r_));
    h_.assign(static_cast<std::size_t>(k_), Mat::Zero(n_, r_));
    theta_ = Vec::Zero(n_ * k_);
}

DisplacementRep LdrLayer::block(Index i) const {
    require(i >= 0 && i < k_, "LdrLayer::block: index out of range");
    return DisplacementRep(pair_, g_[static_cast<std::size_t>(i)], h_[static_cast<std::size_t>(i)]);
}

void LdrLayer::set_block(Index i, Mat g, Mat h) {
    require(i >= 0 && i < k_, "LdrLayer::set_block: index out of range");
    require(g.rows() == n_ && g.cols() == r_ && h.rows() == n_ && h.cols() == r_,
            "LdrLayer::set_block: generator shape mismatch");
    g_[static_cast<std::size_t>(i)] = std::move(g);
    h_[static_cast<std::size_t>(i)] = std::move(h);
    bump_version();
}

void LdrLayer::set_theta(Vec theta) {
    require(theta.size() == n_ * k_, "LdrLayer::set_theta: dimension mismatch");
    theta_ = std::move(theta);
    bump_version();
}

void LdrLayer::randomize(Rng& rng, double scale) {
    // Generators multiply pairwise, so draw entries at sqrt scale relative
    // to the intended block magnitude.
    const double gen_scale = std::sqrt(scale / std::sqrt(static_cast<double>(n_)));
    for (Index i = 0; i < k_; ++i) {
        Mat g(n_, r_), h(n_, r_);
        for (Index a = 0; a < n_; ++a)
            for (Index b = 0; b < r_; ++b) g(a, b) = gen_scale * rng.normal();
        for (Index a = 0; a < n_; ++a)
            for (Index b = 0; b < r_; ++b) h(a, b) = gen_scale * rng.normal();
        g_[static_cast<std::size_t>(i)] = std::move(g);
        h_[static_cast<std::size_t>(i)] = std::move(h);
    }
    for (Index i = 0; i < theta_.size(); ++i) theta_[i] = scale * rng.normal();
    bump_version();
}

void LdrLayer::gradient_step(const LayerGradients& grads, double lr) {
    require(static_cast<Index>(grads.dG.size()) == k_ && grads.dtheta.size() == n_ * k_,
            "LdrLayer::gradient_step: gradient shape mismatch");
    for (Index i = 0; i < k_; ++i) {
        g_[static_cast<std::size_t>(i)] -= lr * grads.dG[static_cast<std::size_t>(i)];
        h_[static_cast<std::size_t>(i)] -= lr * grads.dH[static_cast<std::size_t>(i)];
    }
    theta_ -= lr * grads.dtheta;
    bump_version();
}

void LdrLayer::bump_version() {
    ++version_;
    dense_cache_.reset();
}

LdrLayer::Scratch LdrLayer::make_scratch() const {
    const Index q = pair_->potency().q;
    Scratch s;
    s.u.resize(n_, q);
    s.w_terms.resize(n_, q);
    s.s.resize(n_);
    s.acc.resize(n_);
    s.d.resize(n_ * k_);
    s.hs.resize(r_);
    s.gu.resize(r_);
    s.tmp.resize(n_);
    return s;
}

void LdrLayer::forward_scratch(const Vec& x, ForwardCache& cache, Scratch& scratch) const {
    require(x.size() == n_, "LdrLayer::forward: dimension mismatch");
    require(x.allFinite(), "LdrLayer::forward: input is not finite");

    const Index q = pair_->potency().q;
    const OperatorMatrix& a = pair_->A();
    const OperatorMatrix& b = pair_->B();

    cache.x = x;
    cache.pre.resize(n_ * k_);

    // u_m = (A^T)^m x, shared by every block
    scratch.u.col(0) = x;
    for (Index m = 1; m < q; ++m) {
        scratch.acc = scratch.u.col(m - 1);
        a.apply_transpose_inplace(scratch.acc, scratch.tmp);
        scratch.u.col(m) = scratch.acc;
    }

    // W_i^T x = T^T · sum_m (B^T)^m H_i (G_i^T u_m), inner sum by Horner
    for (Index i = 0; i < k_; ++i) {
        const Mat& gi = g_[static_cast<std::size_t>(i)];
        const Mat& hi = h_[static_cast<std::size_t>(i)];
        scratch.hs.noalias() = gi.transpose() * scratch.u.col(q - 1);
        scratch.acc.noalias() = hi * scratch.hs;
        for (Index m = q - 2; m >= 0; --m) {
            b.apply_transpose_inplace(scratch.acc, scratch.tmp);
            scratch.hs.noalias() = gi.transpose() * scratch.u.col(m);
            scratch.acc.noalias() += hi * scratch.hs;
        }
        if (pair_->t_is_identity()) {
            cache.pre.segment(i * n_, n_) = scratch.acc;
        } else {
            cache.pre.segment(i * n_, n_).noalias() = pair_->T().transpose() * scratch.acc;
        }
    }
    cache.pre += theta_;

    cache.y.resize(n_ * k_);
    for (Index i = 0; i < n_ * k_; ++i) cache.y[i] = activate(activation_, cache.pre[i]);
    cache.version = version_;
}

Vec LdrLayer::forward(const Vec& x, ForwardCache* cache) const {
    ForwardCache local;
    ForwardCache& c = cache != nullptr ? *cache : local;
    Scratch scratch = make_scratch();
    forward_scratch(x, c, scratch);
    return c.y;
}

Vec LdrLayer::forward_dense(const Vec& x) {
    require(x.size() == n_, "LdrLayer::forward_dense: dimension mismatch");
    const Mat& w = materialize();
    return activate(activation_, Vec(w.transpose() * x + theta_));
}

LayerGradients LdrLayer::zero_gradients() const {
    LayerGradients g;
    g.dG.assign(static_cast<std::size_t>(k_), Mat::Zero(n_, r_));
    g.dH.assign(static_cast<std::size_t>(k_), Mat::Zero(n_, r_));
    g.dtheta = Vec::Zero(n_ * k_);
    g.dx = Vec::Zero(n_);
    return g;
}

LayerGradients LdrLayer::backward(const ForwardCache& cache, const Vec& upstream) const {
    LayerGradients acc = zero_gradients();
    backward_accumulate(cache, upstream, 1.0, acc);
    return acc;
}

void LdrLayer::backward_accumulate(const ForwardCache& cache, const Vec& upstream, double scale,
                                   LayerGradients& acc) const {
    Scratch scratch = make_scratch();
    backward_scratch(cache, upstream, scale, acc, scratch);
}

void LdrLayer::backward_scratch(const ForwardCache& cache, const Vec& upstream, double scale,
                                LayerGradients& acc, Scratch& scratch) const {
    if (cache.version != version_)
        throw InvariantError("LdrLayer::backward: stale forward cache (parameters changed)");
    require(upstream.size() == n_ * k_, "LdrLayer::backward: upstream dimension mismatch");

    const Index q = pair_->potency().q;
    const OperatorMatrix& a = pair_->A();
    const OperatorMatrix& b = pair_->B();

    // d = dO/d(pre)
    Vec& d = scratch.d;
    for (Index i = 0; i < n_ * k_; ++i)
        d[i] = upstream[i] * activate_derivative(activation_, cache.pre[i]);

    acc.dtheta += scale * d;

    // u_m = (A^T)^m x, shared across blocks
    scratch.u.col(0) = cache.x;
    for (Index m = 1; m < q; ++m) {
        scratch.acc = scratch.u.col(m - 1);
        a.apply_transpose_inplace(scratch.acc, scratch.tmp);
        scratch.u.col(m) = scratch.acc;
    }

    Vec& s = scratch.s;  // B^m T d_i
    for (Index i = 0; i < k_; ++i) {
        const Mat& gi = g_[static_cast<std::size_t>(i)];
        const Mat& hi = h_[static_cast<std::size_t>(i)];
        Mat& dg = acc.dG[static_cast<std::size_t>(i)];
        Mat& dh = acc.dH[static_cast<std::size_t>(i)];

        if (pair_->t_is_identity()) {
            s = d.segment(i * n_, n_);
        } else {
            s.noalias() = pair_->T() * d.segment(i * n_, n_);
        }
        for (Index m = 0; m < q; ++m) {
            if (m > 0) b.apply_inplace(s, scratch.tmp);
            scratch.hs.noalias() = hi.transpose() * s;
            scratch.gu.noalias() = gi.transpose() * scratch.u.col(m);
            dg.noalias() += scale * (scratch.u.col(m) * scratch.hs.transpose());
            dh.noalias() += scale * (s * scratch.gu.transpose());
            scratch.w_terms.col(m).noalias() = gi * scratch.hs;  // G_i (H_i^T s_m)
        }
        // dx_i = sum_m A^m w_m by Horner
        scratch.acc = scratch.w_terms.col(q - 1);
        for (Index m = q - 2; m >= 0; --m) {
            a.apply_inplace(scratch.acc, scratch.tmp);
            scratch.acc += scratch.w_terms.col(m);
        }
        acc.dx += scale * scratch.acc;
    }
}

const Mat& LdrLayer::materialize() {
    if (!dense_cache_.has_value()) dense_cache_ = to_dense();
    return *dense_cache_;
}

Mat LdrLayer::to_dense() const {
    Mat w(n_, n_ * k_);
    for (Index i = 0; i < k_; ++i) w.middleCols(i * n_, n_) = reconstruct(block(i));
    return w;
}

ParameterCount LdrLayer::count_parameters() const {
    ParameterCount c;
    c.generators = k_ * 2 * n_ * r_;
    c.biases = k_ * n_;
    c.operators = k_ * 2 * n_;
    c.dense_equivalent = k_ * n_ * n_;
    return c;
}

}  // namespace ldr

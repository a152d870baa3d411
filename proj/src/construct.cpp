#include "ldr/construct.hpp"

#include "ldr/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ldr {

namespace {

/// Columns b_(i,j) for a fixed j, i = 0..n-1: b_(i,j) = sum_k lambda_i^k B^k T e_j.
/// Returned as an n×n complex matrix whose column i is b_(i,j), so the
/// selector diagonal for a probe h is h^T · columns, i.e. P^T h.
CMat selector_columns(const OperatorPair& pair, Index j) {
    const Index n = pair.size();
    const Index q = pair.potency().q;
    const CVec& lambda = pair.A().eigen()->lambda;

    Vec e = Vec::Zero(n);
    e[j] = 1.0;
    Vec bkt = pair.apply_T(e);  // B^k T e_j, advanced in place

    CMat cols = CMat::Zero(n, n);
    CVec lambda_pow = CVec::Ones(n);
    for (Index k = 0; k < q; ++k) {
        if (k > 0) {
            bkt = pair.B().apply(bkt);
            for (Index i = 0; i < n; ++i) lambda_pow[i] *= lambda[i];
        }
        for (Index i = 0; i < n; ++i) cols.col(i) += lambda_pow[i] * bkt.cast<Complex>();
    }
    return cols;
}

double min_over_max(const CVec& d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Index i = 0; i < d.size(); ++i) {
        const double m = std::abs(d[i]);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    return hi > 0.0 ? lo / hi : 0.0;
}

Vec project_real(const CVec& z, const char* what) {
    double imag = 0.0;
    double scale = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
        imag = std::max(imag, std::abs(z[i].imag()));
        scale = std::max(scale, std::abs(z[i]));
    }
    if (imag > tol::imag_residue * std::max(1.0, scale)) {
        std::ostringstream os;
        os << what << ": imaginary residue " << imag << " exceeds tolerance";
        throw InvariantError(os.str());
    }
    Vec x(z.size());
    for (Index i = 0; i < z.size(); ++i) x[i] = z[i].real();
    return x;
}

}  // namespace

SelectorResult find_selector(const OperatorPair& pair, const SelectorOptions& opts) {
    require(pair.embedding_ready(),
            "find_selector: operator pair is not ready for the column embedding (" +
                pair.limitation() + ")");
    const Index n = pair.size();

    SelectorResult best;
    best.quality = -1.0;

    Rng rng(opts.seed);
    for (Index j = 0; j < n; ++j) {
        const CMat cols = selector_columns(pair, j);
        // Best of a seeded candidate batch for this column.
        SelectorResult batch_best;
        batch_best.quality = -1.0;
        for (Index c = 0; c < opts.candidates_per_column; ++c) {
            const Vec h = rng.normal_vec(n);
            const CVec d = cols.transpose() * h.cast<Complex>();
            const double quality = min_over_max(d);
            if (quality > batch_best.quality) {
                batch_best = SelectorResult{h, j, d, quality};
            }
        }
        if (batch_best.quality >= opts.floor) return batch_best;
        if (batch_best.quality > best.quality) best = batch_best;
    }

    std::ostringstream os;
    os << "find_selector: candidate budget exhausted; best min|D|/max|D| = " << best.quality
       << " (floor " << opts.floor << ") — the pair is likely ill-conditioned";
    throw InvariantError(os.str());
}

Vec solve_generator(const OperatorPair& pair, const SelectorResult& selector, const Vec& v) {
    const Index n = pair.size();
    require(v.size() == n, "solve_generator: dimension mismatch");
    require(selector.diag.size() == n, "solve_generator: selector diagonal sized n");

    const double hi = selector.diag.cwiseAbs().maxCoeff();
    if (hi <= 0.0) throw InvariantError("solve_generator: selector diagonal is zero");
    for (Index i = 0; i < n; ++i) {
        if (std::abs(selector.diag[i]) < tol::nonsing_floor * hi) {
            throw InvariantError("solve_generator: selector diagonal entry below floor");
        }
    }

    const EigenDecomp& eig = *pair.A().eigen();
    CVec z = eig.Q * v.cast<Complex>();
    for (Index i = 0; i < n; ++i) z[i] /= selector.diag[i];
    const CVec g = eig.Q_inv * z;
    return project_real(g, "solve_generator");
}

ColumnEmbedding construct_with_column(PairPtr pair, const Vec& v, const SelectorOptions& opts) {
    require(pair != nullptr, "construct_with_column: null pair");
    const Index n = pair->size();
    require(v.size() == n, "construct_with_column: dimension mismatch");

    const SelectorResult sel = find_selector(*pair, opts);
    const Vec g = solve_generator(*pair, sel, v);

    Mat gm(n, 1), hm(n, 1);
    gm.col(0) = g;
    hm.col(0) = sel.h;
    DisplacementRep rep(pair, std::move(gm), std::move(hm));

    // Mandatory certificate: the reconstructed column must match v.
    const Mat m = reconstruct(rep);
    const double residual = max_abs(Vec(m.col(sel.j) - v)) / std::max(1.0, max_abs(v));
    if (residual > tol::certificate) {
        std::ostringstream os;
        os << "construct_with_column: certificate failed, column residual " << residual;
        throw InvariantError(os.str());
    }
    return ColumnEmbedding{std::move(rep), sel.j, v, residual};
}

double OneHotNetwork::evaluate(const Vec& x) const {
    require(x.size() == weight_.rows(), "OneHotNetwork::evaluate: dimension mismatch");
    double out = 0.0;
    for (Index i = 0; i < weight_.cols(); ++i) {
        if (alpha[i] == 0.0) continue;
        out += alpha[i] * activate(sigma, weight_.col(i).dot(x) + theta);
    }
    return out;
}

OneHotNetwork embed_as_network(PairPtr pair, const Vec& v, double theta, Activation sigma,
                               const SelectorOptions& opts) {
    ColumnEmbedding emb = construct_with_column(std::move(pair), v, opts);
    Mat weight = reconstruct(emb.rep);
    Vec alpha = Vec::Zero(weight.cols());
    alpha[emb.j] = 1.0;
    return OneHotNetwork{std::move(emb), std::move(alpha), theta, sigma, std::move(weight)};
}

}  // namespace ldr

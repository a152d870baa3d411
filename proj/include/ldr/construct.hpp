#pragma once

#include "ldr/activation.hpp"
#include "ldr/displacement.hpp"
#include "ldr/operators.hpp"
#include "ldr/types.hpp"

#include <cstdint>

namespace ldr {

/// Selector found for a column embedding: a probe vector h and column
/// index j such that the diagonal matrix
///   D = diag(h^T b_(i,j)),  b_(i,j) = sum_{k<q} lambda_i^k B^k T e_j
/// is nonsingular (lambda_i the eigenvalues of A). D is returned in A's
/// eigenvalue order; the generator solve divides by it entrywise.
struct SelectorResult {
    Vec h;
    Index j = 0;
    CVec diag;
    /// min |D_i| / max |D_i| of the accepted selector.
    double quality = 0.0;
};

/// Search options for find_selector. Candidates are drawn from a seeded
/// stream, so the search is deterministic.
struct SelectorOptions {
    std::uint64_t seed = 0x1dce5ULL;
    Index candidates_per_column = 64;
    double floor = tol::nonsing_floor;
};

/// A displacement-rank-1 matrix, stored by its generators, whose column j
/// equals the target vector v. Certified on construction: the
/// reconstructed column matches v within the certificate tolerance.
struct ColumnEmbedding {
    DisplacementRep rep;
    Index j = 0;
    Vec v;
    /// ‖column_j(reconstruct) - v‖_max / max(1, ‖v‖_max), measured at
    /// certification time.
    double residual = 0.0;
};

/// A single-neuron readout of a column embedding: one-hot output weights
/// selecting column j, shared bias theta. Evaluates to
/// sigma(v^T x + theta).
struct OneHotNetwork {
    ColumnEmbedding embedding;
    Vec alpha;
    double theta = 0.0;
    Activation sigma = Activation::sigmoid;

    /// Honest evaluation through the full reconstructed matrix:
    /// sum_i alpha_i * sigma(column_i^T x + theta).
    double evaluate(const Vec& x) const;

    /// The reconstructed weight matrix (cached at construction).
    const Mat& weight() const { return weight_; }
    Mat weight_;
};

/// Find (h, j) making the selector diagonal nonsingular. Requires a
/// embedding-ready pair; throws InvariantError when the candidate budget is
/// exhausted (the message reports the best quality found — for a
/// conforming pair this signals a conditioning problem).
SelectorResult find_selector(const OperatorPair& pair, const SelectorOptions& opts = {});

/// Solve for the generator g such that column j of the rank-1
/// reconstruction with generators (g, h) equals v:
///   g = Q^-1 D^-1 Q v
/// in A's eigenbasis. All arithmetic is complex; the result is projected
/// to real with the imaginary residue asserted below tolerance.
Vec solve_generator(const OperatorPair& pair, const SelectorResult& selector, const Vec& v);

/// Full column-embedding construction: selector search, generator solve,
/// and a mandatory reconstruction certificate (throws InvariantError on
/// certificate failure).
ColumnEmbedding construct_with_column(PairPtr pair, const Vec& v,
                                      const SelectorOptions& opts = {});

/// Wrap a column embedding as a one-hot single-neuron network computing
/// sigma(v^T x + theta).
OneHotNetwork embed_as_network(PairPtr pair, const Vec& v, double theta, Activation sigma,
                               const SelectorOptions& opts = {});

}  // namespace ldr

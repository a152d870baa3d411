#pragma once

#include "ldr/operators.hpp"
#include "ldr/types.hpp"

namespace ldr {

/// Stein displacement M - A·M·B. The canonical displacement form of this
/// library; compression and decompression are stated against it.
Mat stein_displacement(const Mat& m, const OperatorPair& pair);

/// Sylvester displacement A·M - M·B, provided for completeness.
Mat sylvester_displacement(const Mat& m, const OperatorPair& pair);

/// Number of singular values of the Stein displacement exceeding
/// tol·σ_max; 0 for a zero displacement.
Index displacement_rank(const Mat& m, const OperatorPair& pair, double tol = tol::rank_rel);

/// Generator pair (G, H) of width r with G·H^T equal to the Stein
/// displacement of the represented matrix. Together with a
/// decompression-ready operator pair this is the compressed form of a
/// low-displacement-rank matrix.
class DisplacementRep {
public:
    DisplacementRep(PairPtr pair, Mat g, Mat h);

    const OperatorPair& pair() const { return *pair_; }
    const PairPtr& pair_ptr() const { return pair_; }
    const Mat& G() const { return g_; }
    const Mat& H() const { return h_; }
    Index size() const { return g_.rows(); }
    Index rank_bound() const { return g_.cols(); }

private:
    PairPtr pair_;
    Mat g_;
    Mat h_;
};

/// Factor the Stein displacement of m as G·H^T with width r via a
/// truncated singular-value decomposition. Throws InvariantError when the
/// measured displacement rank exceeds r (the message reports it).
DisplacementRep compress(const Mat& m, PairPtr pair, Index r, double tol = tol::rank_rel);

/// Closed-form decompression
///   M = [sum_{k=0}^{q-1} A^k G H^T B^k] (I - a·B^q)^-1,
/// valid when A is a-potent and the solve is well-conditioned. Throws
/// ValidationError when the pair carries no decompression data.
Mat reconstruct(const DisplacementRep& rep);

}  // namespace ldr

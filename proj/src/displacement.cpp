#include "ldr/displacement.hpp"

#include <cmath>
#include <sstream>

namespace ldr {

Mat stein_displacement(const Mat& m, const OperatorPair& pair) {
    require(m.rows() == m.cols() && m.rows() == pair.size(),
            "stein_displacement: dimension mismatch");
    return m - pair.A().to_dense() * m * pair.B().to_dense();
}

Mat sylvester_displacement(const Mat& m, const OperatorPair& pair) {
    require(m.rows() == m.cols() && m.rows() == pair.size(),
            "sylvester_displacement: dimension mismatch");
    return pair.A().to_dense() * m - m * pair.B().to_dense();
}

Index displacement_rank(const Mat& m, const OperatorPair& pair, double tol) {
    require(tol > 0.0, "displacement_rank: tolerance must be positive");
    const Mat delta = stein_displacement(m, pair);
    Eigen::JacobiSVD<Mat> svd(delta);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = tol * sv(0);
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return rank;
}

DisplacementRep::DisplacementRep(PairPtr pair, Mat g, Mat h)
    : pair_(std::move(pair)), g_(std::move(g)), h_(std::move(h)) {
    require(pair_ != nullptr, "DisplacementRep: null operator pair");
    require(g_.rows() == pair_->size() && h_.rows() == pair_->size() && g_.cols() == h_.cols(),
            "DisplacementRep: generator shapes inconsistent with the pair");
}

DisplacementRep compress(const Mat& m, PairPtr pair, Index r, double tol) {
    require(pair != nullptr, "compress: null operator pair");
    require(r >= 1, "compress: rank bound must be >= 1");
    const Index n = pair->size();
    require(m.rows() == n && m.cols() == n, "compress: dimension mismatch");

    const Mat delta = stein_displacement(m, *pair);
    Eigen::JacobiSVD<Mat> svd(delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();

    Index measured = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
        const double cutoff = tol * sv(0);
        while (measured < sv.size() && sv(measured) > cutoff) ++measured;
    }
    if (measured > r) {
        std::ostringstream os;
        os << "compress: displacement rank " << measured << " exceeds requested bound " << r;
        throw InvariantError(os.str());
    }

    Mat g = Mat::Zero(n, r);
    Mat h = Mat::Zero(n, r);
    for (Index j = 0; j < measured; ++j) {
        const double s = std::sqrt(sv(j));
        g.col(j) = svd.matrixU().col(j) * s;
        h.col(j) = svd.matrixV().col(j) * s;
    }
    return DisplacementRep(std::move(pair), std::move(g), std::move(h));
}

Mat reconstruct(const DisplacementRep& rep) {
    const OperatorPair& pair = rep.pair();
    const Potency& pot = pair.potency();  // throws when decompression data is missing
    const Index n = rep.size();

    Mat p = rep.G();  // A^k G
    Mat q = rep.H();  // (B^T)^k H, so that q^T = H^T B^k
    Mat sum = Mat::Zero(n, n);
    for (Index k = 0; k < pot.q; ++k) {
        if (k > 0) {
            for (Index c = 0; c < p.cols(); ++c) {
                p.col(c) = pair.A().apply(p.col(c));
                q.col(c) = pair.B().apply_transpose(q.col(c));
            }
        }
        sum.noalias() += p * q.transpose();
    }
    if (pair.t_is_identity()) return sum;
    return sum * pair.T();
}

}  // namespace ldr

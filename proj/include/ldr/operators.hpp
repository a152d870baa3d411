#pragma once

#include "ldr/types.hpp"

#include <memory>
#include <optional>
#include <string>

namespace ldr {

/// A^q = a·I with the smallest such q and a nonzero scalar a.
struct Potency {
    Index q = 0;
    double a = 0.0;
};

/// Eigendecomposition in the form A = Q_inv · diag(lambda) · Q.
struct EigenDecomp {
    CMat Q;
    CVec lambda;
    CMat Q_inv;
};

enum class OperatorKind { unit_circulant, diagonal, dense };

/// Displacement operator: a unit-f-circulant shift Z_f (or its transpose),
/// a diagonal matrix, or an explicit dense matrix. Immutable after
/// construction; cheap to copy (shared payload). Potency is detected at
/// construction; the eigendecomposition is materialized lazily and cached.
///
/// Z_f is the cyclic down-shift whose wrap-around entry is f:
/// (Z_f)_(i,j) = 1 for i = j+1 and (Z_f)_(0,n-1) = f.
class OperatorMatrix {
public:
    static OperatorMatrix unit_circulant(Index n, double f);
    static OperatorMatrix unit_circulant_transposed(Index n, double f);
    static OperatorMatrix diagonal(Vec d);
    static OperatorMatrix dense(Mat m);
    /// diag(1, ..., 1)
    static OperatorMatrix identity(Index n);
    /// diag(0, ..., 0)
    static OperatorMatrix zero(Index n);

    OperatorKind kind() const;
    Index size() const;
    /// Wrap entry f of a unit circulant.
    double shift_weight() const;
    /// True for the transposed (up-shift) orientation of a unit circulant.
    bool transposed() const;
    const Vec& diagonal_entries() const;

    const std::optional<Potency>& potency() const;

    /// Dense materialization, computed once and cached.
    const Mat& to_dense() const;

    /// A·x with O(n) fast paths for circulant and diagonal kinds.
    Vec apply(const Vec& x) const;
    /// A^T·x.
    Vec apply_transpose(const Vec& x) const;
    /// x := A·x without allocating (tmp holds n entries, used by the dense
    /// kind only).
    void apply_inplace(Vec& x, Vec& tmp) const;
    void apply_transpose_inplace(Vec& x, Vec& tmp) const;

    /// Eigendecomposition, or nullptr when the operator is not
    /// diagonalizable within tolerance (e.g. Z_0). Closed-form Fourier
    /// diagonalization for unit circulants with f != 0, trivial for
    /// diagonal; a numeric solver for dense. Cached after first call.
    const EigenDecomp* eigen() const;

    double norm_max() const;

    /// Short description for error messages and reports.
    std::string describe() const;

private:
    struct Impl;
    explicit OperatorMatrix(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Smallest q <= q_max with A^q = a·I for a nonzero scalar a, detected by
/// scaled power iteration; residual measured against ‖A^q‖_max.
std::optional<Potency> check_potency(const OperatorMatrix& a, Index q_max);

/// Eigendecomposition satisfying ‖Q_inv·diag(lambda)·Q - A‖_max <=
/// tol_eig·‖A‖_max. Throws ValidationError when no decomposition within
/// tolerance exists (non-diagonalizable input).
EigenDecomp eigendecompose(const OperatorMatrix& a);

/// An ordered operator pair (A, B) for Stein/Sylvester displacements.
///
/// Construction always succeeds for dimension-compatible operators; the
/// data needed for closed-form decompression (A's potency and the cached
/// solve T = (I - a·B^q)^-1) is attached when available, and
/// decompression_ready() reports it. Pairs whose (I - a·B^q) is singular or has
/// condition number above cond_max carry no decompression data.
/// embedding_ready() additionally requires A and B diagonalizable, B
/// nonsingular, and the eigenvalues of B to have pairwise-distinct
/// absolute values (separation >= sep_min) — the conditions under which
/// the column-embedding construction is guaranteed to succeed.
class OperatorPair {
public:
    OperatorPair(OperatorMatrix a, OperatorMatrix b);

    /// As above but throws ValidationError unless the pair is ready for
    /// compression/decompression round trips (potent A, well-conditioned
    /// I - a·B^q).
    static OperatorPair checked(OperatorMatrix a, OperatorMatrix b);

    const OperatorMatrix& A() const { return a_; }
    const OperatorMatrix& B() const { return b_; }
    Index size() const { return a_.size(); }

    bool decompression_ready() const { return decompression_.has_value(); }
    bool embedding_ready() const { return embedding_ready_; }
    /// Why the pair fails decompression/embedding readiness (empty when fully ready).
    const std::string& limitation() const { return limitation_; }

    /// Potency of A. Throws ValidationError when !decompression_ready().
    const Potency& potency() const;
    /// Condition number of (I - a·B^q). Throws when !decompression_ready().
    double solve_cond() const;
    /// True when B^q = 0 so that T = I exactly and solves are skipped.
    bool t_is_identity() const;

    /// x -> (I - a·B^q)^-1 x. Throws when !decompression_ready().
    Vec apply_T(const Vec& x) const;
    /// x -> (I - a·B^q)^-T x.
    Vec apply_T_transpose(const Vec& x) const;
    /// Dense T (identity returned when t_is_identity()).
    const Mat& T() const;

private:
    OperatorMatrix a_;
    OperatorMatrix b_;

    struct DecompressionData {
        Potency potency;
        Mat t;            // (I - a·B^q)^-1; identity stored explicitly when trivial
        bool t_identity = false;
        double cond = 0.0;
    };
    std::optional<DecompressionData> decompression_;
    bool embedding_ready_ = false;
    std::string limitation_;
};

using PairPtr = std::shared_ptr<const OperatorPair>;

inline PairPtr make_pair_ptr(OperatorMatrix a, OperatorMatrix b) {
    return std::make_shared<const OperatorPair>(std::move(a), std::move(b));
}

}  // namespace ldr

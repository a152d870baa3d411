#pragma once

#include "ldr/fourier.hpp"
#include "ldr/operators.hpp"
#include "ldr/types.hpp"

#include <memory>
#include <string>

namespace ldr {

enum class Family { circulant, toeplitz, hankel, vandermonde, cauchy };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// One of the five classic structured families with its defining vectors
/// and a fast matrix-vector product.
///
/// Conventions fixed here and asserted in tests:
///   circulant(c)      entry (i,j) = c[(i-j) mod n]; c is the first column.
///   toeplitz(col,row) constant along diagonals; col is the first column,
///                     row the first row, col[0] == row[0].
///   hankel(col,row)   constant along anti-diagonals; col is the first
///                     column, row the last row, col[n-1] == row[0].
///   vandermonde(t)    entry (i,j) = t_i^j.
///   cauchy(s,t)       entry (i,j) = 1/(s_i - t_j), s_i != t_j.
///
/// Circulant and Toeplitz (and Hankel via index reversal) products run
/// through a radix-2 FFT; non-power-of-two sizes embed into the next
/// power-of-two circulant. Vandermonde and Cauchy use the direct O(n^2)
/// formulas.
class StructuredMatrix {
public:
    static StructuredMatrix circulant(Vec c);
    static StructuredMatrix toeplitz(Vec col, Vec row);
    static StructuredMatrix hankel(Vec col, Vec row);
    static StructuredMatrix vandermonde(Vec t);
    static StructuredMatrix cauchy(Vec s, Vec t);

    Family family() const { return family_; }
    Index size() const { return n_; }
    const Vec& vector0() const { return v0_; }
    const Vec& vector1() const { return v1_; }

    Mat to_dense() const;
    Vec matvec(const Vec& x) const;

    /// Stein operator pair under which this family meets its displacement
    /// rank bound (see table1_rank_bound). For Cauchy this requires all
    /// t_j bounded away from zero.
    OperatorPair table1_pair() const;
    /// 2 for circulant/toeplitz/hankel, 1 for vandermonde/cauchy.
    Index table1_rank_bound() const;

private:
    StructuredMatrix(Family family, Index n, Vec v0, Vec v1);
    Vec fft_matvec(const Vec& x, bool reverse_input) const;

    Family family_;
    Index n_;
    Vec v0_;
    Vec v1_;

    // circulant embedding of the family kernel, spectrum precomputed
    std::shared_ptr<const FourierPlan> plan_;
    CVec kernel_spectrum_;
};

/// Canonical Stein operator pair for a family at dimension n. cauchy_t is
/// required for the Cauchy family (its pair depends on the defining
/// vectors).
OperatorPair table1_pair(Family family, Index n, const Vec* cauchy_s = nullptr,
                         const Vec* cauchy_t = nullptr);

Index table1_rank_bound(Family family);

}  // namespace ldr

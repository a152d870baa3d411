#pragma once

#include "ldr/types.hpp"

#include <cstdint>
#include <vector>

namespace ldr {

/// Smallest power of two >= n (n >= 1).
Index next_pow2(Index n);

/// Radix-2 discrete Fourier transform plan for one power-of-two length.
/// Twiddle factors and the bit-reversal permutation are tabulated once;
/// a plan is immutable and safe to share across threads.
///
/// forward computes y_k = sum_m x_m e^(-2πi km / n); inverse applies the
/// conjugate transform scaled by 1/n, so inverse(forward(x)) == x.
class FourierPlan {
public:
    explicit FourierPlan(Index length);

    Index length() const { return n_; }

    void forward_inplace(Complex* x) const { transform(x, false); }
    void inverse_inplace(Complex* x) const { transform(x, true); }

    CVec forward(const CVec& x) const;
    CVec inverse(const CVec& y) const;

private:
    void transform(Complex* x, bool inverse) const;

    Index n_;
    int log2n_;
    std::vector<Complex> twiddle_;       // e^(-2πi j / n) for j < n/2
    std::vector<std::uint32_t> bitrev_;
};

}  // namespace ldr

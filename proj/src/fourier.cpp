#include "ldr/fourier.hpp"

#include <cmath>

namespace ldr {

Index next_pow2(Index n) {
    require(n >= 1, "next_pow2: length must be positive");
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

FourierPlan::FourierPlan(Index length) : n_(length) {
    require(length >= 1 && (length & (length - 1)) == 0,
            "FourierPlan: length must be a power of two, got " + std::to_string(length));
    log2n_ = 0;
    while ((Index{1} << log2n_) < n_) ++log2n_;

    twiddle_.resize(static_cast<std::size_t>(n_ / 2 > 0 ? n_ / 2 : 1));
    for (Index j = 0; j < n_ / 2; ++j) {
        const double ang = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n_);
        twiddle_[static_cast<std::size_t>(j)] = Complex(std::cos(ang), std::sin(ang));
    }

    bitrev_.resize(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) {
        std::uint32_t r = 0;
        for (int b = 0; b < log2n_; ++b) r |= ((static_cast<std::uint32_t>(i) >> b) & 1u) << (log2n_ - 1 - b);
        bitrev_[static_cast<std::size_t>(i)] = r;
    }
}

void FourierPlan::transform(Complex* x, bool inverse) const {
    for (Index i = 0; i < n_; ++i) {
        const Index j = static_cast<Index>(bitrev_[static_cast<std::size_t>(i)]);
        if (j > i) std::swap(x[i], x[j]);
    }
    for (Index half = 1; half < n_; half <<= 1) {
        const Index stride = n_ / (2 * half);  // twiddle index step at this stage
        for (Index block = 0; block < n_; block += 2 * half) {
            for (Index j = 0; j < half; ++j) {
                Complex w = twiddle_[static_cast<std::size_t>(j * stride)];
                if (inverse) w = std::conj(w);
                const Complex t = w * x[block + j + half];
                x[block + j + half] = x[block + j] - t;
                x[block + j] += t;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n_);
        for (Index i = 0; i < n_; ++i) x[i] *= scale;
    }
}

CVec FourierPlan::forward(const CVec& x) const {
    require(x.size() == n_, "FourierPlan::forward: length mismatch");
    CVec y = x;
    forward_inplace(y.data());
    return y;
}

CVec FourierPlan::inverse(const CVec& y) const {
    require(y.size() == n_, "FourierPlan::inverse: length mismatch");
    CVec x = y;
    inverse_inplace(x.data());
    return x;
}

}  // namespace ldr

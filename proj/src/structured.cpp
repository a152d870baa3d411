#include "ldr/structured.hpp"

#include <cmath>
#include <sstream>

namespace ldr {

namespace {

// Minimum |s_i - t_j| for a Cauchy matrix to be accepted.
constexpr double kCauchyGap = 1e-12;
// Cauchy's Stein pair uses diag(1/t); reject t entries this close to zero.
constexpr double kCauchyTFloor = 1e-12;

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::circulant: return "circulant";
        case Family::toeplitz: return "toeplitz";
        case Family::hankel: return "hankel";
        case Family::vandermonde: return "vandermonde";
        case Family::cauchy: return "cauchy";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    for (Family f : {Family::circulant, Family::toeplitz, Family::hankel, Family::vandermonde,
                     Family::cauchy}) {
        if (name == family_name(f)) return f;
    }
    throw ValidationError("unknown structured family: " + name);
}

StructuredMatrix::StructuredMatrix(Family family, Index n, Vec v0, Vec v1)
    : family_(family), n_(n), v0_(std::move(v0)), v1_(std::move(v1)) {
    if (family_ == Family::vandermonde || family_ == Family::cauchy) return;

    // Precompute the circulant-embedding spectrum for the FFT product.
    // An n-circulant at a power-of-two size embeds as itself; everything
    // else goes through the 2n Toeplitz embedding.
    Vec col, row;
    switch (family_) {
        case Family::circulant: {
            const bool pow2 = (n_ & (n_ - 1)) == 0;
            if (pow2) {
                plan_ = std::make_shared<FourierPlan>(n_);
                CVec c(n_);
                for (Index i = 0; i < n_; ++i) c[i] = Complex(v0_[i], 0.0);
                kernel_spectrum_ = plan_->forward(c);
                return;
            }
            col = v0_;
            row.resize(n_);
            row[0] = v0_[0];
            for (Index j = 1; j < n_; ++j) row[j] = v0_[n_ - j];
            break;
        }
        case Family::toeplitz:
            col = v0_;
            row = v1_;
            break;
        case Family::hankel:
            // H·x = T·(reverse x) with T toeplitz(col = row_H, row = reverse(col_H))
            col = v1_;
            row.resize(n_);
            for (Index j = 0; j < n_; ++j) row[j] = v0_[n_ - 1 - j];
            break;
        default:
            break;
    }
    const Index m = next_pow2(2 * n_);
    plan_ = std::make_shared<FourierPlan>(m);
    CVec kernel = CVec::Zero(m);
    for (Index d = 0; d < n_; ++d) kernel[d] = Complex(col[d], 0.0);
    for (Index d = 1; d < n_; ++d) kernel[m - d] = Complex(row[d], 0.0);
    plan_->forward_inplace(kernel.data());
    kernel_spectrum_ = std::move(kernel);
}

StructuredMatrix StructuredMatrix::circulant(Vec c) {
    require(c.size() >= 1, "circulant: empty defining vector");
    const Index n = c.size();
    return StructuredMatrix(Family::circulant, n, std::move(c), Vec());
}

StructuredMatrix StructuredMatrix::toeplitz(Vec col, Vec row) {
    require(col.size() >= 1 && col.size() == row.size(), "toeplitz: defining vectors sized n");
    require(col[0] == row[0], "toeplitz: col[0] must equal row[0]");
    const Index n = col.size();
    return StructuredMatrix(Family::toeplitz, n, std::move(col), std::move(row));
}

StructuredMatrix StructuredMatrix::hankel(Vec col, Vec row) {
    require(col.size() >= 1 && col.size() == row.size(), "hankel: defining vectors sized n");
    require(col[col.size() - 1] == row[0], "hankel: col[n-1] must equal row[0]");
    const Index n = col.size();
    return StructuredMatrix(Family::hankel, n, std::move(col), std::move(row));
}

StructuredMatrix StructuredMatrix::vandermonde(Vec t) {
    require(t.size() >= 1, "vandermonde: empty defining vector");
    const Index n = t.size();
    return StructuredMatrix(Family::vandermonde, n, std::move(t), Vec());
}

StructuredMatrix StructuredMatrix::cauchy(Vec s, Vec t) {
    require(s.size() >= 1 && s.size() == t.size(), "cauchy: defining vectors sized n");
    for (Index i = 0; i < s.size(); ++i) {
        for (Index j = 0; j < t.size(); ++j) {
            if (std::abs(s[i] - t[j]) < kCauchyGap) {
                std::ostringstream os;
                os << "cauchy: |s[" << i << "] - t[" << j << "]| below minimum gap " << kCauchyGap;
                throw ValidationError(os.str());
            }
        }
    }
    const Index n = s.size();
    return StructuredMatrix(Family::cauchy, n, std::move(s), std::move(t));
}

Mat StructuredMatrix::to_dense() const {
    Mat m(n_, n_);
    switch (family_) {
        case Family::circulant:
            for (Index i = 0; i < n_; ++i)
                for (Index j = 0; j < n_; ++j) m(i, j) = v0_[((i - j) % n_ + n_) % n_];
            break;
        case Family::toeplitz:
            for (Index i = 0; i < n_; ++i)
                for (Index j = 0; j < n_; ++j) m(i, j) = i >= j ? v0_[i - j] : v1_[j - i];
            break;
        case Family::hankel:
            for (Index i = 0; i < n_; ++i)
                for (Index j = 0; j < n_; ++j)
                    m(i, j) = i + j < n_ ? v0_[i + j] : v1_[i + j - n_ + 1];
            break;
        case Family::vandermonde:
            for (Index i = 0; i < n_; ++i) {
                double p = 1.0;
                for (Index j = 0; j < n_; ++j) {
                    m(i, j) = p;
                    p *= v0_[i];
                }
            }
            break;
        case Family::cauchy:
            for (Index i = 0; i < n_; ++i)
                for (Index j = 0; j < n_; ++j) m(i, j) = 1.0 / (v0_[i] - v1_[j]);
            break;
    }
    return m;
}

Vec StructuredMatrix::fft_matvec(const Vec& x, bool reverse_input) const {
    const Index m = plan_->length();
    CVec xv = CVec::Zero(m);
    for (Index i = 0; i < n_; ++i)
        xv[i] = Complex(reverse_input ? x[n_ - 1 - i] : x[i], 0.0);
    plan_->forward_inplace(xv.data());
    for (Index i = 0; i < m; ++i) xv[i] *= kernel_spectrum_[i];
    plan_->inverse_inplace(xv.data());
    Vec y(n_);
    for (Index i = 0; i < n_; ++i) y[i] = xv[i].real();
    return y;
}

Vec StructuredMatrix::matvec(const Vec& x) const {
    require(x.size() == n_, "matvec: dimension mismatch");
    switch (family_) {
        case Family::circulant:
        case Family::toeplitz:
            return fft_matvec(x, /*reverse_input=*/false);
        case Family::hankel:
            return fft_matvec(x, /*reverse_input=*/true);
        case Family::vandermonde: {
            // Horner over descending powers: y_i = sum_j t_i^j x_j
            Vec y(n_);
            for (Index i = 0; i < n_; ++i) {
                double acc = x[n_ - 1];
                for (Index j = n_ - 2; j >= 0; --j) acc = acc * v0_[i] + x[j];
                y[i] = acc;
            }
            return y;
        }
        case Family::cauchy: {
            Vec y = Vec::Zero(n_);
            for (Index i = 0; i < n_; ++i)
                for (Index j = 0; j < n_; ++j) y[i] += x[j] / (v0_[i] - v1_[j]);
            return y;
        }
    }
    return Vec();
}

OperatorPair StructuredMatrix::table1_pair() const {
    switch (family_) {
        case Family::cauchy:
            return ldr::table1_pair(family_, n_, &v0_, &v1_);
        case Family::vandermonde:
            return OperatorPair(OperatorMatrix::diagonal(v0_),
                                OperatorMatrix::unit_circulant_transposed(n_, 0.0));
        default:
            return ldr::table1_pair(family_, n_);
    }
}

Index StructuredMatrix::table1_rank_bound() const { return ldr::table1_rank_bound(family_); }

OperatorPair table1_pair(Family family, Index n, const Vec* cauchy_s, const Vec* cauchy_t) {
    switch (family) {
        case Family::circulant:
        case Family::toeplitz:
            return OperatorPair(OperatorMatrix::unit_circulant(n, 1.0),
                                OperatorMatrix::unit_circulant_transposed(n, 0.0));
        case Family::hankel:
            return OperatorPair(OperatorMatrix::unit_circulant(n, 0.0),
                                OperatorMatrix::unit_circulant(n, 1.0));
        case Family::vandermonde:
            throw ValidationError(
                "table1_pair: vandermonde pair depends on its defining vector; use "
                "StructuredMatrix::table1_pair()");
        case Family::cauchy: {
            require(cauchy_s != nullptr && cauchy_t != nullptr,
                    "table1_pair: cauchy requires its defining vectors");
            Vec t_inv(cauchy_t->size());
            for (Index j = 0; j < cauchy_t->size(); ++j) {
                require(std::abs((*cauchy_t)[j]) >= kCauchyTFloor,
                        "table1_pair: cauchy t entries must be bounded away from zero");
                t_inv[j] = 1.0 / (*cauchy_t)[j];
            }
            return OperatorPair(OperatorMatrix::diagonal(*cauchy_s),
                                OperatorMatrix::diagonal(t_inv));
        }
    }
    throw ValidationError("table1_pair: unknown family");
}

Index table1_rank_bound(Family family) {
    switch (family) {
        case Family::circulant:
        case Family::toeplitz:
        case Family::hankel:
            return 2;
        case Family::vandermonde:
        case Family::cauchy:
            return 1;
    }
    return 0;
}

}  // namespace ldr

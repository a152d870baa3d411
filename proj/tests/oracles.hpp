// Independent oracles used by the test suites. Everything here is written
// with plain loops (no Eigen products, no library fast paths) so the
// implementations are checked against genuinely separate arithmetic.
#pragma once

#include "ldr/types.hpp"

#include <complex>
#include <vector>

namespace oracle {

using ldr::CVec;
using ldr::Complex;
using ldr::Index;
using ldr::Mat;
using ldr::Vec;

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat c = Mat::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

inline Vec matvec(const Mat& a, const Vec& x) {
    Vec y = Vec::Zero(a.rows());
    for (Index i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

inline Mat stein(const Mat& m, const Mat& a, const Mat& b) {
    return m - matmul(matmul(a, m), b);
}

inline Mat sylvester(const Mat& m, const Mat& a, const Mat& b) {
    return matmul(a, m) - matmul(m, b);
}

inline Mat power(const Mat& a, Index q) {
    Mat p = Mat::Identity(a.rows(), a.cols());
    for (Index k = 0; k < q; ++k) p = matmul(p, a);
    return p;
}

/// Direct O(n^2) DFT with the e^(-2πi jk/n) kernel.
inline CVec dft(const CVec& x) {
    const Index n = x.size();
    CVec y = CVec::Zero(n);
    for (Index k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (Index j = 0; j < n; ++j) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(j) /
                               static_cast<double>(n);
            acc += x[j] * Complex(std::cos(ang), std::sin(ang));
        }
        y[k] = acc;
    }
    return y;
}

/// Closed-form decompression evaluated with plain loops: the ground truth for
/// reconstruct round trips.
inline Mat decompression_reconstruct(const Mat& g, const Mat& h, const Mat& a, const Mat& b, Index q,
                              double a_scalar) {
    const Index n = a.rows();
    Mat sum = Mat::Zero(n, n);
    Mat ak = Mat::Identity(n, n);
    Mat bk = Mat::Identity(n, n);
    for (Index k = 0; k < q; ++k) {
        if (k > 0) {
            ak = matmul(ak, a);
            bk = matmul(bk, b);
        }
        sum += matmul(matmul(matmul(ak, g), h.transpose()), bk);
    }
    const Mat t_inv = Mat::Identity(n, n) - a_scalar * power(b, q);
    // small dense solve by Gauss-Jordan, independent of Eigen's LU
    Mat aug(n, 2 * n);
    aug.leftCols(n) = t_inv;
    aug.rightCols(n) = Mat::Identity(n, n);
    for (Index col = 0; col < n; ++col) {
        Index piv = col;
        for (Index r2 = col + 1; r2 < n; ++r2)
            if (std::abs(aug(r2, col)) > std::abs(aug(piv, col))) piv = r2;
        aug.row(col).swap(aug.row(piv));
        aug.row(col) /= aug(col, col);
        for (Index r2 = 0; r2 < n; ++r2) {
            if (r2 == col) continue;
            aug.row(r2) -= aug(r2, col) * aug.row(col);
        }
    }
    return matmul(sum, aug.rightCols(n));
}

/// Selector diagonal entries by brute force:
/// D_i = h^T (sum_{k<q} lambda_i^k B^k T e_j).
inline CVec selector_diagonal(const Vec& h, Index j, const CVec& lambda, const Mat& b,
                              const Mat& t, Index q) {
    const Index n = b.rows();
    CVec d = CVec::Zero(n);
    Vec e = Vec::Zero(n);
    e[j] = 1.0;
    Vec te = matvec(t, e);
    for (Index i = 0; i < n; ++i) {
        Complex lp = 1.0;
        Vec bk_te = te;
        Complex acc = 0.0;
        for (Index k = 0; k < q; ++k) {
            if (k > 0) {
                bk_te = matvec(b, bk_te);
                lp *= lambda[i];
            }
            Complex dot = 0.0;
            for (Index m = 0; m < n; ++m) dot += Complex(h[m] * bk_te[m], 0.0);
            acc += lp * dot;
        }
        d[i] = acc;
    }
    return d;
}

inline double rel_err(const Mat& got, const Mat& want) {
    const double scale = std::max(1.0, ldr::max_abs(want));
    return ldr::max_abs(Mat(got - want)) / scale;
}

inline double rel_err(const Vec& got, const Vec& want) {
    const double scale = std::max(1.0, ldr::max_abs(want));
    return ldr::max_abs(Vec(got - want)) / scale;
}

}  // namespace oracle

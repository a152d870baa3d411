#include "ldr/operators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <vector>

namespace ldr {

struct OperatorMatrix::Impl {
    OperatorKind kind = OperatorKind::dense;
    Index n = 0;
    double f = 0.0;      // unit_circulant wrap entry
    bool up = false;     // transposed orientation
    Vec diag;            // diagonal entries
    Mat dense_given;     // dense kind storage
    std::optional<Potency> potency;

    mutable std::once_flag dense_once;
    mutable Mat dense_cache;

    mutable std::once_flag eig_once;
    mutable std::optional<EigenDecomp> eig_cache;

    Mat materialize() const {
        switch (kind) {
            case OperatorKind::unit_circulant: {
                Mat m = Mat::Zero(n, n);
                for (Index i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
                if (n == 1)
                    m(0, 0) = f;
                else
                    m(0, n - 1) = f;
                if (up) m.transposeInPlace();
                return m;
            }
            case OperatorKind::diagonal:
                return diag.asDiagonal();
            case OperatorKind::dense:
                return dense_given;
        }
        return Mat();
    }
};

namespace {

/// Scaled power iteration: tracks P_q = A^q as a unit-max-abs matrix plus a
/// log scale, so potency detection neither overflows nor loses nilpotent
/// cases to underflow.
std::optional<Potency> detect_potency(const Mat& a, Index q_max) {
    const Index n = a.rows();
    const double norm_a = max_abs(a);
    if (norm_a == 0.0) return std::nullopt;

    Mat p = a / norm_a;
    double log_scale = std::log(norm_a);
    const Mat a_unit = a / norm_a;

    for (Index q = 1; q <= q_max; ++q) {
        if (q > 1) {
            p = p * a_unit;
            const double m = max_abs(p);
            if (m == 0.0 || !std::isfinite(m)) return std::nullopt;
            p /= m;
            log_scale += std::log(m) + std::log(norm_a);
        }
        const double scalar = p.trace() / static_cast<double>(n);
        Mat resid = p;
        resid.diagonal().array() -= scalar;
        // p has unit max-abs, so |scalar| near 1 iff p is near a scaled identity.
        if (max_abs(resid) <= tol::potency && std::abs(scalar) >= 0.5) {
            const double a_val = scalar * std::exp(log_scale);
            if (a_val == 0.0 || !std::isfinite(a_val)) return std::nullopt;
            return Potency{q, a_val};
        }
    }
    return std::nullopt;
}

EigenDecomp circulant_eigen(Index n, double f, bool up) {
    // Z_f = Q^-1 diag(lambda) Q with lambda_j = rho·e^(2πi j/n),
    // rho = f^(1/n), Q^-1 = diag(rho^-i)·F, Q = (1/n)·F*·diag(rho^i),
    // F the unnormalized forward DFT matrix. The transpose swaps
    // Q <- (Q^-1)^T.
    const Complex rho = std::pow(Complex(f, 0.0), 1.0 / static_cast<double>(n));
    CVec lambda(n);
    CVec rho_pow(n);
    Complex rp = 1.0;
    for (Index i = 0; i < n; ++i) {
        rho_pow[i] = rp;
        rp *= rho;
    }
    for (Index j = 0; j < n; ++j) {
        const double ang = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        lambda[j] = rho * Complex(std::cos(ang), std::sin(ang));
    }
    CMat q_inv(n, n), q(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double ang = 2.0 * M_PI * static_cast<double>(i) * static_cast<double>(j) /
                               static_cast<double>(n);
            const Complex fwd(std::cos(ang), -std::sin(ang));
            q_inv(i, j) = fwd / rho_pow[i];
            q(i, j) = std::conj(fwd) * rho_pow[j] / static_cast<double>(n);
        }
    }
    if (up) {
        CMat qt = q_inv.transpose();
        CMat q_invt = q.transpose();
        return EigenDecomp{std::move(qt), std::move(lambda), std::move(q_invt)};
    }
    return EigenDecomp{std::move(q), std::move(lambda), std::move(q_inv)};
}

std::optional<EigenDecomp> dense_eigen(const Mat& a) {
    Eigen::ComplexEigenSolver<CMat> solver(a.cast<Complex>(), /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) return std::nullopt;
    CMat v = solver.eigenvectors();
    Eigen::FullPivLU<CMat> lu(v);
    if (!lu.isInvertible()) return std::nullopt;
    CMat v_inv = lu.inverse();
    EigenDecomp dec{v_inv, solver.eigenvalues(), v};
    CMat resid = dec.Q_inv * dec.lambda.asDiagonal() * dec.Q - a.cast<Complex>();
    const double scale = std::max(max_abs(a), 1e-300);
    if (max_abs(resid) > tol::eig * scale) return std::nullopt;
    return dec;
}

}  // namespace

OperatorMatrix OperatorMatrix::unit_circulant(Index n, double f) {
    require(n >= 1, "unit_circulant: dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::unit_circulant;
    impl->n = n;
    impl->f = f;
    impl->up = false;
    if (f != 0.0) impl->potency = Potency{n, f};
    return OperatorMatrix(std::move(impl));
}

OperatorMatrix OperatorMatrix::unit_circulant_transposed(Index n, double f) {
    require(n >= 1, "unit_circulant_transposed: dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::unit_circulant;
    impl->n = n;
    impl->f = f;
    impl->up = true;
    if (f != 0.0) impl->potency = Potency{n, f};
    return OperatorMatrix(std::move(impl));
}

OperatorMatrix OperatorMatrix::diagonal(Vec d) {
    require(d.size() >= 1, "diagonal: dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::diagonal;
    impl->n = d.size();
    impl->diag = std::move(d);
    impl->potency = detect_potency(impl->diag.asDiagonal().toDenseMatrix(), impl->n);
    return OperatorMatrix(std::move(impl));
}

OperatorMatrix OperatorMatrix::dense(Mat m) {
    require(m.rows() == m.cols() && m.rows() >= 1, "dense operator must be square and nonempty");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::dense;
    impl->n = m.rows();
    impl->dense_given = std::move(m);
    impl->potency = detect_potency(impl->dense_given, impl->n);
    return OperatorMatrix(std::move(impl));
}

OperatorMatrix OperatorMatrix::identity(Index n) { return diagonal(Vec::Ones(n)); }

OperatorMatrix OperatorMatrix::zero(Index n) { return diagonal(Vec::Zero(n)); }

OperatorKind OperatorMatrix::kind() const { return impl_->kind; }
Index OperatorMatrix::size() const { return impl_->n; }

double OperatorMatrix::shift_weight() const {
    require(impl_->kind == OperatorKind::unit_circulant, "shift_weight: not a unit circulant");
    return impl_->f;
}

bool OperatorMatrix::transposed() const {
    return impl_->kind == OperatorKind::unit_circulant && impl_->up;
}

const Vec& OperatorMatrix::diagonal_entries() const {
    require(impl_->kind == OperatorKind::diagonal, "diagonal_entries: not a diagonal operator");
    return impl_->diag;
}

const std::optional<Potency>& OperatorMatrix::potency() const { return impl_->potency; }

const Mat& OperatorMatrix::to_dense() const {
    std::call_once(impl_->dense_once, [&] { impl_->dense_cache = impl_->materialize(); });
    return impl_->dense_cache;
}

Vec OperatorMatrix::apply(const Vec& x) const {
    require(x.size() == impl_->n, "operator apply: dimension mismatch");
    const Index n = impl_->n;
    switch (impl_->kind) {
        case OperatorKind::unit_circulant: {
            Vec y(n);
            if (!impl_->up) {
                // down-shift: y_i = x_(i-1), y_0 = f·x_(n-1)
                if (n == 1) {
                    y[0] = impl_->f * x[0];
                } else {
                    for (Index i = 1; i < n; ++i) y[i] = x[i - 1];
                    y[0] = impl_->f * x[n - 1];
                }
            } else {
                // up-shift: y_i = x_(i+1), y_(n-1) = f·x_0
                if (n == 1) {
                    y[0] = impl_->f * x[0];
                } else {
                    for (Index i = 0; i + 1 < n; ++i) y[i] = x[i + 1];
                    y[n - 1] = impl_->f * x[0];
                }
            }
            return y;
        }
        case OperatorKind::diagonal:
            return impl_->diag.cwiseProduct(x);
        case OperatorKind::dense:
            return impl_->dense_given * x;
    }
    return Vec();
}

Vec OperatorMatrix::apply_transpose(const Vec& x) const {
    require(x.size() == impl_->n, "operator apply_transpose: dimension mismatch");
    switch (impl_->kind) {
        case OperatorKind::unit_circulant: {
            // transpose of a down-shift is the matching up-shift and vice versa
            const Index n = impl_->n;
            Vec y(n);
            if (impl_->up) {
                if (n == 1) {
                    y[0] = impl_->f * x[0];
                } else {
                    for (Index i = 1; i < n; ++i) y[i] = x[i - 1];
                    y[0] = impl_->f * x[n - 1];
                }
            } else {
                if (n == 1) {
                    y[0] = impl_->f * x[0];
                } else {
                    for (Index i = 0; i + 1 < n; ++i) y[i] = x[i + 1];
                    y[n - 1] = impl_->f * x[0];
                }
            }
            return y;
        }
        case OperatorKind::diagonal:
            return impl_->diag.cwiseProduct(x);
        case OperatorKind::dense:
            return impl_->dense_given.transpose() * x;
    }
    return Vec();
}

void OperatorMatrix::apply_inplace(Vec& x, Vec& tmp) const {
    require(x.size() == impl_->n, "operator apply_inplace: dimension mismatch");
    const Index n = impl_->n;
    switch (impl_->kind) {
        case OperatorKind::unit_circulant:
            if (n == 1) {
                x[0] *= impl_->f;
            } else if (!impl_->up) {
                // down-shift: rotate right, weight the wrapped entry
                std::rotate(x.data(), x.data() + n - 1, x.data() + n);
                x[0] *= impl_->f;
            } else {
                std::rotate(x.data(), x.data() + 1, x.data() + n);
                x[n - 1] *= impl_->f;
            }
            return;
        case OperatorKind::diagonal:
            x.array() *= impl_->diag.array();
            return;
        case OperatorKind::dense:
            tmp.noalias() = impl_->dense_given * x;
            x.swap(tmp);
            return;
    }
}

void OperatorMatrix::apply_transpose_inplace(Vec& x, Vec& tmp) const {
    require(x.size() == impl_->n, "operator apply_transpose_inplace: dimension mismatch");
    const Index n = impl_->n;
    switch (impl_->kind) {
        case OperatorKind::unit_circulant:
            if (n == 1) {
                x[0] *= impl_->f;
            } else if (!impl_->up) {
                // transpose of a down-shift: rotate left
                std::rotate(x.data(), x.data() + 1, x.data() + n);
                x[n - 1] *= impl_->f;
            } else {
                std::rotate(x.data(), x.data() + n - 1, x.data() + n);
                x[0] *= impl_->f;
            }
            return;
        case OperatorKind::diagonal:
            x.array() *= impl_->diag.array();
            return;
        case OperatorKind::dense:
            tmp.noalias() = impl_->dense_given.transpose() * x;
            x.swap(tmp);
            return;
    }
}

const EigenDecomp* OperatorMatrix::eigen() const {
    std::call_once(impl_->eig_once, [&] {
        switch (impl_->kind) {
            case OperatorKind::unit_circulant:
                if (impl_->f != 0.0)
                    impl_->eig_cache = circulant_eigen(impl_->n, impl_->f, impl_->up);
                break;
            case OperatorKind::diagonal: {
                EigenDecomp dec;
                dec.Q = CMat::Identity(impl_->n, impl_->n);
                dec.Q_inv = CMat::Identity(impl_->n, impl_->n);
                dec.lambda = impl_->diag.cast<Complex>();
                impl_->eig_cache = std::move(dec);
                break;
            }
            case OperatorKind::dense:
                impl_->eig_cache = dense_eigen(impl_->dense_given);
                break;
        }
    });
    return impl_->eig_cache.has_value() ? &*impl_->eig_cache : nullptr;
}

double OperatorMatrix::norm_max() const { return max_abs(to_dense()); }

std::string OperatorMatrix::describe() const {
    std::ostringstream os;
    switch (impl_->kind) {
        case OperatorKind::unit_circulant:
            os << "Z_" << impl_->f << (impl_->up ? "^T" : "") << "(n=" << impl_->n << ")";
            break;
        case OperatorKind::diagonal:
            os << "diag(n=" << impl_->n << ")";
            break;
        case OperatorKind::dense:
            os << "dense(n=" << impl_->n << ")";
            break;
    }
    return os.str();
}

std::optional<Potency> check_potency(const OperatorMatrix& a, Index q_max) {
    require(q_max >= 1 && q_max <= a.size(), "check_potency: require 1 <= q_max <= n");
    return detect_potency(a.to_dense(), q_max);
}

EigenDecomp eigendecompose(const OperatorMatrix& a) {
    const EigenDecomp* dec = a.eigen();
    if (dec == nullptr)
        throw ValidationError("eigendecompose: " + a.describe() +
                              " has no eigendecomposition within tolerance (not diagonalizable)");
    return *dec;
}

OperatorPair::OperatorPair(OperatorMatrix a, OperatorMatrix b) : a_(std::move(a)), b_(std::move(b)) {
    require(a_.size() == b_.size(), "OperatorPair: operator dimensions differ");
    const Index n = a_.size();

    const auto& pot = a_.potency();
    if (!pot.has_value()) {
        limitation_ = "A (" + a_.describe() + ") is not a-potent";
        return;
    }

    DecompressionData data;
    data.potency = *pot;

    const bool b_nilpotent_shift = b_.kind() == OperatorKind::unit_circulant &&
                                   b_.shift_weight() == 0.0 && pot->q >= n;
    if (b_nilpotent_shift) {
        // B^q = 0, so I - a·B^q = I exactly.
        data.t = Mat::Identity(n, n);
        data.t_identity = true;
        data.cond = 1.0;
    } else {
        Mat bq = Mat::Identity(n, n);
        const Mat& bd = b_.to_dense();
        for (Index k = 0; k < pot->q; ++k) bq = bq * bd;
        Mat m0 = Mat::Identity(n, n) - pot->a * bq;
        if (!m0.allFinite()) {
            limitation_ = "I - a·B^q is not finite";
            return;
        }
        Eigen::JacobiSVD<Mat> svd(m0);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(n - 1);
        if (smin <= 0.0 || smax / smin > tol::cond_max) {
            std::ostringstream os;
            os << "I - a·B^q is singular or ill-conditioned (cond="
               << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
            limitation_ = os.str();
            return;
        }
        data.cond = smax / smin;
        data.t = Eigen::PartialPivLU<Mat>(m0).solve(Mat::Identity(n, n));
    }
    decompression_ = std::move(data);

    // Column-embedding readiness: diagonalizable A and B, nonsingular B,
    // pairwise-distinct eigenvalue magnitudes of B.
    if (a_.eigen() == nullptr) {
        limitation_ = "A (" + a_.describe() + ") is not diagonalizable";
        return;
    }
    const EigenDecomp* eb = b_.eigen();
    if (eb == nullptr) {
        limitation_ = "B (" + b_.describe() + ") is not diagonalizable";
        return;
    }
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(eb->lambda[i]);
    std::sort(mags.begin(), mags.end());
    if (mags.front() < tol::sep_min) {
        limitation_ = "B is singular or nearly so (min |eigenvalue| below separation floor)";
        return;
    }
    for (std::size_t i = 0; i + 1 < mags.size(); ++i) {
        if (mags[i + 1] - mags[i] < tol::sep_min) {
            limitation_ = "eigenvalues of B do not have distinguishable absolute values";
            return;
        }
    }
    embedding_ready_ = true;
}

OperatorPair OperatorPair::checked(OperatorMatrix a, OperatorMatrix b) {
    OperatorPair pair(std::move(a), std::move(b));
    if (!pair.decompression_ready())
        throw ValidationError("OperatorPair rejected: " + pair.limitation());
    return pair;
}

const Potency& OperatorPair::potency() const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    return decompression_->potency;
}

double OperatorPair::solve_cond() const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    return decompression_->cond;
}

bool OperatorPair::t_is_identity() const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    return decompression_->t_identity;
}

Vec OperatorPair::apply_T(const Vec& x) const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    if (decompression_->t_identity) return x;
    return decompression_->t * x;
}

Vec OperatorPair::apply_T_transpose(const Vec& x) const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    if (decompression_->t_identity) return x;
    return decompression_->t.transpose() * x;
}

const Mat& OperatorPair::T() const {
    require(decompression_.has_value(), "OperatorPair: no decompression data (" + limitation_ + ")");
    return decompression_->t;
}

}  // namespace ldr

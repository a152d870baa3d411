#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace ldr {

using Index = Eigen::Index;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Raised for malformed inputs: dimension mismatches, bad configs,
/// operator pairs that do not satisfy a required precondition.
/// CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a computed result violates a contract the module promises
/// to certify (reconstruction certificates, rank bounds, stale caches).
/// CLI exit code 2.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for file problems: unreadable paths, malformed or truncated files.
/// CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {
// Residual tolerance for potency checks, relative to ‖A^q‖_max.
inline constexpr double potency = 1e-10;
// Residual tolerance for eigendecompositions, relative to ‖A‖_max.
inline constexpr double eig = 1e-10;
// Minimum pairwise separation of eigenvalue magnitudes for a pair
// to qualify for the column-embedding construction.
inline constexpr double sep_min = 1e-8;
// Pairs whose (I - a·B^q) solve is worse conditioned than this are
// rejected for decompression work.
inline constexpr double cond_max = 1e12;
// Singular values below rank_rel·σ_max do not count toward numerical rank.
inline constexpr double rank_rel = 1e-8;
// Diagonal entries of the selector matrix must clear this floor,
// relative to the largest entry.
inline constexpr double nonsing_floor = 1e-8;
// Column-embedding certificate: reconstructed column vs. target.
inline constexpr double certificate = 1e-8;
// Imaginary residue allowed when projecting complex intermediates
// back to real vectors.
inline constexpr double imag_residue = 1e-9;
}  // namespace tol

/// Largest-magnitude entry. Residual checks throughout the library are
/// stated against this norm.
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
inline double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const CVec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

}  // namespace ldr

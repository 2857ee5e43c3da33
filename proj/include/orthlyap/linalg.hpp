#pragma once

// Small dense linear-algebra helpers shared by the Schur/Sylvester/Riccati
// layers: the symmetric eigensolver wrapper and a couple of residual and
// conditioning utilities.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "orthlyap/error.hpp"

namespace orthlyap {

struct SymmetricEig {
    Eigen::MatrixXd Q;       // orthogonal
    Eigen::VectorXd lambda;  // ascending
};

// Eigendecomposition S = Q diag(lambda) Q^T of a (numerically) symmetric
// matrix; the input is symmetrised first.
inline SymmetricEig symmetric_eig(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols()) throw DimensionMismatch("symmetric_eig needs a square matrix");
    const double scale = S.cwiseAbs().maxCoeff();
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
        throw DimensionMismatch("matrix is not symmetric within tolerance");
    const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NoConvergence("symmetric eigensolver failed to converge");
    return {solver.eigenvectors(), solver.eigenvalues()};
}

inline double condition_estimate(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

inline double frobenius(const Eigen::MatrixXd& A) { return A.norm(); }

// Sorted-by-(real, imag) copy, for comparing spectra as multisets.
inline std::vector<std::complex<double>> sorted_spectrum(std::vector<std::complex<double>> s) {
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return s;
}

}  // namespace orthlyap

#pragma once

// Bartels-Stewart solver for the special Sylvester equation
//     X F^T + F X = 2 I.
// F is Schur-transformed, the resulting quasi-triangular system is solved by
// back-substitution over block columns, and the solution is transformed back.
// The equation is uniquely solvable iff no two eigenvalues of F sum to zero;
// the unique solution is symmetric and invertible.

#include <vector>

#include <Eigen/Dense>

#include "orthlyap/error.hpp"
#include "orthlyap/schur.hpp"

namespace orthlyap {

struct SylvesterSolution {
    Eigen::MatrixXd X;
    double residual;  // ||X F^T + F X - 2I||_F
};

inline SylvesterSolution solve_sylvester_special(const Eigen::MatrixXd& F, double tol = 1e-8) {
    if (F.rows() != F.cols()) throw DimensionMismatch("solve_sylvester_special needs a square matrix");
    const int n = static_cast<int>(F.rows());
    const RealSchur s = real_schur(F);

    const auto eigs = s.eigenvalues();
    const double gap_tol = tol * std::max(1.0, frobenius(F));
    for (std::size_t i = 0; i < eigs.size(); ++i)
        for (std::size_t j = i; j < eigs.size(); ++j)
            if (std::abs(eigs[i] + eigs[j]) <= gap_tol)
                throw SingularSylvester(
                    "eigenvalue pair sums to zero within tolerance; the Sylvester equation "
                    "X F^T + F X = 2I has no unique solution");

    // R Y + Y R^T = 2 I with Y = U^T X U
    const Eigen::MatrixXd& R = s.R;
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd C = 2.0 * Eigen::MatrixXd::Identity(n, n);
    const auto& blocks = s.blocks;
    const int nb = static_cast<int>(blocks.size());

    for (int J = nb - 1; J >= 0; --J) {
        const int j0 = blocks[static_cast<std::size_t>(J)].start;
        const int q = blocks[static_cast<std::size_t>(J)].size;
        for (int I = nb - 1; I >= 0; --I) {
            const int i0 = blocks[static_cast<std::size_t>(I)].start;
            const int p = blocks[static_cast<std::size_t>(I)].size;

            Eigen::MatrixXd rhs = C.block(i0, j0, p, q);
            // couplings to already-solved blocks below and to the right
            for (int K = I + 1; K < nb; ++K) {
                const int k0 = blocks[static_cast<std::size_t>(K)].start;
                const int r = blocks[static_cast<std::size_t>(K)].size;
                rhs -= R.block(i0, k0, p, r) * Y.block(k0, j0, r, q);
            }
            for (int L = J + 1; L < nb; ++L) {
                const int l0 = blocks[static_cast<std::size_t>(L)].start;
                const int r = blocks[static_cast<std::size_t>(L)].size;
                rhs -= Y.block(i0, l0, p, r) * R.block(j0, l0, q, r).transpose();
            }

            // small system  R_II W + W R_JJ^T = rhs  via Kronecker form
            const Eigen::MatrixXd M = R.block(i0, i0, p, p);
            const Eigen::MatrixXd N = R.block(j0, j0, q, q);
            Eigen::MatrixXd K(p * q, p * q);
            for (int col = 0; col < q; ++col)
                for (int row = 0; row < p; ++row) {
                    const int rr = col * p + row;
                    for (int col2 = 0; col2 < q; ++col2)
                        for (int row2 = 0; row2 < p; ++row2) {
                            const int cc = col2 * p + row2;
                            double v = 0.0;
                            if (col == col2) v += M(row, row2);
                            if (row == row2) v += N(col, col2);
                            K(rr, cc) = v;
                        }
                }
            Eigen::VectorXd vec_rhs(p * q);
            for (int col = 0; col < q; ++col)
                for (int row = 0; row < p; ++row) vec_rhs(col * p + row) = rhs(row, col);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
            if (lu.rank() < p * q)
                throw SingularSylvester("quasi-triangular diagonal system is singular");
            const Eigen::VectorXd w = lu.solve(vec_rhs);
            for (int col = 0; col < q; ++col)
                for (int row = 0; row < p; ++row) Y(i0 + row, j0 + col) = w(col * p + row);
        }
    }

    Eigen::MatrixXd X = s.U * Y * s.U.transpose();
    X = 0.5 * (X + X.transpose());  // the unique solution is symmetric
    const double residual = (X * F.transpose() + F * X -
                             2.0 * Eigen::MatrixXd::Identity(n, n)).norm();
    return {std::move(X), residual};
}

}  // namespace orthlyap

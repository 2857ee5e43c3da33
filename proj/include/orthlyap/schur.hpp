#pragma once

// Real Schur decomposition F = U R U^T with R upper quasi-triangular, plus
// reordering of the diagonal blocks by orthogonal swaps of adjacent blocks.
// The factorisation itself delegates to Eigen; the block swaps are done here
// with the direct method: solve the small Sylvester system that couples the
// two blocks, then orthogonalise the resulting invariant-subspace basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "orthlyap/error.hpp"
#include "orthlyap/linalg.hpp"

namespace orthlyap {

struct SchurBlock {
    int start;  // row/col index in R
    int size;   // 1 or 2
    std::complex<double> eig1, eig2;  // eig2 only meaningful for size 2
};

struct RealSchur {
    Eigen::MatrixXd U;  // orthogonal
    Eigen::MatrixXd R;  // upper quasi-triangular
    std::vector<SchurBlock> blocks;

    std::vector<std::complex<double>> eigenvalues() const {
        std::vector<std::complex<double>> out;
        for (const auto& b : blocks) {
            out.push_back(b.eig1);
            if (b.size == 2) out.push_back(b.eig2);
        }
        return out;
    }
};

namespace detail {

inline std::pair<std::complex<double>, std::complex<double>> eig2x2(double a, double b,
                                                                    double c, double d) {
    const double tr = a + d;
    const double disc = (a - d) * (a - d) + 4.0 * b * c;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return {std::complex<double>(0.5 * (tr + root), 0.0),
                std::complex<double>(0.5 * (tr - root), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

// If a 2x2 diagonal block turns out to have real eigenvalues, split it into
// two 1x1 blocks with a rotation built from an eigenvector.
inline void split_real_2x2(Eigen::MatrixXd& R, Eigen::MatrixXd& U, int k) {
    const double a = R(k, k), b = R(k, k + 1), c = R(k + 1, k), d = R(k + 1, k + 1);
    if (c == 0.0) return;
    const double disc = (a - d) * (a - d) + 4.0 * b * c;
    if (disc < 0.0) return;  // genuinely complex pair, leave as a block
    const double lambda = 0.5 * (a + d) + (a >= d ? 0.5 : -0.5) * std::sqrt(disc);
    // eigenvector of [[a,b],[c,d]] for lambda
    double vx = lambda - d, vy = c;
    const double nrm = std::hypot(vx, vy);
    if (nrm == 0.0) return;
    vx /= nrm;
    vy /= nrm;
    Eigen::Matrix2d G;
    G << vx, -vy, vy, vx;
    R.middleCols<2>(k) = R.middleCols<2>(k) * G;
    R.middleRows<2>(k) = G.transpose() * R.middleRows<2>(k);
    U.middleCols<2>(k) = U.middleCols<2>(k) * G;
    R(k + 1, k) = 0.0;
}

inline std::vector<SchurBlock> scan_blocks(const Eigen::MatrixXd& R) {
    const int n = static_cast<int>(R.rows());
    std::vector<SchurBlock> blocks;
    int k = 0;
    while (k < n) {
        if (k + 1 < n && R(k + 1, k) != 0.0) {
            auto [e1, e2] = eig2x2(R(k, k), R(k, k + 1), R(k + 1, k), R(k + 1, k + 1));
            blocks.push_back({k, 2, e1, e2});
            k += 2;
        } else {
            blocks.push_back({k, 1, {R(k, k), 0.0}, {0.0, 0.0}});
            k += 1;
        }
    }
    return blocks;
}

// Swap the adjacent diagonal blocks starting at `i` with sizes p (upper) and
// q (lower). Solves A11 X - X A22 = A12 so that [-X; I] spans the invariant
// subspace of the lower block, then orthogonalises it with a QR factorisation
// and applies the similarity to R and U.
inline void swap_adjacent_blocks(Eigen::MatrixXd& R, Eigen::MatrixXd& U, int i, int p, int q) {
    const int m = p + q;
    const Eigen::MatrixXd A11 = R.block(i, i, p, p);
    const Eigen::MatrixXd A22 = R.block(i + p, i + p, q, q);
    const Eigen::MatrixXd A12 = R.block(i, i + p, p, q);

    // Kronecker form of A11 X - X A22 = A12
    Eigen::MatrixXd K(p * q, p * q);
    for (int col = 0; col < q; ++col)
        for (int row = 0; row < p; ++row) {
            const int r = col * p + row;
            for (int col2 = 0; col2 < q; ++col2)
                for (int row2 = 0; row2 < p; ++row2) {
                    const int c = col2 * p + row2;
                    double v = 0.0;
                    if (col == col2) v += A11(row, row2);
                    if (row == row2) v -= A22(col2, col);
                    K(r, c) = v;
                }
        }
    Eigen::VectorXd rhs(p * q);
    for (int col = 0; col < q; ++col)
        for (int row = 0; row < p; ++row) rhs(col * p + row) = A12(row, col);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < p * q)
        throw SwapIllConditioned(
            "adjacent Schur blocks have coinciding spectra; they cannot be swapped");
    const Eigen::VectorXd xv = lu.solve(rhs);

    Eigen::MatrixXd M(m, q);
    for (int col = 0; col < q; ++col) {
        for (int row = 0; row < p; ++row) M(row, col) = -xv(col * p + row);
        for (int row = 0; row < q; ++row) M(p + row, col) = (row == col) ? 1.0 : 0.0;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    const Eigen::MatrixXd Q = qr.householderQ();

    // dry-run on the window: the block we are about to zero must actually be
    // negligible, otherwise the swap would silently perturb the spectrum
    // (weakly separated 2x2 blocks)
    {
        const Eigen::MatrixXd W = R.block(i, i, m, m);
        const Eigen::MatrixXd Wp = Q.transpose() * W * Q;
        if (Wp.bottomLeftCorner(p, q).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, W.norm()))
            throw SwapIllConditioned(
                "adjacent Schur blocks are too weakly separated to swap accurately");
    }

    R.middleCols(i, m) = R.middleCols(i, m) * Q;
    R.middleRows(i, m) = Q.transpose() * R.middleRows(i, m);
    U.middleCols(i, m) = U.middleCols(i, m) * Q;

    // exact zeros in the decoupled (2,1) window block
    for (int r = q; r < m; ++r)
        for (int c = 0; c < q; ++c) R(i + r, i + c) = 0.0;
}

}  // namespace detail

inline RealSchur real_schur(const Eigen::MatrixXd& F) {
    if (F.rows() != F.cols()) throw DimensionMismatch("real_schur needs a square matrix");
    if (!F.allFinite()) throw Error("real_schur input has non-finite entries");
    const int n = static_cast<int>(F.rows());
    Eigen::RealSchur<Eigen::MatrixXd> solver(n);
    solver.setMaxIterations(100 * n);
    solver.compute(F);
    if (solver.info() != Eigen::Success)
        throw NoConvergence("QR iteration did not converge within 100*n sweeps");
    RealSchur out;
    out.U = solver.matrixU();
    out.R = solver.matrixT();
    // enforce the canonical structure: zero out sub-quasi-diagonal noise and
    // split any 2x2 diagonal block with real eigenvalues
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < r - 1; ++c) out.R(r, c) = 0.0;
    for (int k = 0; k + 1 < n; ++k)
        if (out.R(k + 1, k) != 0.0) detail::split_real_2x2(out.R, out.U, k);
    out.blocks = detail::scan_blocks(out.R);
    return out;
}

// Reorder the Schur form so that every eigenvalue in `target` ends up in the
// trailing principal block. `target` must consist of whole conjugate block
// spectra, matched within tol * max(1, ||R||_F).
inline RealSchur reorder_schur(const RealSchur& s,
                               const std::vector<std::complex<double>>& target,
                               double tol = 1e-8) {
    RealSchur out = s;
    const double match_tol = tol * std::max(1.0, frobenius(s.R));

    // Mark each block selected iff all its eigenvalues match unused target
    // entries. Matching runs bottom-up so that among blocks with equal
    // spectra the lowest is taken; selected blocks then never have to swap
    // past an equal twin (such swaps are ill conditioned and unnecessary).
    std::vector<bool> used(target.size(), false);
    auto take = [&](const std::complex<double>& lambda) -> bool {
        for (std::size_t t = 0; t < target.size(); ++t)
            if (!used[t] && std::abs(target[t] - lambda) <= match_tol) {
                used[t] = true;
                return true;
            }
        return false;
    };
    std::vector<bool> selected(out.blocks.size(), false);
    for (std::size_t k = out.blocks.size(); k-- > 0;) {
        const auto& b = out.blocks[k];
        const bool got1 = take(b.eig1);
        if (b.size == 1) {
            selected[k] = got1;
            continue;
        }
        const bool got2 = take(b.eig2);
        if (got1 != got2)
            throw TargetNotBlockClosed("target set splits a 2x2 conjugate block");
        selected[k] = got1;
    }
    for (bool u : used)
        if (!u)
            throw TargetNotBlockClosed(
                "target contains an eigenvalue not present in the Schur spectrum");

    // bubble selected blocks to the bottom with adjacent swaps
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t k = 0; k + 1 < out.blocks.size(); ++k) {
            if (selected[k] && !selected[k + 1]) {
                const int i = out.blocks[k].start;
                const int p = out.blocks[k].size;
                const int q = out.blocks[k + 1].size;
                detail::swap_adjacent_blocks(out.R, out.U, i, p, q);
                // block list after the swap: sizes exchange, starts shift
                std::swap(out.blocks[k], out.blocks[k + 1]);
                out.blocks[k].start = i;
                out.blocks[k + 1].start = i + out.blocks[k].size;
                const bool tmp = selected[k];
                selected[k] = selected[k + 1];
                selected[k + 1] = tmp;
                moved = true;
            }
        }
    }
    // roundoff during the swaps can leave a 2x2 block with real eigenvalues;
    // restore the canonical form, then rescan
    const int n = static_cast<int>(out.R.rows());
    for (int k = 0; k + 1 < n; ++k)
        if (out.R(k + 1, k) != 0.0) detail::split_real_2x2(out.R, out.U, k);
    out.blocks = detail::scan_blocks(out.R);
    return out;
}

}  // namespace orthlyap

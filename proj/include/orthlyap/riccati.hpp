#pragma once

// The quadratic matrix equation G F + F^T G = 2 G^2 with the trace constraint
// tr G = tr F. Its symmetric trace-matching solution splits the linear field
// Fx into the gradient part Gx and the divergence-free part (F - G)x.
//
//  - construct_G: constructive solver. Partition the spectrum so no two
//    retained eigenvalues sum to zero, reorder the real Schur form so the
//    retained set occupies the trailing block, solve X R22^T + R22 X = 2I
//    there and embed G = U diag(0, X^{-1}) U^T.
//  - enumerate_care_solutions: full enumeration over Jordan-chain prefix
//    selections of T = [[-F, 2I], [0, F^T]], every solution being Z Y^{-1}.
//  - trace_identity_check: tr(-F + 2G) equals the sum of the selected
//    eigenvalues of T for every enumerated solution.

#include <algorithm>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orthlyap/error.hpp"
#include "orthlyap/linalg.hpp"
#include "orthlyap/schur.hpp"
#include "orthlyap/sylvester.hpp"

namespace orthlyap {

struct SpectrumPartition {
    std::vector<std::complex<double>> sigma1;  // no pair (i <= j) sums to ~0
    std::vector<std::complex<double>> sigma2;  // sums to ~0
    double tolerance;
};

// Greedy zero-sum elimination. Pairs (i < j) with lambda_i + lambda_j ~ 0
// move together; the diagonal case i = j (lambda ~ 0) moves the single
// eigenvalue, which keeps both the multiset union and the zero-sum property.
inline SpectrumPartition partition_spectrum(std::vector<std::complex<double>> eigs,
                                            double tol) {
    SpectrumPartition part;
    part.tolerance = tol;
    part.sigma1 = std::move(eigs);
    bool removed = true;
    while (removed) {
        removed = false;
        const std::size_t m = part.sigma1.size();
        for (std::size_t i = 0; i < m && !removed; ++i) {
            for (std::size_t j = i; j < m && !removed; ++j) {
                if (std::abs(part.sigma1[i] + part.sigma1[j]) <= tol) {
                    part.sigma2.push_back(part.sigma1[i]);
                    if (j != i) part.sigma2.push_back(part.sigma1[j]);
                    part.sigma1.erase(part.sigma1.begin() + static_cast<std::ptrdiff_t>(j));
                    if (j != i)
                        part.sigma1.erase(part.sigma1.begin() + static_cast<std::ptrdiff_t>(i));
                    removed = true;
                }
            }
        }
    }
    return part;
}

enum class SareProvenance { SylvesterDirect, SchurPartition, Enumerated };

inline const char* to_string(SareProvenance p) {
    switch (p) {
        case SareProvenance::SylvesterDirect: return "sylvester-direct";
        case SareProvenance::SchurPartition: return "schur-partition";
        case SareProvenance::Enumerated: return "enumerated";
    }
    return "?";
}

struct SareSolution {
    Eigen::MatrixXd G;
    double residual;   // ||G F + F^T G - 2 G^2||_F
    double trace_gap;  // |tr G - tr F|
    SareProvenance provenance;
    bool symmetric;
    // eigenvalues of T backing the solution; populated by the enumerator
    std::vector<std::complex<double>> selected_eigenvalues;
    std::vector<std::string> warnings;
};

namespace detail {

inline double sare_residual(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
    return (G * F + F.transpose() * G - 2.0 * G * G).norm();
}

}  // namespace detail

inline SareSolution construct_G(const Eigen::MatrixXd& F, double tol = 1e-8) {
    if (F.rows() != F.cols()) throw DimensionMismatch("construct_G needs a square matrix");
    const int n = static_cast<int>(F.rows());
    const double abs_tol = tol * std::max(1.0, frobenius(F));

    const RealSchur s = real_schur(F);
    const SpectrumPartition part = partition_spectrum(s.eigenvalues(), abs_tol);

    SareSolution sol;
    sol.provenance = part.sigma2.empty() ? SareProvenance::SylvesterDirect
                                         : SareProvenance::SchurPartition;
    if (part.sigma1.empty()) {
        sol.G = Eigen::MatrixXd::Zero(n, n);
        sol.warnings.push_back(
            "every eigenvalue participates in a zero-sum pair; G = 0 and V = 0 is "
            "uninformative for this matrix");
    } else {
        const RealSchur reordered =
            part.sigma2.empty() ? s : reorder_schur(s, part.sigma1, tol);
        const int m = static_cast<int>(part.sigma1.size());
        const Eigen::MatrixXd R22 = reordered.R.bottomRightCorner(m, m);
        const SylvesterSolution syl = solve_sylvester_special(R22, tol);
        const double cond = condition_estimate(syl.X);
        if (cond > 1e12)
            throw IllConditionedInverse("Sylvester solution is too ill conditioned to invert",
                                        cond);
        const Eigen::MatrixXd G2 = syl.X.partialPivLu().inverse();
        Eigen::MatrixXd Gfull = Eigen::MatrixXd::Zero(n, n);
        Gfull.bottomRightCorner(m, m) = G2;
        sol.G = reordered.U * Gfull * reordered.U.transpose();
        sol.G = 0.5 * (sol.G + sol.G.transpose());
    }
    sol.residual = detail::sare_residual(F, sol.G);
    sol.trace_gap = std::abs(sol.G.trace() - F.trace());
    sol.symmetric = true;
    return sol;
}

// ---- enumeration over Jordan-chain selections ----

struct JordanChain {
    std::complex<double> eigenvalue;
    std::vector<int> columns;  // column indices into P, chain order
};

struct JordanData {
    Eigen::MatrixXcd P;  // 2n x 2n, columns hold the chain vectors
    std::vector<JordanChain> chains;
};

namespace detail {

inline void validate_jordan(const Eigen::MatrixXcd& T, const JordanData& jd, double tol) {
    const auto m = T.rows();
    if (jd.P.rows() != m || jd.P.cols() != m)
        throw Error("Jordan transformation matrix must be " + std::to_string(m) + "x" +
                    std::to_string(m));
    const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(jd.P);
    if (lu.rank() < m) throw Error("Jordan transformation matrix is singular");
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (const auto& chain : jd.chains) {
        if (chain.columns.empty()) throw Error("empty Jordan chain");
        Eigen::VectorXcd prev;
        for (std::size_t k = 0; k < chain.columns.size(); ++k) {
            const int c = chain.columns[k];
            if (c < 0 || c >= m) throw Error("Jordan chain column index out of range");
            if (seen[static_cast<std::size_t>(c)])
                throw Error("Jordan chain column used twice");
            seen[static_cast<std::size_t>(c)] = true;
            const Eigen::VectorXcd eta = jd.P.col(c);
            Eigen::VectorXcd expect = chain.eigenvalue * eta;
            if (k > 0) expect += prev;
            if ((T * eta - expect).cwiseAbs().maxCoeff() > tol * scale)
                throw Error("Jordan chain relation T eta_i = lambda eta_i + eta_{i-1} "
                            "fails for the supplied data");
            prev = eta;
        }
    }
}

// Auto Jordan data for a semisimple T: every eigenvector is a length-1 chain.
// Complex pairs are made exactly conjugate so conjugate-closed selections
// yield real solutions.
inline JordanData auto_jordan(const Eigen::MatrixXd& T, double tol) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) throw NoConvergence("eigensolver failed on T");
    Eigen::MatrixXcd V = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    const auto m = T.rows();

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
    const double smin = svd.singularValues()(m - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 1e-8 * smax)
        throw JordanRequired(
            "T has a (numerically) defective eigenvalue; supply explicit Jordan data");

    const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
    std::vector<bool> paired(static_cast<std::size_t>(m), false);
    for (int j = 0; j < m; ++j) {
        if (paired[static_cast<std::size_t>(j)] || std::abs(lam(j).imag()) <= tol * scale)
            continue;
        for (int k = j + 1; k < m; ++k) {
            if (paired[static_cast<std::size_t>(k)]) continue;
            if (std::abs(lam(k) - std::conj(lam(j))) <= 1e-6 * scale) {
                lam(k) = std::conj(lam(j));
                V.col(k) = V.col(j).conjugate();
                paired[static_cast<std::size_t>(j)] = true;
                paired[static_cast<std::size_t>(k)] = true;
                break;
            }
        }
    }

    JordanData jd;
    jd.P = std::move(V);
    for (int j = 0; j < m; ++j) jd.chains.push_back({lam(j), {j}});
    return jd;
}

inline bool conjugate_closed(const std::vector<std::complex<double>>& lambdas, double tol) {
    std::vector<std::complex<double>> pool;
    for (const auto& l : lambdas)
        if (l.imag() > tol) pool.push_back(l);
    for (const auto& l : lambdas) {
        if (l.imag() < -tol) {
            bool found = false;
            for (auto& p : pool)
                if (std::abs(std::conj(p) - l) <= 2 * tol) {
                    p = std::complex<double>(0, std::numeric_limits<double>::quiet_NaN());
                    found = true;
                    break;
                }
            if (!found) return false;
        }
    }
    for (const auto& p : pool)
        if (!std::isnan(p.imag())) return false;
    return true;
}

}  // namespace detail

inline std::vector<SareSolution> enumerate_care_solutions(
    const Eigen::MatrixXd& F, const std::optional<JordanData>& jordan = std::nullopt,
    int max_dim = 4, double tol = 1e-8) {
    if (F.rows() != F.cols()) throw DimensionMismatch("enumerate needs a square matrix");
    const int n = static_cast<int>(F.rows());
    if (n > max_dim)
        throw TooLarge("enumeration is limited to dimension " + std::to_string(max_dim) +
                       "; got " + std::to_string(n));

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    T.topLeftCorner(n, n) = -F;
    T.topRightCorner(n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
    T.bottomRightCorner(n, n) = F.transpose();

    JordanData jd = jordan ? *jordan : detail::auto_jordan(T, tol);
    if (jordan) detail::validate_jordan(T.cast<std::complex<double>>(), jd, 1e-8);

    const double scale_f = std::max(1.0, frobenius(F));
    const double eig_tol = tol * std::max(1.0, T.cwiseAbs().maxCoeff());

    std::vector<SareSolution> out;
    const std::size_t nchains = jd.chains.size();
    std::vector<int> take(nchains, 0);

    const std::function<void(std::size_t, int)> recurse = [&](std::size_t c, int remaining) {
        if (remaining == 0) {
            // assemble the selection
            std::vector<int> cols;
            std::vector<std::complex<double>> lambdas;
            for (std::size_t i = 0; i < nchains; ++i)
                for (int k = 0; k < take[i]; ++k) {
                    cols.push_back(jd.chains[i].columns[static_cast<std::size_t>(k)]);
                    lambdas.push_back(jd.chains[i].eigenvalue);
                }
            if (!detail::conjugate_closed(lambdas, eig_tol)) return;

            Eigen::MatrixXcd Y(n, n), Z(n, n);
            for (int j = 0; j < n; ++j) {
                Y.col(j) = jd.P.col(cols[static_cast<std::size_t>(j)]).head(n);
                Z.col(j) = jd.P.col(cols[static_cast<std::size_t>(j)]).tail(n);
            }
            Eigen::FullPivLU<Eigen::MatrixXcd> lu(Y);
            if (lu.rank() < n) return;  // the top halves must form a basis
            const Eigen::MatrixXcd Xc = Z * lu.inverse();
            const double imax = Xc.imag().cwiseAbs().maxCoeff();
            if (imax > 1e-8 * (1.0 + Xc.real().cwiseAbs().maxCoeff())) return;
            Eigen::MatrixXd X = Xc.real();

            if (detail::sare_residual(F, X) > 1e-8 * scale_f * scale_f) return;

            for (const auto& prev : out)
                if ((prev.G - X).cwiseAbs().maxCoeff() <= 1e-8) return;  // duplicate

            SareSolution sol;
            sol.G = std::move(X);
            sol.residual = detail::sare_residual(F, sol.G);
            sol.trace_gap = std::abs(sol.G.trace() - F.trace());
            sol.provenance = SareProvenance::Enumerated;
            sol.symmetric = (sol.G - sol.G.transpose()).cwiseAbs().maxCoeff() <=
                            1e-10 * std::max(1.0, sol.G.cwiseAbs().maxCoeff());
            sol.selected_eigenvalues = std::move(lambdas);
            out.push_back(std::move(sol));
            return;
        }
        if (c >= nchains) return;
        const int len = static_cast<int>(jd.chains[c].columns.size());
        for (int k = std::min(len, remaining); k >= 0; --k) {
            take[c] = k;
            recurse(c + 1, remaining - k);
        }
        take[c] = 0;
    };
    recurse(0, n);

    std::sort(out.begin(), out.end(), [](const SareSolution& a, const SareSolution& b) {
        for (int i = 0; i < a.G.rows(); ++i)
            for (int j = 0; j < a.G.cols(); ++j)
                if (a.G(i, j) != b.G(i, j)) return a.G(i, j) < b.G(i, j);
        return false;
    });
    return out;
}

struct TraceIdentityReport {
    double lhs;           // tr(-F + 2G)
    double eig_sum_real;  // Re sum of selected eigenvalues
    double eig_sum_imag;  // should vanish for real solutions
    double gap;
    bool pass;
};

inline TraceIdentityReport trace_identity_check(const Eigen::MatrixXd& F,
                                                const SareSolution& sol) {
    TraceIdentityReport rep;
    rep.lhs = (-F + 2.0 * sol.G).trace();
    std::complex<double> sum{0.0, 0.0};
    for (const auto& l : sol.selected_eigenvalues) sum += l;
    rep.eig_sum_real = sum.real();
    rep.eig_sum_imag = sum.imag();
    rep.gap = std::abs(rep.lhs - rep.eig_sum_real) + std::abs(rep.eig_sum_imag);
    rep.pass = rep.gap <= 1e-8 * std::max(1.0, frobenius(F));
    return rep;
}

}  // namespace orthlyap

#pragma once

// Construction of orthogonal decompositions f = g + h (g curl-free, h
// divergence-free, <g,h> = 0 pointwise) from ansatz data, and verification
// of user-conjectured splits on a grid.
//
// 2D: given theta(x1,x2) and profiles alpha(t), beta(t),
//       g = beta(theta) grad theta,   h = alpha(theta) (-theta_x2, theta_x1).
// nD: given theta(x1..xn), beta(t) and profiles alpha_ij(t) for i<j,
//       g_k = beta'(theta) theta_xk,
//       h_k = sum_{j>k} alpha_kj'(theta) theta_xj - sum_{i<k} alpha_ik'(theta) theta_xi.
// The constructions make the three conditions identities, so the certificate
// doubles as a regression test of the symbolic differentiation pipeline.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "orthlyap/calculus.hpp"
#include "orthlyap/error.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/grid.hpp"

namespace orthlyap {

struct Ansatz2D {
    Expr theta;  // over x1, x2
    Expr alpha;  // over t
    Expr beta;   // over t
};

struct AnsatzND {
    int n = 0;
    Expr theta;  // over x1..xn
    Expr beta;   // over t
    std::map<std::pair<int, int>, Expr> alpha;  // 1 <= i < j <= n; absent pairs are 0
};

struct DecompositionCertificate {
    double sum_residual = 0;   // max over grid of |f - (g + h)| (component-wise)
    double curl_residual = 0;  // max |curl(g)| entry
    double div_residual = 0;   // max |div h|
    double orth_residual = 0;  // max |<g,h>| / (1 + |g| |h|)
    bool sum_ok = false, curl_ok = false, div_ok = false, orth_ok = false;
    bool certified = false;
    double tolerance = 0;
    Backend backend = Backend::Symbolic;
    GridSpec grid;
};

struct Decomposition {
    VectorFieldDef g, h, f;
    DecompositionCertificate certificate;
};

inline DecompositionCertificate verify_decomposition(const VectorFieldDef& f,
                                                     const VectorFieldDef& g,
                                                     const VectorFieldDef& h,
                                                     const GridSpec& grid,
                                                     double tol = 1e-9,
                                                     Backend backend = Backend::Symbolic) {
    const int n = f.dimension();
    if (g.dimension() != n || h.dimension() != n || grid.dim() != n)
        throw DimensionMismatch("verify_decomposition: dimensions of f, g, h, grid differ");

    // precompute the symbolic curl entries of g and div of h once
    std::vector<Expr> curl_entries;
    Expr div_h = Expr::constant(0.0);
    if (backend == Backend::Symbolic) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                curl_entries.push_back(g.partial(j, i + 1) - g.partial(i, j + 1));
        for (int i = 0; i < n; ++i) div_h = div_h + h.partial(i, i + 1);
    }

    DecompositionCertificate cert;
    cert.grid = grid;
    cert.tolerance = tol;
    cert.backend = backend;

    grid.for_each([&](std::int64_t, const Eigen::VectorXd& x) {
        const Eigen::VectorXd gv = g(x);
        const Eigen::VectorXd hv = h(x);
        const Eigen::VectorXd fv = f(x);
        cert.sum_residual = std::max(cert.sum_residual,
                                     (fv - gv - hv).cwiseAbs().maxCoeff());
        cert.orth_residual = std::max(
            cert.orth_residual, std::abs(gv.dot(hv)) / (1.0 + gv.norm() * hv.norm()));
        if (backend == Backend::Symbolic) {
            for (const Expr& e : curl_entries)
                cert.curl_residual = std::max(cert.curl_residual, std::abs(e.evaluate(x)));
            cert.div_residual = std::max(cert.div_residual, std::abs(div_h.evaluate(x)));
        } else {
            cert.curl_residual = std::max(
                cert.curl_residual, curl_at(g, x, backend).cwiseAbs().maxCoeff());
            cert.div_residual = std::max(cert.div_residual,
                                         std::abs(divergence_at(h, x, backend)));
        }
    });

    cert.sum_ok = cert.sum_residual <= tol;
    cert.curl_ok = cert.curl_residual <= tol;
    cert.div_ok = cert.div_residual <= tol;
    cert.orth_ok = cert.orth_residual <= tol;
    cert.certified = cert.sum_ok && cert.curl_ok && cert.div_ok && cert.orth_ok;
    return cert;
}

inline Decomposition build_ansatz_2d(const Ansatz2D& a,
                                     const GridSpec* certification_grid = nullptr,
                                     double tol = 1e-9) {
    if (a.theta.max_var_index() > 2) throw VarOutOfRange(a.theta.max_var_index(), 2);
    if (a.alpha.max_var_index() > 1 || a.beta.max_var_index() > 1)
        throw Error("ansatz profiles alpha/beta must be univariate in t");

    const Expr tx1 = a.theta.differentiate(1);
    const Expr tx2 = a.theta.differentiate(2);
    const Expr beta_theta = a.beta.substitute(1, a.theta);
    const Expr alpha_theta = a.alpha.substitute(1, a.theta);

    std::vector<Expr> gc{beta_theta * tx1, beta_theta * tx2};
    std::vector<Expr> hc{-(alpha_theta * tx2), alpha_theta * tx1};
    std::vector<Expr> fc{gc[0] + hc[0], gc[1] + hc[1]};

    Decomposition d{VectorFieldDef::from_expressions(gc),
                    VectorFieldDef::from_expressions(hc),
                    VectorFieldDef::from_expressions(fc),
                    {}};
    const GridSpec grid = certification_grid ? *certification_grid : GridSpec::cube(2, -1.0, 1.0);
    d.certificate = verify_decomposition(d.f, d.g, d.h, grid, tol);
    return d;
}

inline Decomposition build_ansatz_nd(const AnsatzND& a,
                                     const GridSpec* certification_grid = nullptr,
                                     double tol = 1e-9) {
    const int n = a.n;
    if (n < 2) throw Error("nD ansatz needs dimension >= 2");
    if (a.theta.max_var_index() > n) throw VarOutOfRange(a.theta.max_var_index(), n);
    if (a.beta.max_var_index() > 1) throw Error("ansatz profile beta must be univariate in t");
    for (const auto& [ij, e] : a.alpha) {
        if (!(1 <= ij.first && ij.first < ij.second && ij.second <= n))
            throw Error("alpha index pair (" + std::to_string(ij.first) + "," +
                        std::to_string(ij.second) + ") must satisfy 1 <= i < j <= n");
        if (e.max_var_index() > 1) throw Error("ansatz profiles alpha_ij must be univariate in t");
    }

    std::vector<Expr> grad_theta;
    grad_theta.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) grad_theta.push_back(a.theta.differentiate(k));

    const Expr beta_prime = a.beta.differentiate(1).substitute(1, a.theta);
    std::map<std::pair<int, int>, Expr> alpha_prime;
    for (const auto& [ij, e] : a.alpha)
        alpha_prime.emplace(ij, e.differentiate(1).substitute(1, a.theta));

    std::vector<Expr> gc, hc, fc;
    for (int k = 1; k <= n; ++k) {
        gc.push_back(beta_prime * grad_theta[static_cast<std::size_t>(k - 1)]);
        Expr hk = Expr::constant(0.0);
        for (int j = k + 1; j <= n; ++j)
            if (auto it = alpha_prime.find({k, j}); it != alpha_prime.end())
                hk = hk + it->second * grad_theta[static_cast<std::size_t>(j - 1)];
        for (int i = 1; i < k; ++i)
            if (auto it = alpha_prime.find({i, k}); it != alpha_prime.end())
                hk = hk - it->second * grad_theta[static_cast<std::size_t>(i - 1)];
        hc.push_back(hk);
    }
    for (int k = 0; k < n; ++k)
        fc.push_back(gc[static_cast<std::size_t>(k)] + hc[static_cast<std::size_t>(k)]);

    Decomposition d{VectorFieldDef::from_expressions(gc),
                    VectorFieldDef::from_expressions(hc),
                    VectorFieldDef::from_expressions(fc),
                    {}};
    const GridSpec grid = certification_grid ? *certification_grid : GridSpec::cube(n, -1.0, 1.0);
    d.certificate = verify_decomposition(d.f, d.g, d.h, grid, tol);
    return d;
}

// Linear split f = Fx into g = Gx and h = (F - G)x; the certificate is
// computed on a grid like every other decomposition.
inline Decomposition decomposition_from_linear(const Eigen::MatrixXd& F,
                                               const Eigen::MatrixXd& G,
                                               const GridSpec* certification_grid = nullptr,
                                               double tol = 1e-9) {
    if (F.rows() != F.cols() || G.rows() != G.cols() || F.rows() != G.rows())
        throw DimensionMismatch("decomposition_from_linear: F and G must be square and equal size");
    const int n = static_cast<int>(F.rows());
    Decomposition d{VectorFieldDef::linear(G), VectorFieldDef::linear(F - G),
                    VectorFieldDef::linear(F), {}};
    const GridSpec grid = certification_grid ? *certification_grid : GridSpec::cube(n, -1.0, 1.0);
    d.certificate = verify_decomposition(d.f, d.g, d.h, grid, tol);
    return d;
}

}  // namespace orthlyap

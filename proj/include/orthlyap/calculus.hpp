#pragma once

// Differential operators on vector fields: the curl as the antisymmetrised
// Jacobian, the divergence as its trace, pointwise inner products, and
// potential reconstruction by line integration from the origin.

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "orthlyap/error.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/quadrature.hpp"

namespace orthlyap {

enum class Backend { Symbolic, FiniteDifference };

// Curl at a point as the full antisymmetric matrix of 2-form coefficients,
// entry (i,j) = d f_j / d x_i - d f_i / d x_j. For a linear field Fx this is
// the constant F^T - F.
using CurlMatrix = Eigen::MatrixXd;

namespace detail {

inline double fd_partial(const VectorFieldDef& f, int comp, int var, const EvalPoint& p) {
    const double h = 1e-6 * std::max(1.0, std::abs(p[var - 1]));
    EvalPoint hi = p, lo = p;
    hi[var - 1] += h;
    lo[var - 1] -= h;
    return (f.component(comp).evaluate(hi) - f.component(comp).evaluate(lo)) / (2.0 * h);
}

inline double partial_at(const VectorFieldDef& f, int comp, int var, const EvalPoint& p,
                         Backend backend) {
    if (backend == Backend::Symbolic) return f.partial(comp, var).evaluate(p);
    return fd_partial(f, comp, var, p);
}

}  // namespace detail

inline CurlMatrix curl_at(const VectorFieldDef& f, const EvalPoint& p,
                          Backend backend = Backend::Symbolic) {
    const int n = f.dimension();
    if (p.size() != n) throw DimensionMismatch("point/field dimension mismatch in curl");
    if (f.is_linear()) return f.matrix().transpose() - f.matrix();
    CurlMatrix m = CurlMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = detail::partial_at(f, j, i + 1, p, backend) -
                             detail::partial_at(f, i, j + 1, p, backend);
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

inline double divergence_at(const VectorFieldDef& f, const EvalPoint& p,
                            Backend backend = Backend::Symbolic) {
    const int n = f.dimension();
    if (p.size() != n) throw DimensionMismatch("point/field dimension mismatch in divergence");
    if (f.is_linear()) return f.matrix().trace();
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += detail::partial_at(f, i, i + 1, p, backend);
    return d;
}

inline double inner_at(const VectorFieldDef& a, const VectorFieldDef& b, const EvalPoint& p) {
    if (a.dimension() != b.dimension())
        throw DimensionMismatch("inner product of fields with different dimensions");
    return a(p).dot(b(p));
}

// V(x) = -int_0^1 <g(t x), x> dt, the potential with grad V = -g and V(0) = 0.
// Valid when g is curl-free on the segment (star-shaped domain assumed, not
// verified); the curl is spot-checked at the quadrature nodes unless the
// caller already certified it.
inline double potential_from_gradient(const VectorFieldDef& g, const EvalPoint& x,
                                      int quadrature_order = 64, bool check_curl = true,
                                      double curl_tolerance = 1e-4) {
    const int n = g.dimension();
    if (x.size() != n) throw DimensionMismatch("point/field dimension mismatch in potential");
    if (x.norm() == 0.0) return 0.0;
    const QuadratureRule rule = gauss_legendre_01(quadrature_order);
    double acc = 0.0;
    double max_curl = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const EvalPoint xt = rule.nodes[k] * x;
        if (check_curl && !g.is_linear())
            max_curl = std::max(max_curl, curl_at(g, xt).cwiseAbs().maxCoeff());
        acc += rule.weights[k] * g(xt).dot(x);
    }
    if (check_curl) {
        if (g.is_linear())
            max_curl = (g.matrix().transpose() - g.matrix()).cwiseAbs().maxCoeff();
        if (max_curl > curl_tolerance)
            throw CurlNotZero("field is not curl-free along the integration segment; "
                              "its line-integral potential is path dependent",
                              max_curl);
    }
    return -acc;
}

}  // namespace orthlyap

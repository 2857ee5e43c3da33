#pragma once

// Lyapunov function candidates: V with grad V = -g and V(0) = 0. For linear
// decompositions g = Gx this is the quadratic form -x^T G x / 2; for
// expression fields V is reconstructed by line integration from the origin.

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "orthlyap/calculus.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/linalg.hpp"

namespace orthlyap {

enum class Definiteness { PositiveDefinite, NegativeDefinite, IndefiniteOrSemidefinite };

inline const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::PositiveDefinite: return "positive-definite";
        case Definiteness::NegativeDefinite: return "negative-definite";
        case Definiteness::IndefiniteOrSemidefinite: return "indefinite-or-semidefinite";
    }
    return "?";
}

struct LyapunovCandidate {
    enum class Kind { QuadraticForm, LineIntegral };

    std::function<double(const EvalPoint&)> value;
    std::function<Eigen::VectorXd(const EvalPoint&)> gradient;  // = -g
    Kind kind = Kind::LineIntegral;
    // classification of -G (equivalently of V) for the quadratic kind
    Definiteness definiteness = Definiteness::IndefiniteOrSemidefinite;
    Eigen::VectorXd neg_g_eigenvalues;  // eigenvalues of -G, ascending (quadratic kind)
};

// V(x) = -x^T G x / 2 for a symmetric G; grad V = -Gx.
inline LyapunovCandidate lyapunov_quadratic(const Eigen::MatrixXd& G) {
    const SymmetricEig eig = symmetric_eig(-G);
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    Definiteness def = Definiteness::IndefiniteOrSemidefinite;
    if (eig.lambda.minCoeff() > 1e-10 * scale) def = Definiteness::PositiveDefinite;
    else if (eig.lambda.maxCoeff() < -1e-10 * scale) def = Definiteness::NegativeDefinite;

    LyapunovCandidate cand;
    cand.kind = LyapunovCandidate::Kind::QuadraticForm;
    cand.definiteness = def;
    cand.neg_g_eigenvalues = eig.lambda;
    const Eigen::MatrixXd Gs = 0.5 * (G + G.transpose());
    cand.value = [Gs](const EvalPoint& x) { return -0.5 * x.dot(Gs * x); };
    cand.gradient = [Gs](const EvalPoint& x) { return Eigen::VectorXd(-(Gs * x)); };
    return cand;
}

// Line-integral potential of -g. When the caller has already certified g as
// curl-free (the builders in decomp.hpp do), the per-evaluation curl check
// can be switched off.
inline LyapunovCandidate lyapunov_from_gradient_field(const VectorFieldDef& g,
                                                      int quadrature_order = 64,
                                                      bool check_curl = false) {
    LyapunovCandidate cand;
    cand.kind = LyapunovCandidate::Kind::LineIntegral;
    cand.value = [g, quadrature_order, check_curl](const EvalPoint& x) {
        return potential_from_gradient(g, x, quadrature_order, check_curl);
    };
    cand.gradient = [g](const EvalPoint& x) { return Eigen::VectorXd(-g(x)); };
    return cand;
}

}  // namespace orthlyap

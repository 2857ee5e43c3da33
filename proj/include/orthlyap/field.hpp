#pragma once

// Vector fields on R^n, given either by n expressions or by a matrix F
// (the linear field x -> Fx). Both forms expose a symbolic view, so the
// differential operators in calculus.hpp work uniformly.

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orthlyap/error.hpp"
#include "orthlyap/expr.hpp"

namespace orthlyap {

using EvalPoint = Eigen::VectorXd;

class VectorFieldDef {
public:
    static VectorFieldDef from_expressions(std::vector<Expr> components) {
        if (components.empty()) throw DimensionMismatch("vector field needs at least one component");
        const int n = static_cast<int>(components.size());
        for (const Expr& e : components)
            if (e.max_var_index() > n)
                throw VarOutOfRange(e.max_var_index(), n);
        VectorFieldDef f;
        f.n_ = n;
        f.components_ = std::move(components);
        return f;
    }

    static VectorFieldDef linear(Eigen::MatrixXd F) {
        if (F.rows() != F.cols()) throw DimensionMismatch("linear field matrix must be square");
        if (F.rows() == 0) throw DimensionMismatch("linear field matrix must be non-empty");
        VectorFieldDef f;
        f.n_ = static_cast<int>(F.rows());
        // symbolic view: f_i = sum_j F(i,j) x_j
        f.components_.reserve(f.n_);
        for (int i = 0; i < f.n_; ++i) {
            Expr c = Expr::constant(0.0);
            for (int j = 0; j < f.n_; ++j)
                if (F(i, j) != 0.0) c = c + Expr::constant(F(i, j)) * Expr::var(j + 1);
            f.components_.push_back(c);
        }
        f.matrix_ = std::move(F);
        return f;
    }

    int dimension() const { return n_; }
    bool is_linear() const { return matrix_.size() > 0; }
    const Eigen::MatrixXd& matrix() const {
        if (!is_linear()) throw Error("field is not linear");
        return matrix_;
    }
    const Expr& component(int i) const { return components_.at(static_cast<std::size_t>(i)); }
    const std::vector<Expr>& components() const { return components_; }

    Eigen::VectorXd operator()(const EvalPoint& x) const {
        if (x.size() != n_)
            throw DimensionMismatch("evaluation point has dimension " +
                                    std::to_string(x.size()) + ", field expects " +
                                    std::to_string(n_));
        if (is_linear()) return matrix_ * x;
        Eigen::VectorXd out(n_);
        for (int i = 0; i < n_; ++i) out[i] = components_[static_cast<std::size_t>(i)].evaluate(x);
        return out;
    }

    // d f_comp / d x_var, 1-based var. Constant for linear fields.
    Expr partial(int comp, int var) const {
        if (is_linear()) return Expr::constant(matrix_(comp, var - 1));
        return components_[static_cast<std::size_t>(comp)].differentiate(var);
    }

private:
    int n_ = 0;
    std::vector<Expr> components_;
    Eigen::MatrixXd matrix_;  // empty unless linear
};

}  // namespace orthlyap

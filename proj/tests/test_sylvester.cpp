#include <catch2/catch.hpp>

#include <random>

#include "orthlyap/linalg.hpp"
#include "orthlyap/sylvester.hpp"
#include "support/oracles.hpp"

using namespace orthlyap;

namespace {

void check_solution(const Eigen::MatrixXd& F, const SylvesterSolution& s) {
    const auto n = F.rows();
    const double res = (s.X * F.transpose() + F * s.X -
                        2.0 * Eigen::MatrixXd::Identity(n, n)).norm();
    REQUIRE(res <= 1e-8 * std::max(1.0, F.norm() * s.X.norm()));
    REQUIRE((s.X - s.X.transpose()).norm() <= 1e-10 * std::max(1.0, s.X.norm()));
    REQUIRE(s.residual == Approx(res).margin(1e-14));
}

}  // namespace

TEST_CASE("negated identity", "[sylvester]") {
    const Eigen::MatrixXd F = -Eigen::MatrixXd::Identity(2, 2);
    const SylvesterSolution s = solve_sylvester_special(F);
    check_solution(F, s);
    REQUIRE((s.X + Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-14);
}

TEST_CASE("diagonal case decouples into scalar equations", "[sylvester]") {
    const Eigen::MatrixXd F = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    const SylvesterSolution s = solve_sylvester_special(F);
    check_solution(F, s);
    REQUIRE(s.X(0, 0) == Approx(1.0));
    REQUIRE(s.X(1, 1) == Approx(0.5));
    REQUIRE(std::abs(s.X(0, 1)) <= 1e-14);
}

TEST_CASE("opposite eigenvalue pair is rejected", "[sylvester]") {
    const Eigen::MatrixXd F = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    REQUIRE_THROWS_AS(solve_sylvester_special(F), SingularSylvester);
    // also the diagonal case lambda ~ 0
    const Eigen::MatrixXd Z = Eigen::Vector2d(1.0, 1e-12).asDiagonal();
    REQUIRE_THROWS_AS(solve_sylvester_special(Z), SingularSylvester);
}

TEST_CASE("solution for Hurwitz matrices is negative definite", "[sylvester][property]") {
    std::mt19937 rng(515);
    for (int k = 0; k < 25; ++k) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        Eigen::MatrixXd F = oracles::random_matrix(rng, n);
        // shift the spectrum left of -0.1
        double max_re = -std::numeric_limits<double>::infinity();
        for (const auto& l : real_schur(F).eigenvalues()) max_re = std::max(max_re, l.real());
        F -= (max_re + 0.6) * Eigen::MatrixXd::Identity(n, n);

        const SylvesterSolution s = solve_sylvester_special(F);
        check_solution(F, s);
        REQUIRE(s.residual <= 1e-9);
        REQUIRE(symmetric_eig(s.X).lambda.maxCoeff() < 0.0);
    }
}

TEST_CASE("random non-degenerate matrices", "[sylvester][property]") {
    std::mt19937 rng(616);
    int done = 0;
    while (done < 30) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        const Eigen::MatrixXd F = oracles::random_matrix(rng, n);
        try {
            const SylvesterSolution s = solve_sylvester_special(F);
            check_solution(F, s);
            ++done;
        } catch (const SingularSylvester&) {
            continue;  // random spectrum straddled zero within tolerance
        }
    }
}

TEST_CASE("symmetric invertible F has X = F^{-1}", "[sylvester]") {
    std::mt19937 rng(717);
    for (int k = 0; k < 10; ++k) {
        const int n = std::uniform_int_distribution<int>(2, 6)(rng);
        Eigen::MatrixXd A = oracles::random_matrix(rng, n);
        Eigen::MatrixXd F = (0.5 * (A + A.transpose())).eval();
        F += (symmetric_eig(F).lambda.cwiseAbs().maxCoeff() + 0.7) *
             Eigen::MatrixXd::Identity(n, n);  // positive definite, no zero sums
        const SylvesterSolution s = solve_sylvester_special(F);
        check_solution(F, s);
        REQUIRE((s.X - F.inverse()).norm() <= 1e-9 * std::max(1.0, F.inverse().norm()));
    }
}

TEST_CASE("complex spectra work through the quasi-triangular path", "[sylvester]") {
    Eigen::MatrixXd F(4, 4);
    F << -1, 2, 0.3, 0, -2, -1, 0, 0.1, 0, 0, -3, 1, 0, 0, -1, -3;  // two complex pairs
    const SylvesterSolution s = solve_sylvester_special(F);
    check_solution(F, s);
}

#include <catch2/catch.hpp>

#include <random>

#include "orthlyap/linalg.hpp"
#include "orthlyap/schur.hpp"
#include "support/oracles.hpp"

using namespace orthlyap;

namespace {

void check_schur_invariants(const Eigen::MatrixXd& F, const RealSchur& s) {
    const auto n = F.rows();
    REQUIRE((s.U.transpose() * s.U - Eigen::MatrixXd::Identity(n, n)).norm() <=
            static_cast<double>(n) * 1e-12);
    REQUIRE((s.U * s.R * s.U.transpose() - F).norm() <= 1e-10 * std::max(1.0, F.norm()));
    // quasi-triangular: everything below the first subdiagonal vanishes, and
    // every 2x2 diagonal block carries a complex-conjugate pair
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c + 1 < r; ++c) REQUIRE(s.R(r, c) == 0.0);
    for (const auto& b : s.blocks)
        if (b.size == 2) {
            REQUIRE(b.eig1.imag() != 0.0);
            REQUIRE(b.eig1 == std::conj(b.eig2));
        }
}

}  // namespace

TEST_CASE("schur of a diagonal matrix is trivial", "[schur]") {
    Eigen::MatrixXd F = Eigen::Vector3d(3.0, -1.0, 0.5).asDiagonal();
    const RealSchur s = real_schur(F);
    check_schur_invariants(F, s);
    REQUIRE((s.R - F).norm() <= 1e-12);
    REQUIRE((s.U - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("schur of the rank-one test matrix", "[schur]") {
    Eigen::MatrixXd F(2, 2);
    F << 1, 1, 0, 0;
    const RealSchur s = real_schur(F);
    check_schur_invariants(F, s);
    std::vector<double> diag{s.R(0, 0), s.R(1, 1)};
    std::sort(diag.begin(), diag.end());
    REQUIRE(diag[0] == Approx(0.0).margin(1e-12));
    REQUIRE(diag[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("block eigenvalues match the characteristic polynomial", "[schur]") {
    std::mt19937 rng(101);
    for (int k = 0; k < 5; ++k) {
        const Eigen::MatrixXd F = oracles::random_matrix(rng, 6);
        const RealSchur s = real_schur(F);
        check_schur_invariants(F, s);
        const auto mine = s.eigenvalues();
        const auto oracle = oracles::char_poly_eigenvalues(F);
        REQUIRE(oracles::spectrum_distance(mine, oracle) <= 1e-8);
    }
}

TEST_CASE("reorder moves the selected eigenvalue to the trailing block", "[schur]") {
    Eigen::MatrixXd F(2, 2);
    F << 1, 1, 0, 0;
    const RealSchur s = real_schur(F);
    const RealSchur r = reorder_schur(s, {{1.0, 0.0}});
    check_schur_invariants(F, r);
    REQUIRE(r.R(0, 0) == Approx(0.0).margin(1e-12));
    REQUIRE(r.R(1, 1) == Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(r.R(0, 1)) == Approx(1.0).margin(1e-12));
    // hand-derived transform: columns (1,-1)/sqrt2 and (1,1)/sqrt2 up to sign
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(r.U(0, 0)) == Approx(inv_sqrt2).margin(1e-12));
    REQUIRE(std::abs(r.U(1, 0)) == Approx(inv_sqrt2).margin(1e-12));
    REQUIRE(r.U(0, 0) * r.U(1, 0) < 0.0);  // first column is (1,-1) direction
    REQUIRE(r.U(0, 1) * r.U(1, 1) > 0.0);  // second column is (1,1) direction
}

TEST_CASE("reorder with the full spectrum is a no-op", "[schur]") {
    std::mt19937 rng(7);
    const Eigen::MatrixXd F = oracles::random_matrix(rng, 5);
    const RealSchur s = real_schur(F);
    const RealSchur r = reorder_schur(s, s.eigenvalues());
    REQUIRE((r.R - s.R).norm() == 0.0);
    REQUIRE((r.U - s.U).norm() == 0.0);
}

TEST_CASE("reorder collects a target set in the trailing block", "[schur]") {
    std::mt19937 rng(211);
    const Eigen::MatrixXd F = oracles::random_matrix(rng, 8);
    const RealSchur s = real_schur(F);

    // choose whole blocks totalling 3 eigenvalues
    std::vector<std::complex<double>> target;
    {
        int need = 3;
        for (const auto& b : s.blocks) {
            if (b.size <= need) {
                target.push_back(b.eig1);
                if (b.size == 2) target.push_back(b.eig2);
                need -= b.size;
            }
            if (need == 0) break;
        }
        REQUIRE(target.size() == 3);
    }

    const RealSchur r = reorder_schur(s, target);
    check_schur_invariants(F, r);
    REQUIRE(oracles::spectrum_distance(r.eigenvalues(), s.eigenvalues()) <= 1e-8);

    // trailing 3x3 block spectrum equals the target
    std::vector<std::complex<double>> trailing;
    for (const auto& b : r.blocks)
        if (b.start >= 5) {
            trailing.push_back(b.eig1);
            if (b.size == 2) trailing.push_back(b.eig2);
        }
    REQUIRE(trailing.size() == 3);
    REQUIRE(oracles::spectrum_distance(trailing, target) <= 1e-8);
}

TEST_CASE("reorder preserves the spectrum on random matrices", "[schur][property]") {
    std::mt19937 rng(303);
    for (int k = 0; k < 10; ++k) {
        const int n = std::uniform_int_distribution<int>(2, 7)(rng);
        const Eigen::MatrixXd F = oracles::random_matrix(rng, n);
        const RealSchur s = real_schur(F);
        // target: every second block
        std::vector<std::complex<double>> target;
        for (std::size_t b = 0; b < s.blocks.size(); b += 2) {
            target.push_back(s.blocks[b].eig1);
            if (s.blocks[b].size == 2) target.push_back(s.blocks[b].eig2);
        }
        if (target.empty() || target.size() == s.eigenvalues().size()) continue;
        const RealSchur r = reorder_schur(s, target);
        check_schur_invariants(F, r);
        REQUIRE(oracles::spectrum_distance(r.eigenvalues(), s.eigenvalues()) <= 1e-8);
    }
}

TEST_CASE("reorder rejects a split conjugate pair", "[schur]") {
    Eigen::MatrixXd F(2, 2);
    F << 0, 1, -1, 0;  // eigenvalues +-i
    const RealSchur s = real_schur(F);
    REQUIRE_THROWS_AS(reorder_schur(s, {{0.0, 1.0}}), TargetNotBlockClosed);
    REQUIRE_THROWS_AS(reorder_schur(s, {{5.0, 0.0}}), TargetNotBlockClosed);
}

TEST_CASE("symmetric eigensolver", "[schur]") {
    const Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
    const SymmetricEig e1 = symmetric_eig(I3);
    REQUIRE((e1.lambda - Eigen::Vector3d::Ones()).norm() <= 1e-14);

    Eigen::MatrixXd S(2, 2);
    S << 0.5, 0.5, 0.5, 0.5;
    const SymmetricEig e2 = symmetric_eig(S);
    REQUIRE(e2.lambda(0) == Approx(0.0).margin(1e-12));
    REQUIRE(e2.lambda(1) == Approx(1.0).margin(1e-12));

    std::mt19937 rng(404);
    for (int k = 0; k < 10; ++k) {
        Eigen::MatrixXd A = oracles::random_matrix(rng, 6);
        A = (0.5 * (A + A.transpose())).eval();
        const SymmetricEig e = symmetric_eig(A);
        REQUIRE((e.Q * e.lambda.asDiagonal() * e.Q.transpose() - A).norm() <=
                1e-10 * std::max(1.0, A.norm()));
        for (int i = 0; i + 1 < 6; ++i) REQUIRE(e.lambda(i) <= e.lambda(i + 1));
    }

    REQUIRE_THROWS_AS(symmetric_eig(oracles::random_matrix(rng, 3)), DimensionMismatch);
}

TEST_CASE("swapping blocks with coinciding spectra is refused", "[schur]") {
    // the swap solves A11 X - X A22 = A12, singular for equal eigenvalues
    Eigen::MatrixXd R(2, 2), U = Eigen::MatrixXd::Identity(2, 2);
    R << 1, 5, 0, 1;
    REQUIRE_THROWS_AS(detail::swap_adjacent_blocks(R, U, 0, 1, 1), SwapIllConditioned);

    // reorder itself avoids the degenerate swap: among equal eigenvalues it
    // selects the lowest block, so no swap is needed at all
    Eigen::MatrixXd F(2, 2);
    F << 1, 5, 0, 1;
    const RealSchur s = real_schur(F);
    REQUIRE(s.blocks.size() == 2);
    const RealSchur r = reorder_schur(s, {{1.0, 0.0}});
    REQUIRE((r.R - s.R).norm() == 0.0);
}

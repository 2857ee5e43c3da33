#include <catch2/catch.hpp>

#include <random>

#include "orthlyap/riccati.hpp"
#include "orthlyap/stability.hpp"
#include "support/oracles.hpp"

using namespace orthlyap;

namespace {

Decomposition example1(const GridSpec* grid = nullptr) {
    Ansatz2D a;
    a.theta = parse_expression("(x1^2 + x2^2)/2", 2);
    a.beta = parse_in_t("-(1 + 2*t - 4*t^2)");
    a.alpha = parse_in_t("-1");
    return build_ansatz_2d(a, grid);
}

// closed forms at the zero ring
const double kRadius = std::sqrt((1.0 + std::sqrt(5.0)) / 2.0);   // 1.27201964951...
const double kLevel = (7.0 + 5.0 * std::sqrt(5.0)) / 24.0;        // 0.75751416197...

}  // namespace

TEST_CASE("limit-cycle system is asymptotically stable on its inner region", "[stability]") {
    const GridSpec region = GridSpec::cube(2, -1.3, 1.3, 100);
    const Decomposition d = example1();
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g);
    const StabilityVerdict v = classify_equilibrium(d, V, region);
    REQUIRE(v.verdict == Verdict::AsymptoticallyStable);
    REQUIRE(v.evidence.certified_ball_radius > 0.0);
    REQUIRE(v.evidence.min_v_off_origin > 0.0);
}

TEST_CASE("linear contraction is asymptotically stable", "[stability]") {
    const Eigen::MatrixXd F = -Eigen::MatrixXd::Identity(2, 2);
    const SareSolution s = construct_G(F);
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    const StabilityVerdict v =
        classify_equilibrium(d, V, GridSpec::cube(2, -2.0, 2.0, 50));
    REQUIRE(v.verdict == Verdict::AsymptoticallyStable);
}

TEST_CASE("rank-one system is inconclusive: g vanishes on a line", "[stability]") {
    Eigen::MatrixXd F(2, 2);
    F << 1, 1, 0, 0;
    const SareSolution s = construct_G(F);  // the trace-matching solution
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    const StabilityVerdict v =
        classify_equilibrium(d, V, GridSpec::cube(2, -2.0, 2.0, 50));
    REQUIRE(v.verdict == Verdict::Inconclusive);
}

TEST_CASE("linear expansion is unstable", "[stability]") {
    const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
    const SareSolution s = construct_G(F);
    REQUIRE((s.G - F).cwiseAbs().maxCoeff() <= 1e-12);
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    const StabilityVerdict v =
        classify_equilibrium(d, V, GridSpec::cube(2, -2.0, 2.0, 50));
    REQUIRE(v.verdict == Verdict::Unstable);
    REQUIRE(v.evidence.witness.size() == 2);
    REQUIRE(V.value(v.evidence.witness) < 0.0);
}

TEST_CASE("classification preconditions", "[stability]") {
    // not an equilibrium: constant drift field
    Ansatz2D a;
    a.theta = parse_expression("x1", 2);
    a.beta = parse_in_t("1");
    a.alpha = parse_in_t("0");
    const Decomposition drift = build_ansatz_2d(a);
    const LyapunovCandidate V = lyapunov_from_gradient_field(drift.g);
    REQUIRE_THROWS_AS(
        classify_equilibrium(drift, V, GridSpec::cube(2, -1.0, 1.0, 20)),
        NotAnEquilibrium);

    // uncertified decomposition is refused
    Decomposition broken = example1();
    broken.certificate.certified = false;
    const LyapunovCandidate Vb = lyapunov_from_gradient_field(broken.g);
    REQUIRE_THROWS_AS(
        classify_equilibrium(broken, Vb, GridSpec::cube(2, -1.0, 1.0, 20)),
        UncertifiedDecomposition);

    // origin must be interior
    const Decomposition d = example1();
    const GridSpec off = GridSpec::box(Eigen::Vector2d(0.1, -1.0), Eigen::Vector2d(1.0, 1.0),
                                       {20, 20});
    REQUIRE_THROWS_AS(classify_equilibrium(d, lyapunov_from_gradient_field(d.g), off), Error);
}

TEST_CASE("domain of attraction of the limit-cycle system", "[stability][da]") {
    const GridSpec search = GridSpec::cube(2, -1.5, 1.5, 100);
    const Decomposition d = example1(&search);
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g);
    DAOptions opt;
    opt.attest_radially_unbounded = true;
    const DAEstimate est = estimate_da(d, V, search, 1e-6, opt);

    REQUIRE(est.level == Approx(kLevel).margin(1e-4));
    REQUIRE(est.level == Approx(0.757520).margin(1e-4));
    REQUIRE(!est.boundary.empty());
    for (const auto& z : est.boundary)
        REQUIRE(z.norm() == Approx(kRadius).margin(1e-4));
    REQUIRE(est.certified);
    REQUIRE(est.report.v_positive_inside);
    REQUIRE(est.report.g_nonzero_inside);
    REQUIRE(est.report.boundary_on_zero_locus);
    REQUIRE(est.report.sublevel_bounded);

    // refined zeros satisfy the locus conditions
    for (const auto& z : est.zeros) {
        REQUIRE(d.g(z).norm() <= 1e-8);
        REQUIRE(V.value(z) >= est.level - 1e-8);
    }
}

TEST_CASE("DA estimate is stable under grid refinement", "[stability][da]") {
    const GridSpec coarse = GridSpec::cube(2, -1.5, 1.5, 100);
    const GridSpec fine = GridSpec::cube(2, -1.5, 1.5, 200, 2'000'000);
    const Decomposition d = example1(&coarse);
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g, 16);
    DAOptions opt;
    opt.attest_radially_unbounded = true;
    const double c1 = estimate_da(d, V, coarse, 1e-6, opt).level;
    const double c2 = estimate_da(d, V, fine, 1e-6, opt).level;
    REQUIRE(std::abs(c1 - c2) <= 1e-3);
}

TEST_CASE("globally stable linear systems have no finite level", "[stability][da]") {
    const Eigen::MatrixXd F = -Eigen::MatrixXd::Identity(2, 2);
    const SareSolution s = construct_G(F);
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    REQUIRE_THROWS_AS(estimate_da(d, V, GridSpec::cube(2, -2.0, 2.0, 100)), NoZeroLocus);
}

TEST_CASE("search region too small to see the boundary", "[stability][da]") {
    const GridSpec search = GridSpec::cube(2, -0.5, 0.5, 100);
    const Decomposition d = example1(&search);
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g, 16);
    REQUIRE_THROWS_AS(estimate_da(d, V, search), NoZeroLocus);
}

TEST_CASE("estimate refuses unstable equilibria", "[stability][da]") {
    const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
    const SareSolution s = construct_G(F);
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    REQUIRE_THROWS_AS(estimate_da(d, V, GridSpec::cube(2, -1.0, 1.0, 50)),
                      CertificateFailure);
}

TEST_CASE("certificate is withheld without the attestation", "[stability][da]") {
    const GridSpec search = GridSpec::cube(2, -1.5, 1.5, 80);
    const Decomposition d = example1(&search);
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g, 16);
    const DAEstimate est = estimate_da(d, V, search);  // no attestation
    REQUIRE(!est.certified);
    REQUIRE(est.report.v_positive_inside);  // conditions hold, attestation missing
    REQUIRE(!est.report.warnings.empty());
}

#include <catch2/catch.hpp>

#include <random>

#include "orthlyap/riccati.hpp"
#include "orthlyap/sim.hpp"
#include "orthlyap/stability.hpp"
#include "support/oracles.hpp"

using namespace orthlyap;

namespace {

VectorFieldDef example1_field() {
    return VectorFieldDef::from_expressions(
        {parse_expression("-x1*(1 + (x1^2+x2^2) - (x1^2+x2^2)^2) + x2", 2),
         parse_expression("-x2*(1 + (x1^2+x2^2) - (x1^2+x2^2)^2) - x1", 2)});
}

Decomposition example1_decomposition() {
    Ansatz2D a;
    a.theta = parse_expression("(x1^2 + x2^2)/2", 2);
    a.beta = parse_in_t("-(1 + 2*t - 4*t^2)");
    a.alpha = parse_in_t("-1");
    return build_ansatz_2d(a);
}

}  // namespace

TEST_CASE("exponential decay matches the closed form", "[sim]") {
    const auto f = VectorFieldDef::linear(-Eigen::MatrixXd::Identity(2, 2));
    const Trajectory tr = integrate(f, Eigen::Vector2d(1, 0), 1.0, 1e-3);
    REQUIRE(tr.termination == Trajectory::Termination::ReachedTmax);
    REQUIRE(tr.final_time() == Approx(1.0));
    REQUIRE(tr.final_state()[0] == Approx(std::exp(-1.0)).margin(1e-6));
    REQUIRE(std::abs(tr.final_state()[1]) <= 1e-12);
    // times strictly increasing
    for (std::size_t k = 0; k + 1 < tr.times.size(); ++k)
        REQUIRE(tr.times[k] < tr.times[k + 1]);
}

TEST_CASE("inside the attractor ring trajectories converge", "[sim]") {
    const Trajectory tr = integrate(example1_field(), Eigen::Vector2d(1.2, 0), 50.0, 1e-2);
    REQUIRE(tr.termination == Trajectory::Termination::Converged);
    REQUIRE(tr.final_state().norm() < 1e-3);
}

TEST_CASE("outside the attractor ring trajectories escape", "[sim]") {
    const Trajectory tr = integrate(example1_field(), Eigen::Vector2d(1.35, 0), 50.0, 1e-3);
    REQUIRE(tr.termination == Trajectory::Termination::Escaped);
    double max_norm = 0.0;
    for (Eigen::Index k = 0; k < tr.states.rows(); ++k)
        max_norm = std::max(max_norm, tr.states.row(k).norm());
    REQUIRE(max_norm > 3.0);
}

TEST_CASE("domain errors end the trajectory instead of crashing", "[sim]") {
    const auto f = VectorFieldDef::from_expressions(
        {parse_expression("-sqrt(x1)", 1)});
    const Trajectory tr = integrate(f, Eigen::VectorXd::Constant(1, 1.0), 10.0, 1e-2);
    REQUIRE(tr.termination == Trajectory::Termination::EvalError);
    REQUIRE(!tr.eval_error.empty());
    REQUIRE(tr.states.rows() > 10);
}

TEST_CASE("V decreases along linear contraction trajectory at integrator accuracy", "[sim]") {
    const Eigen::MatrixXd F = -Eigen::MatrixXd::Identity(2, 2);
    const SareSolution s = construct_G(F);
    const Decomposition d = decomposition_from_linear(F, s.G);
    const LyapunovCandidate V = lyapunov_quadratic(s.G);
    const Trajectory tr = integrate(d.f, Eigen::Vector2d(1, 1), 2.0, 1e-3, &V);
    REQUIRE(!tr.v_values.empty());
    const MonotonicityReport rep = check_monotone_V(tr, d, 1e-9);
    REQUIRE(rep.monotone_ok);
    REQUIRE(rep.pointwise_ok);
    REQUIRE(rep.max_pointwise_rel_error <= 1e-6);  // trapezoid check is 2nd order
}

TEST_CASE("V decreases along a limit-cycle trajectory", "[sim]") {
    const Decomposition d = example1_decomposition();
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g, 16);
    const Trajectory tr = integrate(d.f, Eigen::Vector2d(1.0, 0), 20.0, 1e-3, &V);
    const MonotonicityReport rep = check_monotone_V(tr, d, 1e-9);
    REQUIRE(rep.monotone_ok);
    REQUIRE(rep.pointwise_ok);
    REQUIRE(rep.max_pointwise_rel_error <= 1e-2);
}

TEST_CASE("a wrong split fails the pointwise slope check", "[sim]") {
    // declare h' = h + 0.5*g so <g,h'> != 0; dV/dt no longer equals -|g'|^2
    const Decomposition good = example1_decomposition();
    std::vector<Expr> g_half, h_bad;
    for (int i = 0; i < 2; ++i) {
        g_half.push_back(Expr::constant(0.5) * good.g.component(i));
        h_bad.push_back(good.h.component(i) + Expr::constant(0.5) * good.g.component(i));
    }
    Decomposition bad{VectorFieldDef::from_expressions(g_half),
                      VectorFieldDef::from_expressions(h_bad), good.f, good.certificate};
    const LyapunovCandidate V = lyapunov_from_gradient_field(good.g, 16);
    const Trajectory tr = integrate(good.f, Eigen::Vector2d(1.0, 0), 10.0, 1e-3, &V);
    const MonotonicityReport rep = check_monotone_V(tr, bad, 1e-9);
    REQUIRE(!rep.pointwise_ok);
}

TEST_CASE("basin rings bracket the attractor boundary", "[sim]") {
    const auto f = example1_field();
    const auto inside = sample_basin(f, {1.25}, 64, 100.0);
    REQUIRE(inside.size() == 64);
    for (const auto& s : inside) REQUIRE(s.outcome == BasinSample::Outcome::Converged);

    const auto outside = sample_basin(f, {1.30}, 64, 100.0);
    for (const auto& s : outside) {
        REQUIRE(s.outcome == BasinSample::Outcome::Escaped);
        REQUIRE(s.final_norm >= 1e3);
    }
}

TEST_CASE("linear contraction converges from every ring", "[sim]") {
    const auto f = VectorFieldDef::linear(-Eigen::MatrixXd::Identity(2, 2));
    for (const auto& s : sample_basin(f, {0.5, 1.0, 5.0}, 16, 100.0))
        REQUIRE(s.outcome == BasinSample::Outcome::Converged);
}

TEST_CASE("3D basin sampling uses sphere points", "[sim]") {
    const auto f = VectorFieldDef::linear(-Eigen::MatrixXd::Identity(3, 3));
    const auto samples = sample_basin(f, {1.0}, 32, 50.0);
    REQUIRE(samples.size() == 32);
    for (const auto& s : samples) {
        REQUIRE(s.x0.norm() == Approx(1.0));
        REQUIRE(s.outcome == BasinSample::Outcome::Converged);
    }
}

TEST_CASE("integrator is fourth order", "[sim][property]") {
    const auto f = VectorFieldDef::linear(-Eigen::MatrixXd::Identity(1, 1));
    auto final_error = [&](double dt) {
        const Trajectory tr = integrate(f, Eigen::VectorXd::Constant(1, 1.0), 1.0, dt);
        return std::abs(tr.final_state()[0] - std::exp(-1.0));
    };
    const double e1 = final_error(0.1);
    const double e2 = final_error(0.05);
    const double ratio = e1 / e2;
    REQUIRE(ratio >= 8.0);
    REQUIRE(ratio <= 32.0);
}

TEST_CASE("invalid arguments are rejected", "[sim]") {
    const auto f = VectorFieldDef::linear(-Eigen::MatrixXd::Identity(2, 2));
    REQUIRE_THROWS_AS(integrate(f, Eigen::Vector2d(1, 0), 1.0, 0.0), Error);
    REQUIRE_THROWS_AS(integrate(f, Eigen::Vector2d(1, 0), -1.0, 0.1), Error);
    REQUIRE_THROWS_AS(integrate(f, Eigen::Vector3d(1, 0, 0), 1.0, 0.1), DimensionMismatch);
    REQUIRE_THROWS_AS(sample_basin(VectorFieldDef::linear(-Eigen::MatrixXd::Identity(4, 4)),
                                   {1.0}, 4, 1.0),
                      Error);
}

TEST_CASE("empirical basin agrees with the certified sublevel component", "[sim][cross]") {
    // cross-module invariant: rings strictly inside the certified boundary
    // converge, rings strictly outside escape (2% exclusion zone)
    const GridSpec search = GridSpec::cube(2, -1.5, 1.5, 100);
    const Decomposition d = example1_decomposition();
    const LyapunovCandidate V = lyapunov_from_gradient_field(d.g, 16);
    DAOptions opt;
    opt.attest_radially_unbounded = true;
    const DAEstimate est = estimate_da(d, V, search, 1e-6, opt);
    REQUIRE(est.certified);

    double boundary_radius = 0.0;
    for (const auto& z : est.boundary) boundary_radius += z.norm();
    boundary_radius /= static_cast<double>(est.boundary.size());

    for (const double factor : {0.90, 0.95}) {
        const double r = factor * boundary_radius;
        for (const auto& s : sample_basin(d.f, {r}, 16, 100.0)) {
            if (V.value(s.x0) > 0.9 * est.level) continue;
            REQUIRE(s.outcome == BasinSample::Outcome::Converged);
        }
    }
    for (const double factor : {1.05, 1.10})
        for (const auto& s : sample_basin(d.f, {factor * boundary_radius}, 16, 100.0))
            REQUIRE(s.outcome == BasinSample::Outcome::Escaped);
}

#pragma once

// Fixed-step classical Runge-Kutta integration of x' = f(x), with optional
// Lyapunov-value recording, monotonicity checking of V along trajectories
// (dV/dt = -|g|^2), and ring/sphere basin sampling.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orthlyap/decomp.hpp"
#include "orthlyap/error.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/lyapunov.hpp"

namespace orthlyap {

struct Trajectory {
    enum class Termination { ReachedTmax, Converged, Escaped, EvalError };

    std::vector<double> times;         // strictly increasing
    Eigen::MatrixXd states;            // steps x n
    std::vector<double> v_values;      // per step when a candidate is attached
    Termination termination = Termination::ReachedTmax;
    std::string eval_error;            // message when termination == EvalError

    Eigen::VectorXd final_state() const { return states.row(states.rows() - 1); }
    double final_time() const { return times.back(); }
};

inline const char* to_string(Trajectory::Termination t) {
    switch (t) {
        case Trajectory::Termination::ReachedTmax: return "reached-tmax";
        case Trajectory::Termination::Converged: return "converged";
        case Trajectory::Termination::Escaped: return "escaped";
        case Trajectory::Termination::EvalError: return "eval-error";
    }
    return "?";
}

struct IntegrationOptions {
    double escape_radius = 1e3;
    double convergence_radius_scale = 1e-6;  // radius = scale * (1 + |x0|)
};

inline Trajectory integrate(const VectorFieldDef& f, const EvalPoint& x0, double t_max,
                            double dt, const LyapunovCandidate* V = nullptr,
                            const IntegrationOptions& options = {}) {
    if (!(dt > 0.0) || !(t_max > 0.0)) throw Error("integrate needs dt > 0 and t_max > 0");
    const int n = f.dimension();
    if (x0.size() != n) throw DimensionMismatch("initial state dimension does not match field");

    const double convergence_radius = options.convergence_radius_scale * (1.0 + x0.norm());
    std::vector<Eigen::VectorXd> states;
    Trajectory tr;

    Eigen::VectorXd x = x0;
    double t = 0.0;
    auto record = [&](double time, const Eigen::VectorXd& state) {
        tr.times.push_back(time);
        states.push_back(state);
        if (V) tr.v_values.push_back(V->value(state));
    };
    record(t, x);

    const auto steps = static_cast<std::int64_t>(std::ceil(t_max / dt - 1e-12));
    tr.termination = Trajectory::Termination::ReachedTmax;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double h = std::min(dt, t_max - t);
        try {
            const Eigen::VectorXd k1 = f(x);
            const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
            const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
            const Eigen::VectorXd k4 = f(x + h * k3);
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const DomainError& e) {
            tr.termination = Trajectory::Termination::EvalError;
            tr.eval_error = e.what();
            break;
        }
        t += h;
        if (!x.allFinite()) {
            // overflow counts as escape; keep the last finite state recorded
            tr.termination = Trajectory::Termination::Escaped;
            break;
        }
        record(t, x);
        if (x.norm() >= options.escape_radius) {
            tr.termination = Trajectory::Termination::Escaped;
            break;
        }
        if (x.norm() <= convergence_radius) {
            tr.termination = Trajectory::Termination::Converged;
            break;
        }
    }

    tr.states.resize(static_cast<Eigen::Index>(states.size()), n);
    for (std::size_t i = 0; i < states.size(); ++i)
        tr.states.row(static_cast<Eigen::Index>(i)) = states[i];
    return tr;
}

// dV/dt along trajectories equals -|g|^2. Check (a) monotone decrease per
// step and (b) the finite-difference slope against the trapezoid average of
// -|g|^2 at the step endpoints; steps near g-zeros are skipped.
struct MonotonicityReport {
    int steps_checked = 0;
    int monotone_violations = 0;
    double max_increase = 0;  // beyond tol * (1 + |V|)
    int pointwise_checked = 0;
    int pointwise_violations = 0;
    double max_pointwise_rel_error = 0;
    double pointwise_tolerance = 0;
    bool monotone_ok = false;
    bool pointwise_ok = false;
};

inline MonotonicityReport check_monotone_V(const Trajectory& tr, const Decomposition& d,
                                           double tol = 1e-9) {
    if (tr.v_values.empty()) throw Error("trajectory carries no V samples");
    MonotonicityReport rep;
    const auto steps = static_cast<std::size_t>(tr.states.rows());

    std::vector<double> g2(steps);
    double g2_max = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const Eigen::VectorXd x = tr.states.row(static_cast<Eigen::Index>(k));
        g2[k] = d.g(x).squaredNorm();
        g2_max = std::max(g2_max, g2[k]);
    }
    const double g2_floor = 1e-4 * g2_max + 1e-14;

    double dt_max = 0.0;
    for (std::size_t k = 0; k + 1 < steps; ++k)
        dt_max = std::max(dt_max, tr.times[k + 1] - tr.times[k]);
    rep.pointwise_tolerance = std::max(1e-2, 10.0 * dt_max);

    for (std::size_t k = 0; k + 1 < steps; ++k) {
        const double v0 = tr.v_values[k], v1 = tr.v_values[k + 1];
        const double dt = tr.times[k + 1] - tr.times[k];
        ++rep.steps_checked;
        const double slack = tol * (1.0 + std::abs(v0));
        if (v1 > v0 + slack) {
            ++rep.monotone_violations;
            rep.max_increase = std::max(rep.max_increase, v1 - v0 - slack);
        }
        const double ref = -0.5 * (g2[k] + g2[k + 1]);
        if (std::abs(ref) < g2_floor) continue;  // too close to a g-zero
        const double fd = (v1 - v0) / dt;
        const double rel = std::abs(fd - ref) / std::abs(ref);
        ++rep.pointwise_checked;
        rep.max_pointwise_rel_error = std::max(rep.max_pointwise_rel_error, rel);
        if (rel > rep.pointwise_tolerance) ++rep.pointwise_violations;
    }
    rep.monotone_ok = rep.monotone_violations == 0;
    rep.pointwise_ok = rep.pointwise_violations == 0;
    return rep;
}

struct BasinSample {
    Eigen::VectorXd x0;
    enum class Outcome { Converged, Escaped, Undecided } outcome;
    double final_time;
    double final_norm;
};

inline const char* to_string(BasinSample::Outcome o) {
    switch (o) {
        case BasinSample::Outcome::Converged: return "converged";
        case BasinSample::Outcome::Escaped: return "escaped";
        case BasinSample::Outcome::Undecided: return "undecided";
    }
    return "?";
}

// Evenly spaced starts on circles (n = 2) or Fibonacci spheres (n = 3).
inline std::vector<BasinSample> sample_basin(const VectorFieldDef& f,
                                             const std::vector<double>& ring_radii,
                                             int samples_per_ring, double t_max,
                                             double dt = 1e-2,
                                             const IntegrationOptions& options = {}) {
    const int n = f.dimension();
    if (n != 2 && n != 3) throw Error("basin sampling supports 2D and 3D systems");
    std::vector<BasinSample> out;
    for (const double r : ring_radii) {
        for (int k = 0; k < samples_per_ring; ++k) {
            Eigen::VectorXd x0(n);
            if (n == 2) {
                const double a = 2.0 * M_PI * k / samples_per_ring;
                x0 << r * std::cos(a), r * std::sin(a);
            } else {
                const double golden = M_PI * (3.0 - std::sqrt(5.0));
                const double z = 1.0 - 2.0 * (k + 0.5) / samples_per_ring;
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double a = golden * k;
                x0 << r * rho * std::cos(a), r * rho * std::sin(a), r * z;
            }
            const Trajectory tr = integrate(f, x0, t_max, dt, nullptr, options);
            BasinSample sample;
            sample.x0 = x0;
            sample.final_time = tr.final_time();
            sample.final_norm = tr.final_state().norm();
            switch (tr.termination) {
                case Trajectory::Termination::Converged:
                    sample.outcome = BasinSample::Outcome::Converged;
                    break;
                case Trajectory::Termination::Escaped:
                    sample.outcome = BasinSample::Outcome::Escaped;
                    // overflow inside one step: the recorded states stop at the
                    // last finite one, but the escape is real
                    if (sample.final_norm < options.escape_radius)
                        sample.final_norm = std::numeric_limits<double>::infinity();
                    break;
                default:
                    sample.outcome = BasinSample::Outcome::Undecided;
            }
            out.push_back(std::move(sample));
        }
    }
    return out;
}

}  // namespace orthlyap

#pragma once

// Equilibrium classification and exact domain-of-attraction certification
// from an orthogonal decomposition f = g + h with potential V, grad V = -g.
//
// Classification scans origin-centred balls inscribed in the user's region
// (the stability conditions only need to hold on *some* neighbourhood of the
// origin, so a shrinking sequence of balls is tried and the best certified
// verdict returned):
//   V > tol off an origin-exclusion shell        -> Lyapunov stable
//   ... and |g| > tol there                      -> asymptotically stable
//   V < 0 witnesses on every shrinking shell and
//   g nonzero on a punctured ball                -> unstable
// Anything else is Inconclusive. Verdicts are certificates on the sampled
// grid, not global proofs.
//
// The DA estimate follows the sublevel-set characterisation: find the zero
// locus of g (grid scan + damped Gauss-Newton), take c = min V over the
// refined zeros, flood-fill the path component of {V < c} containing the
// origin, and check the certificate conditions on it. Whenever the estimate
// certifies, the boundary of the component lies inside {g = 0}, so the
// refined zeros double as boundary samples and the fill treats the zero
// locus as a barrier (a strict sublevel fill would leak: at the certified
// level c the potential is below c on *both* sides of the boundary).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orthlyap/decomp.hpp"
#include "orthlyap/error.hpp"
#include "orthlyap/grid.hpp"
#include "orthlyap/lyapunov.hpp"

namespace orthlyap {

enum class Verdict { LyapunovStable, AsymptoticallyStable, Unstable, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::LyapunovStable: return "LyapunovStable";
        case Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
        case Verdict::Unstable: return "Unstable";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct StabilityEvidence {
    double min_v_off_origin = 0;      // over the largest inscribed ball
    double min_gnorm_off_origin = 0;
    double certified_ball_radius = 0; // ball on which the verdict holds
    double exclusion_radius = 0;
    Eigen::VectorXd witness;          // instability witness, empty otherwise
};

struct StabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    StabilityEvidence evidence;
    GridSpec grid;
};

namespace detail {

inline std::vector<Eigen::VectorXd> unit_directions(int n, int count, unsigned seed = 12345u) {
    std::vector<Eigen::VectorXd> dirs;
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * M_PI * k / count;
            dirs.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
        }
        return dirs;
    }
    for (int a = 0; a < n; ++a) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[a] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(dirs.size()) < count) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        if (v.norm() > 1e-6) dirs.push_back(v.normalized());
    }
    return dirs;
}

}  // namespace detail

inline StabilityVerdict classify_equilibrium(const Decomposition& d,
                                             const LyapunovCandidate& V,
                                             const GridSpec& region, double tol = 1e-6) {
    const int n = d.f.dimension();
    if (region.dim() != n) throw DimensionMismatch("region dimension does not match field");
    if (!d.certificate.certified)
        throw UncertifiedDecomposition(
            "decomposition certificate does not pass; classify on a certified split");
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
    if (d.f(origin).cwiseAbs().maxCoeff() > tol)
        throw NotAnEquilibrium("f(0) is not zero within tolerance");
    for (int a = 0; a < n; ++a)
        if (!(region.lo[a] < 0.0 && 0.0 < region.hi[a]))
            throw Error("origin must lie strictly inside the region");

    double ball = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) ball = std::min(ball, std::min(-region.lo[a], region.hi[a]));
    const double exclusion = 2.0 * region.max_spacing();

    // one sweep; per-point radius, V, |g|
    std::vector<double> radii, vs, gn;
    region.for_each([&](std::int64_t, const Eigen::VectorXd& x) {
        const double r = x.norm();
        if (r <= exclusion || r > ball) return;
        radii.push_back(r);
        vs.push_back(V.value(x));
        gn.push_back(d.g(x).norm());
    });

    StabilityVerdict out;
    out.grid = region;
    out.evidence.exclusion_radius = exclusion;
    if (!vs.empty()) {
        out.evidence.min_v_off_origin = *std::min_element(vs.begin(), vs.end());
        out.evidence.min_gnorm_off_origin = *std::min_element(gn.begin(), gn.end());
    }

    // shrinking candidate neighbourhoods
    double best_ls = -1.0, best_as = -1.0;
    for (int k = 0; k < 7; ++k) {
        const double rk = ball * std::pow(2.0, -0.5 * k);
        if (rk <= 2.0 * exclusion) break;
        double min_v = std::numeric_limits<double>::infinity();
        double min_g = std::numeric_limits<double>::infinity();
        int count = 0;
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (radii[i] <= rk) {
                min_v = std::min(min_v, vs[i]);
                min_g = std::min(min_g, gn[i]);
                ++count;
            }
        if (count < 30) break;
        if (min_v > tol) {
            if (best_ls < 0) best_ls = rk;
            if (min_g > tol && best_as < 0) best_as = rk;
        }
        if (best_as > 0) break;
    }
    if (best_as > 0) {
        out.verdict = Verdict::AsymptoticallyStable;
        out.evidence.certified_ball_radius = best_as;
        return out;
    }
    if (best_ls > 0) {
        out.verdict = Verdict::LyapunovStable;
        out.evidence.certified_ball_radius = best_ls;
        return out;
    }

    // instability scan: V must dip below zero on every shrinking shell
    // (scaled quadratically, so the test is resolution independent) while g
    // stays nonzero on the punctured ball (scaled linearly).
    const auto dirs = detail::unit_directions(n, 64);
    bool all_shells_negative = true;
    bool g_nonzero = true;
    Eigen::VectorXd witness;
    for (int j = 1; j <= 12 && all_shells_negative && g_nonzero; ++j) {
        const double rj = ball * std::pow(2.0, -j);
        double shell_min = std::numeric_limits<double>::infinity();
        Eigen::VectorXd shell_arg;
        for (const auto& u : dirs) {
            const Eigen::VectorXd x = rj * u;
            const double v = V.value(x);
            if (v < shell_min) {
                shell_min = v;
                shell_arg = x;
            }
            if (d.g(x).norm() <= tol * rj) g_nonzero = false;
        }
        if (shell_min <= -tol * rj * rj)
            witness = shell_arg;
        else
            all_shells_negative = false;
    }
    if (all_shells_negative && g_nonzero && witness.size() == n) {
        out.verdict = Verdict::Unstable;
        out.evidence.witness = witness;
        return out;
    }
    out.verdict = Verdict::Inconclusive;
    return out;
}

// ---- domain of attraction ----

struct DAConditionReport {
    bool v_positive_inside = false;
    double min_v_inside = 0;
    bool g_nonzero_inside = false;
    double min_gnorm_inside = 0;
    bool boundary_on_zero_locus = false;
    double max_frontier_distance = 0;  // filled-frontier cell to nearest refined zero
    double frontier_threshold = 0;
    double max_gnorm_at_boundary = 0;  // over refined boundary zeros
    double boundary_gnorm_tolerance = 0;
    bool sublevel_bounded = false;     // fill stayed strictly inside the search box
    bool radially_unbounded_attested = false;
    bool ray_heuristic_ok = true;      // warning-level only
    std::string failure;               // first failing certificate condition
    Eigen::VectorXd witness;
    std::vector<std::string> warnings;
};

struct DAEstimate {
    double level = 0;  // c
    std::vector<Eigen::VectorXd> zeros;     // refined g-zeros in the search region
    std::vector<Eigen::VectorXd> boundary;  // zeros at level ~ c (angle-sorted in 2D)
    DAConditionReport report;
    bool certified = false;
    GridSpec grid;
};

struct DAOptions {
    bool attest_radially_unbounded = false;
    int newton_max_iterations = 50;
    double newton_tolerance = 1e-10;
    int max_seeds = 4096;
};

namespace detail {

// Damped Gauss-Newton on g(x) = 0; least-squares step so rank-deficient
// Jacobians (zero manifolds of positive codimension) stay harmless.
inline bool refine_zero(const VectorFieldDef& g, Eigen::VectorXd& x, const GridSpec& box,
                        int max_iter, double gtol) {
    const int n = g.dimension();
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd gv = g(x);
        const double gnorm = gv.norm();
        if (gnorm <= gtol) return true;
        Eigen::MatrixXd J(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) J(i, j) = g.partial(i, j + 1).evaluate(x);
        Eigen::VectorXd step = J.colPivHouseholderQr().solve(-gv);
        if (!step.allFinite()) return false;
        double scale = 1.0;
        Eigen::VectorXd next;
        for (int halvings = 0; halvings < 12; ++halvings) {
            next = x + scale * step;
            bool inside = true;
            for (int a = 0; a < n; ++a) {
                const double margin = 0.5 * (box.hi[a] - box.lo[a]);
                if (next[a] < box.lo[a] - margin || next[a] > box.hi[a] + margin) inside = false;
            }
            if (inside && g(next).norm() < gnorm) break;
            scale *= 0.5;
            next = x + scale * step;
        }
        x = next;
    }
    return g(x).norm() <= gtol;
}

}  // namespace detail

inline DAEstimate estimate_da(const Decomposition& d, const LyapunovCandidate& V,
                              const GridSpec& search, double tol = 1e-6,
                              const DAOptions& options = {}) {
    const int n = d.f.dimension();
    const StabilityVerdict verdict = classify_equilibrium(d, V, search, tol);
    if (verdict.verdict != Verdict::AsymptoticallyStable)
        throw CertificateFailure(
            "equilibrium is not asymptotically stable on a sub-region of the search box "
            "(verdict: " + std::string(to_string(verdict.verdict)) + ")");

    const double exclusion = 2.0 * search.max_spacing();
    double cell_diag = 0.0;
    for (int a = 0; a < n; ++a) cell_diag += search.spacing(a) * search.spacing(a);
    cell_diag = std::sqrt(cell_diag);

    // 1. sweep: cache V and |g| per grid point, collect Newton seeds
    const std::int64_t total = search.total_points();
    std::vector<double> vvals(static_cast<std::size_t>(total));
    std::vector<double> gvals(static_cast<std::size_t>(total));
    double max_gnorm = 0.0;
    search.for_each([&](std::int64_t i, const Eigen::VectorXd& x) {
        vvals[static_cast<std::size_t>(i)] = V.value(x);
        const double gn = d.g(x).norm();
        gvals[static_cast<std::size_t>(i)] = gn;
        max_gnorm = std::max(max_gnorm, gn);
    });

    const double seed_threshold = std::max(10.0 * tol, 0.05 * max_gnorm);
    std::vector<std::int64_t> seeds;
    for (std::int64_t i = 0; i < total; ++i) {
        const Eigen::VectorXd x = search.point(i);
        if (x.norm() <= exclusion) continue;
        if (gvals[static_cast<std::size_t>(i)] <= seed_threshold) seeds.push_back(i);
    }
    std::sort(seeds.begin(), seeds.end(), [&](std::int64_t a, std::int64_t b) {
        const double ga = gvals[static_cast<std::size_t>(a)];
        const double gb = gvals[static_cast<std::size_t>(b)];
        if (ga != gb) return ga < gb;
        return a < b;
    });
    if (static_cast<int>(seeds.size()) > options.max_seeds) seeds.resize(static_cast<std::size_t>(options.max_seeds));

    DAEstimate est;
    est.grid = search;
    est.report.radially_unbounded_attested = options.attest_radially_unbounded;

    // 2. Newton refinement; keep interior, off-origin, deduplicated zeros
    std::vector<Eigen::VectorXd> zeros;
    bool dropped_exterior = false;
    for (const std::int64_t s : seeds) {
        Eigen::VectorXd x = search.point(s);
        if (!detail::refine_zero(d.g, x, search, options.newton_max_iterations,
                                 options.newton_tolerance))
            continue;
        if (x.norm() <= exclusion) continue;  // converged to the equilibrium itself
        bool interior = true;
        for (int a = 0; a < n; ++a)
            if (x[a] < search.lo[a] + search.spacing(a) || x[a] > search.hi[a] - search.spacing(a))
                interior = false;
        if (!interior) {
            dropped_exterior = true;
            continue;
        }
        bool dup = false;
        for (const auto& z : zeros)
            if ((z - x).norm() < 0.75 * cell_diag) {
                dup = true;
                break;
            }
        if (!dup) zeros.push_back(x);
    }
    if (zeros.empty()) {
        std::string msg =
            "no finite certified level within search region: no zeros of g found off the "
            "origin (if the attractor boundary lies outside the region, enlarge it)";
        if (dropped_exterior)
            msg += "; candidate zeros hit the search boundary";
        throw NoZeroLocus(msg);
    }
    est.zeros = zeros;

    // 3. candidate level
    double c = std::numeric_limits<double>::infinity();
    for (const auto& z : zeros) c = std::min(c, V.value(z));
    est.level = c;

    const double level_band = 1e-6 * std::max(1.0, std::abs(c));
    for (const auto& z : zeros)
        if (V.value(z) <= c + level_band) est.boundary.push_back(z);
    if (n == 2)
        std::sort(est.boundary.begin(), est.boundary.end(),
                  [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                      return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
                  });
    for (const auto& z : est.boundary)
        est.report.max_gnorm_at_boundary = std::max(est.report.max_gnorm_at_boundary,
                                                    d.g(z).norm());
    est.report.boundary_gnorm_tolerance = 1e-6 * std::max(1.0, max_gnorm);

    // 4. flood-fill the origin's path component of {V < c}, barred at the
    //    refined zero locus
    std::vector<std::uint8_t> barrier(static_cast<std::size_t>(total), 0);
    for (const auto& z : est.boundary) {
        std::vector<std::int64_t> lo_idx(static_cast<std::size_t>(n)), hi_idx(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) {
            const double r = cell_diag;
            lo_idx[static_cast<std::size_t>(a)] = std::max<std::int64_t>(
                0, static_cast<std::int64_t>(std::floor((z[a] - r - search.lo[a]) / search.spacing(a))));
            hi_idx[static_cast<std::size_t>(a)] = std::min<std::int64_t>(
                search.res[static_cast<std::size_t>(a)] - 1,
                static_cast<std::int64_t>(std::ceil((z[a] + r - search.lo[a]) / search.spacing(a))));
        }
        std::vector<std::int64_t> idx = lo_idx;
        for (;;) {
            const std::int64_t flat = search.flat_index(idx);
            if ((search.point(flat) - z).norm() <= cell_diag)
                barrier[static_cast<std::size_t>(flat)] = 1;
            int a = 0;
            while (a < n) {
                if (++idx[static_cast<std::size_t>(a)] <= hi_idx[static_cast<std::size_t>(a)]) break;
                idx[static_cast<std::size_t>(a)] = lo_idx[static_cast<std::size_t>(a)];
                ++a;
            }
            if (a == n) break;
        }
    }

    std::vector<std::uint8_t> filled(static_cast<std::size_t>(total), 0);
    std::queue<std::int64_t> frontier_queue;
    const std::int64_t origin_cell = search.nearest_index(Eigen::VectorXd::Zero(n));
    est.report.sublevel_bounded = true;
    if (vvals[static_cast<std::size_t>(origin_cell)] < c && !barrier[static_cast<std::size_t>(origin_cell)]) {
        filled[static_cast<std::size_t>(origin_cell)] = 1;
        frontier_queue.push(origin_cell);
    }
    while (!frontier_queue.empty()) {
        const std::int64_t i = frontier_queue.front();
        frontier_queue.pop();
        const auto idx = search.multi_index(i);
        for (int a = 0; a < n; ++a) {
            for (int dir = -1; dir <= 1; dir += 2) {
                auto nb = idx;
                nb[static_cast<std::size_t>(a)] += dir;
                if (nb[static_cast<std::size_t>(a)] < 0 ||
                    nb[static_cast<std::size_t>(a)] >= search.res[static_cast<std::size_t>(a)])
                    continue;
                const std::int64_t j = search.flat_index(nb);
                if (filled[static_cast<std::size_t>(j)] || barrier[static_cast<std::size_t>(j)]) continue;
                if (vvals[static_cast<std::size_t>(j)] >= c) continue;
                filled[static_cast<std::size_t>(j)] = 1;
                bool on_face = false;
                for (int b = 0; b < n; ++b)
                    if (nb[static_cast<std::size_t>(b)] == 0 ||
                        nb[static_cast<std::size_t>(b)] == search.res[static_cast<std::size_t>(b)] - 1)
                        on_face = true;
                if (on_face && est.report.sublevel_bounded) {
                    est.report.sublevel_bounded = false;
                    est.report.failure = "sublevel path component reaches the search boundary";
                    est.report.witness = search.point(j);
                }
                frontier_queue.push(j);
            }
        }
    }

    // 5. certificate conditions on the component
    est.report.min_v_inside = std::numeric_limits<double>::infinity();
    est.report.min_gnorm_inside = std::numeric_limits<double>::infinity();
    est.report.frontier_threshold = 2.5 * cell_diag;
    std::int64_t interior_cells = 0;
    for (std::int64_t i = 0; i < total; ++i) {
        if (!filled[static_cast<std::size_t>(i)]) continue;
        const Eigen::VectorXd x = search.point(i);
        if (x.norm() > exclusion) ++interior_cells;
        if (x.norm() > exclusion) {
            if (vvals[static_cast<std::size_t>(i)] < est.report.min_v_inside) {
                est.report.min_v_inside = vvals[static_cast<std::size_t>(i)];
                if (vvals[static_cast<std::size_t>(i)] <= 0.0 && est.report.failure.empty()) {
                    est.report.failure = "V is not positive on the component off the origin";
                    est.report.witness = x;
                }
            }
            if (gvals[static_cast<std::size_t>(i)] < est.report.min_gnorm_inside) {
                est.report.min_gnorm_inside = gvals[static_cast<std::size_t>(i)];
                if (gvals[static_cast<std::size_t>(i)] <= tol && est.report.failure.empty()) {
                    est.report.failure = "g vanishes inside the component off the origin";
                    est.report.witness = x;
                }
            }
        }
        // frontier cell: any axis neighbour outside the fill
        const auto idx = search.multi_index(i);
        bool is_frontier = false;
        for (int a = 0; a < n && !is_frontier; ++a)
            for (int dir = -1; dir <= 1 && !is_frontier; dir += 2) {
                auto nb = idx;
                nb[static_cast<std::size_t>(a)] += dir;
                if (nb[static_cast<std::size_t>(a)] < 0 ||
                    nb[static_cast<std::size_t>(a)] >= search.res[static_cast<std::size_t>(a)]) {
                    is_frontier = true;
                    continue;
                }
                if (!filled[static_cast<std::size_t>(search.flat_index(nb))]) is_frontier = true;
            }
        if (is_frontier && x.norm() > exclusion) {
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& z : est.boundary) dist = std::min(dist, (x - z).norm());
            est.report.max_frontier_distance = std::max(est.report.max_frontier_distance, dist);
        }
    }
    est.report.v_positive_inside = est.report.min_v_inside > 0.0;
    est.report.g_nonzero_inside = est.report.min_gnorm_inside > tol;
    est.report.boundary_on_zero_locus =
        est.report.max_frontier_distance <= est.report.frontier_threshold;
    if (!est.report.boundary_on_zero_locus && est.report.failure.empty())
        est.report.failure = "component frontier strays from the zero locus of g";
    if (interior_cells == 0) {
        // the fill never left the origin's exclusion ball: the level is not
        // positive, or the grid is far too coarse; every check above would
        // pass vacuously
        est.report.v_positive_inside = false;
        if (est.report.failure.empty()) {
            est.report.failure =
                "sublevel component contains no grid point off the origin (level " +
                std::to_string(c) + " too small or grid too coarse)";
            est.report.witness = Eigen::VectorXd::Zero(n);
        }
    }

    // 6. radial unboundedness: warning-level ray heuristic + user attestation
    const auto dirs = detail::unit_directions(n, 16);
    for (const auto& u : dirs) {
        double tmax = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (u[a] > 1e-12) tmax = std::min(tmax, search.hi[a] / u[a]);
            if (u[a] < -1e-12) tmax = std::min(tmax, search.lo[a] / u[a]);
        }
        double prev = -std::numeric_limits<double>::infinity();
        bool increasing = true;
        for (int k = 1; k <= 16; ++k) {
            const double v = V.value((tmax * k / 16.0) * u);
            if (v < prev - 1e-9 * (1.0 + std::abs(prev))) increasing = false;
            prev = v;
        }
        if (!increasing) {
            est.report.ray_heuristic_ok = false;
            est.report.warnings.push_back(
                "V is not monotone along a sampled ray to the search boundary; radial "
                "unboundedness could not be corroborated");
            break;
        }
    }
    if (!options.attest_radially_unbounded)
        est.report.warnings.push_back(
            "radial unboundedness not attested; certificate withheld (sampling cannot "
            "establish it)");

    est.certified = est.report.v_positive_inside && est.report.g_nonzero_inside &&
                    est.report.boundary_on_zero_locus && est.report.sublevel_bounded &&
                    options.attest_radially_unbounded;
    return est;
}

}  // namespace orthlyap

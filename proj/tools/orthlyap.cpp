// orthlyap command-line front end.
//
// Subcommands: analyze-linear, enumerate, analyze-nonlinear, estimate-da,
// simulate, verify. Structured input/output is JSON; dense grids and
// trajectories are CSV. Exit codes: 0 ok, 2 input error, 3 numerical
// failure, 4 capability limit.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "orthlyap/orthlyap.hpp"

namespace fs = std::filesystem;
using orthlyap::json;

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    double tol = 1e-6;            // classification / DA tolerance
    double partition_tol = 1e-8;  // zero-sum eigenvalue tolerance
    int grid_res = 0;             // 0 = keep the file's / default resolution
    long long seed = 0;
    bool no_timestamp = false;
    std::int64_t grid_cap = orthlyap::default_grid_cap;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw orthlyap::Error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw orthlyap::Error("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

json report_header(const GlobalOptions& g, const std::string& command, json input_echo) {
    json r;
    r["tool"] = "orthlyap";
    r["version"] = orthlyap::version_string;
    r["schema_version"] = orthlyap::report_schema_version;
    if (!g.no_timestamp) r["generated_at"] = timestamp_utc();
    r["seed"] = g.seed;
    r["command"] = command;
    r["input"] = std::move(input_echo);
    return r;
}

void write_report(const GlobalOptions& g, const json& report) {
    fs::create_directories(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / "report.json";
    std::ofstream out(path);
    if (!out) throw orthlyap::Error("cannot open '" + path.string() + "' for writing");
    out << report.dump(2) << '\n';
}

orthlyap::GridSpec resolve_region(const orthlyap::SystemFile& sys, const GlobalOptions& g) {
    orthlyap::GridSpec region = sys.region ? *sys.region
                                           : orthlyap::default_region(sys.n, g.grid_cap);
    if (g.grid_res > 0)
        region = orthlyap::GridSpec::box(
            region.lo, region.hi,
            std::vector<int>(static_cast<std::size_t>(sys.n), g.grid_res), g.grid_cap);
    return region;
}

// Decomposition + Lyapunov candidate for any system kind.
struct Analysis {
    orthlyap::Decomposition decomposition;
    orthlyap::LyapunovCandidate candidate;
    std::optional<orthlyap::SareSolution> sare;  // linear systems only
};

Analysis analyze_system(const orthlyap::SystemFile& sys, const orthlyap::GridSpec& region,
                        const GlobalOptions& g) {
    using namespace orthlyap;
    switch (sys.kind) {
        case SystemKind::Linear: {
            SareSolution s = construct_G(*sys.F, g.partition_tol);
            Decomposition d = decomposition_from_linear(*sys.F, s.G, &region);
            LyapunovCandidate V = lyapunov_quadratic(s.G);
            return {std::move(d), std::move(V), std::move(s)};
        }
        case SystemKind::Ansatz2D: {
            Decomposition d = build_ansatz_2d(*sys.ansatz2d, &region);
            LyapunovCandidate V = lyapunov_from_gradient_field(d.g);
            return {std::move(d), std::move(V), std::nullopt};
        }
        case SystemKind::AnsatzND: {
            Decomposition d = build_ansatz_nd(*sys.ansatzNd, &region);
            LyapunovCandidate V = lyapunov_from_gradient_field(d.g);
            return {std::move(d), std::move(V), std::nullopt};
        }
        case SystemKind::Expressions: {
            if (!sys.g || !sys.h)
                throw Error(
                    "kind \"expressions\" carries no decomposition: supply \"g\" and \"h\" "
                    "arrays or use an ansatz kind");
            auto f = VectorFieldDef::from_expressions(*sys.f);
            auto gf = VectorFieldDef::from_expressions(*sys.g);
            auto hf = VectorFieldDef::from_expressions(*sys.h);
            auto cert = verify_decomposition(f, gf, hf, region);
            Decomposition d{std::move(gf), std::move(hf), std::move(f), std::move(cert)};
            LyapunovCandidate V = lyapunov_from_gradient_field(d.g);
            return {std::move(d), std::move(V), std::nullopt};
        }
    }
    throw orthlyap::Error("unreachable system kind");
}

void write_field_csv(const GlobalOptions& g, const Analysis& a,
                     const orthlyap::GridSpec& region) {
    const int n = a.decomposition.f.dimension();
    if (n > 3) return;
    std::vector<std::string> names;
    for (const char* base : {"f", "g", "h"})
        for (int i = 1; i <= n; ++i) names.push_back(std::string(base) + std::to_string(i));
    names.emplace_back("V");
    const fs::path path = fs::path(g.out_dir) / "field.csv";
    fs::create_directories(g.out_dir);
    orthlyap::write_grid_csv(path.string(), region, names,
                             [&](const Eigen::VectorXd& x, std::vector<double>& row) {
                                 const Eigen::VectorXd fv = a.decomposition.f(x);
                                 const Eigen::VectorXd gv = a.decomposition.g(x);
                                 const Eigen::VectorXd hv = a.decomposition.h(x);
                                 for (int i = 0; i < n; ++i) row.push_back(fv[i]);
                                 for (int i = 0; i < n; ++i) row.push_back(gv[i]);
                                 for (int i = 0; i < n; ++i) row.push_back(hv[i]);
                                 row.push_back(a.candidate.value(x));
                             });
}

json lyapunov_to_json(const orthlyap::LyapunovCandidate& V) {
    json out;
    out["kind"] = V.kind == orthlyap::LyapunovCandidate::Kind::QuadraticForm
                      ? "quadratic-form"
                      : "line-integral";
    if (V.kind == orthlyap::LyapunovCandidate::Kind::QuadraticForm) {
        out["definiteness"] = to_string(V.definiteness);
        json eigs = json::array();
        for (Eigen::Index i = 0; i < V.neg_g_eigenvalues.size(); ++i)
            eigs.push_back(V.neg_g_eigenvalues[i]);
        out["neg_g_eigenvalues"] = std::move(eigs);
    }
    return out;
}

// ---- subcommands ----

int cmd_analyze_linear(const GlobalOptions& g, const std::string& system_path,
                       const std::string& matrix_path) {
    using namespace orthlyap;
    SystemFile sys;
    json echo;
    if (!system_path.empty()) {
        echo = load_json_file(system_path);
        sys = system_from_json(echo, g.grid_cap);
        if (sys.kind != SystemKind::Linear)
            throw Error("analyze-linear expects a system file of kind \"linear\"");
    } else {
        echo = load_json_file(matrix_path);
        Eigen::MatrixXd F = matrix_from_json<double>(echo, "matrix");
        if (F.rows() != F.cols()) throw Error("matrix must be square");
        sys.name = fs::path(matrix_path).stem().string();
        sys.n = static_cast<int>(F.rows());
        sys.kind = SystemKind::Linear;
        sys.F = std::move(F);
    }
    const GridSpec region = resolve_region(sys, g);
    const Analysis a = analyze_system(sys, region, g);
    const StabilityVerdict verdict =
        classify_equilibrium(a.decomposition, a.candidate, region, g.tol);

    json report = report_header(g, "analyze-linear", std::move(echo));
    report["sare"] = sare_solution_to_json(*sys.F, *a.sare);
    report["decomposition"] = certificate_to_json(a.decomposition.certificate);
    report["lyapunov"] = lyapunov_to_json(a.candidate);
    report["verdict"] = verdict_to_json(verdict);

    fs::create_directories(g.out_dir);
    {
        std::ofstream out(fs::path(g.out_dir) / "G.json");
        out << matrix_to_json(a.sare->G).dump(2) << '\n';
    }
    write_field_csv(g, a, region);
    write_report(g, report);
    return 0;
}

int cmd_enumerate(const GlobalOptions& g, const std::string& matrix_path,
                  const std::string& jordan_path, int max_dim) {
    using namespace orthlyap;
    const json echo = load_json_file(matrix_path);
    Eigen::MatrixXd F = matrix_from_json<double>(echo, "matrix");
    if (F.rows() != F.cols()) throw Error("matrix must be square");

    std::optional<JordanData> jordan;
    if (!jordan_path.empty()) jordan = jordan_from_json(load_json_file(jordan_path));

    std::vector<SareSolution> sols;
    try {
        sols = enumerate_care_solutions(F, jordan, max_dim, g.partition_tol);
    } catch (const JordanRequired& e) {
        std::cerr << "error: " << e.what()
                  << "\nhint: pass --jordan <file> with the chain structure of "
                     "T = [[-F, 2I], [0, F^T]]\n";
        return 4;
    }

    json report = report_header(g, "enumerate", echo);
    json list = json::array();
    for (const auto& s : sols) list.push_back(sare_solution_to_json(F, s));
    report["solution_count"] = sols.size();
    report["solutions"] = std::move(list);
    write_report(g, report);
    return 0;
}

int cmd_analyze_nonlinear(const GlobalOptions& g, const std::string& system_path) {
    using namespace orthlyap;
    const json echo = load_json_file(system_path);
    const SystemFile sys = system_from_json(echo, g.grid_cap);
    const GridSpec region = resolve_region(sys, g);
    const Analysis a = analyze_system(sys, region, g);
    const StabilityVerdict verdict =
        classify_equilibrium(a.decomposition, a.candidate, region, g.tol);

    json report = report_header(g, "analyze-nonlinear", echo);
    if (a.sare) report["sare"] = sare_solution_to_json(*sys.F, *a.sare);
    report["decomposition"] = certificate_to_json(a.decomposition.certificate);
    report["lyapunov"] = lyapunov_to_json(a.candidate);
    report["verdict"] = verdict_to_json(verdict);
    write_field_csv(g, a, region);
    write_report(g, report);
    return 0;
}

int cmd_estimate_da(const GlobalOptions& g, const std::string& system_path, bool attest,
                    const std::string& basin_rings, int basin_samples) {
    using namespace orthlyap;
    const json echo = load_json_file(system_path);
    const SystemFile sys = system_from_json(echo, g.grid_cap);
    const GridSpec region = resolve_region(sys, g);
    const Analysis a = analyze_system(sys, region, g);

    json report = report_header(g, "estimate-da", echo);
    report["decomposition"] = certificate_to_json(a.decomposition.certificate);

    DAOptions opt;
    opt.attest_radially_unbounded = attest;
    try {
        const DAEstimate est = estimate_da(a.decomposition, a.candidate, region, g.tol, opt);
        report["da"] = da_to_json(est);
        if (!est.boundary.empty()) {
            fs::create_directories(g.out_dir);
            write_boundary_csv((fs::path(g.out_dir) / "boundary.csv").string(), est.boundary);
        }
    } catch (const NoZeroLocus& e) {
        report["da"] = json{{"status", "no-finite-level"}, {"message", e.what()}};
    }
    write_report(g, report);

    // optional empirical corroboration by ring sampling
    if (!basin_rings.empty()) {
        std::vector<double> radii;
        std::stringstream ss(basin_rings);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                radii.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw Error("--basin-rings entry '" + item + "' is not a number");
            }
        }
        const auto samples = sample_basin(a.decomposition.f, radii, basin_samples, 100.0);
        fs::create_directories(g.out_dir);
        write_basin_csv((fs::path(g.out_dir) / "basin.csv").string(), samples);
        int converged = 0, escaped = 0, undecided = 0;
        for (const auto& s : samples) {
            if (s.outcome == BasinSample::Outcome::Converged) ++converged;
            else if (s.outcome == BasinSample::Outcome::Escaped) ++escaped;
            else ++undecided;
        }
        report["basin"] = json{{"rings", radii},
                               {"samples_per_ring", basin_samples},
                               {"converged", converged},
                               {"escaped", escaped},
                               {"undecided", undecided}};
        write_report(g, report);  // rewrite with the basin summary included
    }
    return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& system_path,
                 const std::string& x0_text, double t_max, double dt) {
    using namespace orthlyap;
    const json echo = load_json_file(system_path);
    const SystemFile sys = system_from_json(echo, g.grid_cap);

    Eigen::VectorXd x0(sys.n);
    {
        std::stringstream ss(x0_text);
        std::string item;
        int i = 0;
        while (std::getline(ss, item, ',')) {
            if (i >= sys.n) throw Error("--x0 has more than n components");
            try {
                x0[i++] = std::stod(item);
            } catch (const std::exception&) {
                throw Error("--x0 component '" + item + "' is not a number");
            }
        }
        if (i != sys.n) throw Error("--x0 needs exactly n comma-separated components");
    }

    // attach V whenever the system carries a decomposition
    std::optional<Analysis> analysis;
    VectorFieldDef f = [&]() {
        if (sys.kind == SystemKind::Expressions && !sys.g)
            return VectorFieldDef::from_expressions(*sys.f);
        const GridSpec region = resolve_region(sys, g);
        analysis = analyze_system(sys, region, g);
        return analysis->decomposition.f;
    }();

    const Trajectory tr =
        integrate(f, x0, t_max, dt, analysis ? &analysis->candidate : nullptr);

    json report = report_header(g, "simulate", echo);
    report["x0"] = point_to_json(x0);
    report["t_max"] = t_max;
    report["dt"] = dt;
    report["termination"] = to_string(tr.termination);
    report["steps"] = tr.times.size();
    report["final_time"] = tr.final_time();
    report["final_state"] = point_to_json(tr.final_state());
    report["final_norm"] = tr.final_state().norm();
    if (!tr.eval_error.empty()) report["eval_error"] = tr.eval_error;
    if (analysis) {
        const MonotonicityReport mono = check_monotone_V(tr, analysis->decomposition, 1e-9);
        report["v_monotone"] = json{{"monotone_ok", mono.monotone_ok},
                                    {"pointwise_ok", mono.pointwise_ok},
                                    {"max_pointwise_rel_error", mono.max_pointwise_rel_error},
                                    {"steps_checked", mono.steps_checked}};
    }

    fs::create_directories(g.out_dir);
    write_trajectory_csv((fs::path(g.out_dir) / "trajectory.csv").string(), tr);
    write_report(g, report);
    return 0;
}

int cmd_verify(const GlobalOptions& g, const std::string& system_path) {
    using namespace orthlyap;
    const json echo = load_json_file(system_path);
    const SystemFile sys = system_from_json(echo, g.grid_cap);
    if (sys.kind != SystemKind::Expressions || !sys.g || !sys.h)
        throw Error("verify expects kind \"expressions\" with \"f\", \"g\" and \"h\"");
    const GridSpec region = resolve_region(sys, g);
    const auto f = VectorFieldDef::from_expressions(*sys.f);
    const auto gf = VectorFieldDef::from_expressions(*sys.g);
    const auto hf = VectorFieldDef::from_expressions(*sys.h);
    const auto cert = verify_decomposition(f, gf, hf, region);

    json report = report_header(g, "verify", echo);
    report["decomposition"] = certificate_to_json(cert);
    write_report(g, report);
    return 0;  // the verification outcome lives in the report
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov functions from orthogonal vector field decompositions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand

    GlobalOptions g;
    if (const char* cap = std::getenv("ORTHLYAP_MAX_GRID")) {
        try {
            g.grid_cap = std::stoll(cap);
        } catch (const std::exception&) {
            std::cerr << "error: ORTHLYAP_MAX_GRID is not an integer\n";
            return 2;
        }
    }
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--tol", g.tol, "classification / DA tolerance")->capture_default_str();
    app.add_option("--partition-tol", g.partition_tol,
                   "zero-sum eigenvalue pairing tolerance")
        ->capture_default_str();
    app.add_option("--grid-res", g.grid_res, "override grid resolution per axis");
    app.add_option("--seed", g.seed, "sampling seed recorded in the report")
        ->capture_default_str();
    app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp from report.json");

    std::string system_path, matrix_path, jordan_path, x0_text;
    int max_dim = 4;
    bool attest = false;
    double t_max = 100.0, dt = 1e-2;

    auto* lin = app.add_subcommand("analyze-linear",
                                   "solve the quadratic matrix equation and classify x' = Fx");
    lin->add_option("--system", system_path, "system file (kind \"linear\")");
    lin->add_option("--matrix", matrix_path, "bare matrix JSON file");

    auto* enu = app.add_subcommand("enumerate", "enumerate all real solutions G");
    enu->add_option("--matrix", matrix_path, "bare matrix JSON file")->required();
    enu->add_option("--jordan", jordan_path, "explicit Jordan data for T");
    enu->add_option("--max-dim", max_dim, "enumeration dimension cap")->capture_default_str();

    auto* non = app.add_subcommand("analyze-nonlinear",
                                   "build/verify a decomposition and classify the origin");
    non->add_option("--system", system_path, "system file")->required();

    auto* da = app.add_subcommand("estimate-da", "certify the domain of attraction");
    da->add_option("--system", system_path, "system file")->required();
    da->add_flag("--attest-radially-unbounded", attest,
                 "user attestation that V is radially unbounded");
    std::string basin_rings;
    int basin_samples = 64;
    da->add_option("--basin-rings", basin_rings,
                   "comma-separated radii for empirical basin sampling (writes basin.csv)");
    da->add_option("--basin-samples", basin_samples, "starts per ring")
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "integrate a trajectory");
    sim->add_option("--system", system_path, "system file")->required();
    sim->add_option("--x0", x0_text, "initial state, comma separated")->required();
    sim->add_option("--tmax", t_max, "integration horizon")->capture_default_str();
    sim->add_option("--dt", dt, "fixed step size")->capture_default_str();

    auto* ver = app.add_subcommand("verify", "check a conjectured split f = g + h");
    ver->add_option("--system", system_path, "system file with f, g, h")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (lin->parsed()) {
            if (system_path.empty() == matrix_path.empty())
                throw orthlyap::Error("analyze-linear needs exactly one of --system / --matrix");
            return cmd_analyze_linear(g, system_path, matrix_path);
        }
        if (enu->parsed()) return cmd_enumerate(g, matrix_path, jordan_path, max_dim);
        if (non->parsed()) return cmd_analyze_nonlinear(g, system_path);
        if (da->parsed())
            return cmd_estimate_da(g, system_path, attest, basin_rings, basin_samples);
        if (sim->parsed()) return cmd_simulate(g, system_path, x0_text, t_max, dt);
        if (ver->parsed()) return cmd_verify(g, system_path);
        throw orthlyap::Error("no subcommand given");
    } catch (const orthlyap::JordanRequired& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const orthlyap::TooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const orthlyap::NoConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::SingularSylvester& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::IllConditionedInverse& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::SwapIllConditioned& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::TargetNotBlockClosed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::CurlNotZero& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::NotAnEquilibrium& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::UncertifiedDecomposition& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::CertificateFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::NoZeroLocus& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const orthlyap::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

#pragma once

// JSON (de)serialisation for the documented file schemas and CSV writers for
// grids, trajectories, basins and boundary loci.
//
//   matrix:  {"rows": n, "cols": n, "data": [[...], ...]}  row-major; entries
//            are numbers, or [re, im] pairs where complex values are allowed
//   system:  {"name", "n", "kind": "linear"|"expressions"|"ansatz2d"|"ansatzNd",
//             "F": matrix?, "f": [expr]?, "g": [expr]?, "h": [expr]?,
//             "ansatz": {...}?, "region": {"lo": [...], "hi": [...], "res": [...]}?}
//   jordan:  {"P": matrix, "chains": [{"eigenvalue": [re,im], "columns": [...]}]}

#include <complex>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthlyap/decomp.hpp"
#include "orthlyap/error.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/grid.hpp"
#include "orthlyap/riccati.hpp"
#include "orthlyap/sim.hpp"
#include "orthlyap/stability.hpp"

namespace orthlyap {

using json = nlohmann::ordered_json;

// ---- matrices ----

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        data.push_back(std::move(row));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline std::complex<double> complex_from_json(const json& v, const char* what) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw Error(std::string(what) + ": matrix entries must be numbers or [re, im] pairs");
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from_json(const json& j,
                                                                       const char* what) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw Error(std::string(what) + ": expected {\"rows\", \"cols\", \"data\"}");
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096)
        throw Error(std::string(what) + ": rows/cols must be in [1, 4096]");
    const json& data = j.at("data");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows)
        throw Error(std::string(what) + ": data must hold 'rows' rows");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = data[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(std::string(what) + ": every row must hold 'cols' entries");
        for (Eigen::Index jx = 0; jx < cols; ++jx) {
            const std::complex<double> v =
                complex_from_json(row[static_cast<std::size_t>(jx)], what);
            if constexpr (std::is_same_v<Scalar, double>) {
                if (v.imag() != 0.0)
                    throw Error(std::string(what) + ": complex entry in a real matrix");
                m(i, jx) = v.real();
            } else {
                m(i, jx) = v;
            }
        }
    }
    return m;
}

// ---- system files ----

enum class SystemKind { Linear, Expressions, Ansatz2D, AnsatzND };

inline const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::Linear: return "linear";
        case SystemKind::Expressions: return "expressions";
        case SystemKind::Ansatz2D: return "ansatz2d";
        case SystemKind::AnsatzND: return "ansatzNd";
    }
    return "?";
}

struct SystemFile {
    std::string name;
    int n = 0;
    SystemKind kind = SystemKind::Linear;
    std::optional<Eigen::MatrixXd> F;
    std::optional<std::vector<Expr>> f;
    std::optional<std::vector<Expr>> g, h;  // optional conjectured split (verify)
    std::optional<Ansatz2D> ansatz2d;
    std::optional<AnsatzND> ansatzNd;
    std::optional<GridSpec> region;
};

inline GridSpec region_from_json(const json& j, int n, std::int64_t cap) {
    if (!j.contains("lo") || !j.contains("hi"))
        throw Error("region: expected {\"lo\", \"hi\"[, \"res\"]}");
    const auto lo_v = j.at("lo").get<std::vector<double>>();
    const auto hi_v = j.at("hi").get<std::vector<double>>();
    std::vector<int> res(static_cast<std::size_t>(n), 50);
    if (j.contains("res")) res = j.at("res").get<std::vector<int>>();
    if (static_cast<int>(lo_v.size()) != n || static_cast<int>(hi_v.size()) != n ||
        static_cast<int>(res.size()) != n)
        throw Error("region arrays must have length n");
    Eigen::VectorXd lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        lo[a] = lo_v[static_cast<std::size_t>(a)];
        hi[a] = hi_v[static_cast<std::size_t>(a)];
    }
    return GridSpec::box(lo, hi, res, cap);
}

inline SystemFile system_from_json(const json& j, std::int64_t grid_cap = default_grid_cap) {
    SystemFile sys;
    sys.name = j.value("name", std::string("unnamed"));
    if (!j.contains("n") || !j.at("n").is_number_integer() || j.at("n").get<int>() < 1)
        throw Error("system file: positive integer \"n\" required");
    sys.n = j.at("n").get<int>();
    const std::string kind = j.value("kind", std::string());

    const int present = int(j.contains("F")) + int(j.contains("f")) + int(j.contains("ansatz"));
    if (present != 1)
        throw Error("system file: exactly one of \"F\", \"f\", \"ansatz\" must be present");

    auto parse_components = [&](const json& arr, const char* what) {
        if (!arr.is_array() || static_cast<int>(arr.size()) != sys.n)
            throw Error(std::string(what) + " must be an array of n expressions");
        std::vector<Expr> out;
        for (const auto& s : arr) out.push_back(parse_expression(s.get<std::string>(), sys.n));
        return out;
    };

    if (kind == "linear") {
        sys.kind = SystemKind::Linear;
        if (!j.contains("F")) throw Error("kind \"linear\" requires \"F\"");
        Eigen::MatrixXd F = matrix_from_json<double>(j.at("F"), "F");
        if (F.rows() != F.cols()) throw Error("matrix must be square");
        if (F.rows() != sys.n) throw Error("matrix size does not match \"n\"");
        sys.F = std::move(F);
    } else if (kind == "expressions") {
        sys.kind = SystemKind::Expressions;
        if (!j.contains("f")) throw Error("kind \"expressions\" requires \"f\"");
        sys.f = parse_components(j.at("f"), "f");
        if (j.contains("g")) sys.g = parse_components(j.at("g"), "g");
        if (j.contains("h")) sys.h = parse_components(j.at("h"), "h");
    } else if (kind == "ansatz2d") {
        sys.kind = SystemKind::Ansatz2D;
        if (sys.n != 2) throw Error("kind \"ansatz2d\" requires n = 2");
        if (!j.contains("ansatz")) throw Error("kind \"ansatz2d\" requires \"ansatz\"");
        const json& a = j.at("ansatz");
        Ansatz2D an;
        an.theta = parse_expression(a.at("theta").get<std::string>(), 2);
        an.alpha = parse_in_t(a.at("alpha").get<std::string>());
        an.beta = parse_in_t(a.at("beta").get<std::string>());
        sys.ansatz2d = std::move(an);
    } else if (kind == "ansatzNd") {
        sys.kind = SystemKind::AnsatzND;
        if (!j.contains("ansatz")) throw Error("kind \"ansatzNd\" requires \"ansatz\"");
        const json& a = j.at("ansatz");
        AnsatzND an;
        an.n = sys.n;
        an.theta = parse_expression(a.at("theta").get<std::string>(), sys.n);
        an.beta = parse_in_t(a.at("beta").get<std::string>());
        if (a.contains("alpha")) {
            for (const auto& [key, value] : a.at("alpha").items()) {
                const auto comma = key.find(',');
                if (comma == std::string::npos)
                    throw Error("ansatz alpha keys must look like \"i,j\"");
                const int i = std::stoi(key.substr(0, comma));
                const int jj = std::stoi(key.substr(comma + 1));
                an.alpha.emplace(std::make_pair(i, jj), parse_in_t(value.get<std::string>()));
            }
        }
        sys.ansatzNd = std::move(an);
    } else {
        throw Error("system file: unknown kind \"" + kind + "\"");
    }

    if (j.contains("region")) sys.region = region_from_json(j.at("region"), sys.n, grid_cap);
    return sys;
}

inline GridSpec default_region(int n, std::int64_t cap = default_grid_cap) {
    return GridSpec::cube(n, -2.0, 2.0, 50, cap);
}

// ---- Jordan data ----

inline JordanData jordan_from_json(const json& j) {
    if (!j.contains("P") || !j.contains("chains"))
        throw Error("jordan file: expected {\"P\", \"chains\"}");
    JordanData jd;
    jd.P = matrix_from_json<std::complex<double>>(j.at("P"), "P");
    for (const auto& c : j.at("chains")) {
        JordanChain chain;
        chain.eigenvalue = complex_from_json(c.at("eigenvalue"), "eigenvalue");
        chain.columns = c.at("columns").get<std::vector<int>>();
        jd.chains.push_back(std::move(chain));
    }
    return jd;
}

// ---- report fragments ----

inline json certificate_to_json(const DecompositionCertificate& c) {
    return json{{"certified", c.certified},
                {"sum_residual", c.sum_residual},
                {"curl_residual", c.curl_residual},
                {"div_residual", c.div_residual},
                {"orthogonality_residual", c.orth_residual},
                {"tolerance", c.tolerance},
                {"backend", c.backend == Backend::Symbolic ? "symbolic" : "finite-difference"},
                {"conditions",
                 {{"sum", c.sum_ok}, {"curl", c.curl_ok}, {"div", c.div_ok}, {"orthogonality", c.orth_ok}}},
                {"grid_points", c.grid.res.empty() ? 0 : c.grid.total_points()}};
}

inline json verdict_to_json(const StabilityVerdict& v) {
    json evidence{{"min_v_off_origin", v.evidence.min_v_off_origin},
                  {"min_gnorm_off_origin", v.evidence.min_gnorm_off_origin},
                  {"certified_ball_radius", v.evidence.certified_ball_radius},
                  {"exclusion_radius", v.evidence.exclusion_radius}};
    if (v.evidence.witness.size() > 0) {
        json w = json::array();
        for (Eigen::Index i = 0; i < v.evidence.witness.size(); ++i)
            w.push_back(v.evidence.witness[i]);
        evidence["witness"] = std::move(w);
    }
    return json{{"verdict", to_string(v.verdict)}, {"evidence", std::move(evidence)}};
}

inline json point_to_json(const Eigen::VectorXd& x) {
    json out = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x[i]);
    return out;
}

inline json da_to_json(const DAEstimate& e) {
    json boundary = json::array();
    for (const auto& z : e.boundary) boundary.push_back(point_to_json(z));
    json report{{"v_positive_inside", e.report.v_positive_inside},
                {"min_v_inside", e.report.min_v_inside},
                {"g_nonzero_inside", e.report.g_nonzero_inside},
                {"min_gnorm_inside", e.report.min_gnorm_inside},
                {"boundary_on_zero_locus", e.report.boundary_on_zero_locus},
                {"max_frontier_distance", e.report.max_frontier_distance},
                {"frontier_threshold", e.report.frontier_threshold},
                {"max_gnorm_at_boundary", e.report.max_gnorm_at_boundary},
                {"boundary_gnorm_tolerance", e.report.boundary_gnorm_tolerance},
                {"sublevel_bounded", e.report.sublevel_bounded},
                {"radially_unbounded_attested", e.report.radially_unbounded_attested},
                {"ray_heuristic_ok", e.report.ray_heuristic_ok},
                {"warnings", e.report.warnings}};
    if (!e.report.failure.empty()) {
        report["failure"] = e.report.failure;
        if (e.report.witness.size() > 0) report["witness"] = point_to_json(e.report.witness);
    }
    return json{{"level", e.level},
                {"zero_count", e.zeros.size()},
                {"boundary", std::move(boundary)},
                {"report", std::move(report)},
                {"certified", e.certified}};
}

inline json sare_solution_to_json(const Eigen::MatrixXd& F, const SareSolution& s) {
    json out{{"G", matrix_to_json(s.G)},
             {"residual", s.residual},
             {"trace_gap", s.trace_gap},
             {"provenance", to_string(s.provenance)},
             {"symmetric", s.symmetric}};
    if (!s.selected_eigenvalues.empty()) {
        json eigs = json::array();
        for (const auto& l : s.selected_eigenvalues) eigs.push_back({l.real(), l.imag()});
        out["selected_eigenvalues"] = std::move(eigs);
        const TraceIdentityReport t = trace_identity_check(F, s);
        out["trace_identity"] = json{{"lhs", t.lhs},
                                     {"eigenvalue_sum", t.eig_sum_real},
                                     {"gap", t.gap},
                                     {"pass", t.pass}};
    }
    if (!s.warnings.empty()) out["warnings"] = s.warnings;
    return out;
}

// ---- CSV ----

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::function<bool(std::vector<double>&)>& next_row) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    std::vector<double> row;
    while (next_row(row)) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
        row.clear();
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    const auto n = tr.states.cols();
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
    if (!tr.v_values.empty()) header.push_back("V");
    std::size_t k = 0;
    write_csv(path, header, [&](std::vector<double>& row) {
        if (k >= tr.times.size()) return false;
        row.push_back(tr.times[k]);
        for (Eigen::Index i = 0; i < n; ++i)
            row.push_back(tr.states(static_cast<Eigen::Index>(k), i));
        if (!tr.v_values.empty()) row.push_back(tr.v_values[k]);
        ++k;
        return true;
    });
}

inline void write_basin_csv(const std::string& path, const std::vector<BasinSample>& samples) {
    if (samples.empty()) throw Error("no basin samples to write");
    const auto n = samples.front().x0.size();
    std::vector<std::string> header;
    for (Eigen::Index i = 1; i <= n; ++i) header.push_back("x0_" + std::to_string(i));
    header.insert(header.end(), {"outcome", "final_time", "final_norm"});
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& s : samples) {
        for (Eigen::Index i = 0; i < n; ++i) out << s.x0[i] << ',';
        out << to_string(s.outcome) << ',' << s.final_time << ',' << s.final_norm << '\n';
    }
}

inline void write_boundary_csv(const std::string& path,
                               const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) throw Error("no boundary points to write");
    const auto n = points.front().size();
    std::vector<std::string> header;
    for (Eigen::Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
    std::size_t k = 0;
    write_csv(path, header, [&](std::vector<double>& row) {
        if (k >= points.size()) return false;
        for (Eigen::Index i = 0; i < n; ++i) row.push_back(points[k][i]);
        ++k;
        return true;
    });
}

// Grid sweep of named scalar quantities: header x1..xn,<names...>
inline void write_grid_csv(const std::string& path, const GridSpec& grid,
                           const std::vector<std::string>& names,
                           const std::function<void(const Eigen::VectorXd&, std::vector<double>&)>& eval) {
    std::vector<std::string> header;
    for (int i = 1; i <= grid.dim(); ++i) header.push_back("x" + std::to_string(i));
    header.insert(header.end(), names.begin(), names.end());
    std::int64_t k = 0;
    const std::int64_t total = grid.total_points();
    write_csv(path, header, [&](std::vector<double>& row) {
        if (k >= total) return false;
        const Eigen::VectorXd x = grid.point(k);
        for (int i = 0; i < grid.dim(); ++i) row.push_back(x[i]);
        std::vector<double> vals;
        eval(x, vals);
        row.insert(row.end(), vals.begin(), vals.end());
        ++k;
        return true;
    });
}

}  // namespace orthlyap

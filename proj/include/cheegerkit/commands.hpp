#ifndef CHEEGERKIT_COMMANDS_HPP
#define CHEEGERKIT_COMMANDS_HPP

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "audit.hpp"
#include "cheeger.hpp"
#include "fem.hpp"
#include "geometry.hpp"
#include "perturbation.hpp"
#include "report.hpp"
#include "scene.hpp"

namespace cheegerkit {

inline constexpr const char *kToolVersion = "0.1.0";

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandOptions {
    bool oracle = false;
    std::vector<double> resolutions; ///< audit mesh sizes; empty means mesh_h·{4, 2, 1}
    unsigned threads = 0;            ///< sweep concurrency cap; 0 means hardware concurrency
};

/// Everything a command produces. `document` is the deterministic result
/// file; timings stay in `stages` and only reach the manifest.
struct CommandResult {
    std::string op;
    nlohmann::json document;
    std::vector<Artifact> artifacts;
    std::vector<std::pair<std::string, double>> stages;
};

namespace detail {

class StageClock {
public:
    explicit StageClock(CommandResult &r) : r_(r) {}

    template <class F>
    auto operator()(const std::string &name, F &&f) {
        auto t0 = std::chrono::steady_clock::now();
        struct Record {
            StageClock *self;
            std::string name;
            std::chrono::steady_clock::time_point t0;
            ~Record() {
                std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
                self->r_.stages.emplace_back(name, dt.count());
            }
        } rec{this, name, t0};
        return f();
    }

private:
    CommandResult &r_;
};

inline VolumeGrid scene_grid(const Scene &s) {
    return s.container.is_cylinder() ? rasterize(s.subgraph(), s.delta) : rasterize(s.sector(), s.delta);
}

inline nlohmann::json cheeger_json(const CheegerResult &r) {
    nlohmann::json v;
    put(v, "h", r.h);
    v["iterations"] = r.iterations;
    v["method"] = to_string(r.method);
    v["touched_relative_boundary"] = r.touched_relative_boundary;
    v["minimizer_cells"] = r.minimizer.count();
    v["inside_cells"] = r.minimizer.grid().inside_count();
    put(v, "minimizer_volume", volume(r.minimizer));
    put(v, "minimizer_perimeter", relative_perimeter(r.minimizer));
    v["lambdas"] = nlohmann::json::array();
    for (double l : r.lambdas)
        if (std::isfinite(l)) v["lambdas"].push_back(l);
    return v;
}

// Nodes of ω (closed) in node order, for per-node CSV output.
template <class F>
void for_each_domain_node(const CrossSection &cs, F &&f) {
    for (int j = 0; j < cs.nodes(1); ++j)
        for (int i = 0; i < cs.nodes(0); ++i)
            if (cs.dim() == 1 || cs.contains_closed(cs.node(i, j))) f(i, j, cs.node_index(i, j));
}

inline std::vector<double> default_resolutions(const Scene &s) {
    return {4 * s.mesh_h, 2 * s.mesh_h, s.mesh_h};
}

} // namespace detail

inline CommandResult cmd_curvature(const Scene &s) {
    CommandResult r{"curvature", {}, {}, {}};
    detail::StageClock clock(r);
    const SubgraphDomain dom = s.subgraph();
    const GraphFunction &phi = dom.graph();
    CurvatureField H = clock("curvature", [&] { return mean_curvature(phi); });
    nlohmann::json v;
    put(v, "mean_H", H.mean);
    put(v, "max_H", H.max);
    put(v, "min_H", H.min);
    put(v, "stddev_H", H.stddev);
    v["nodes"] = H.values.size();
    put(v, "orthogonality_residual", orthogonality_residual(phi));
    r.document = v;
    const bool planar = phi.dim() == 1;
    CsvWriter csv(planar ? std::vector<std::string>{"x", "H"} : std::vector<std::string>{"x", "y", "H"});
    for (std::size_t k = 0; k < H.values.size(); ++k) {
        if (planar) csv.row({H.nodes[k].x, H.values[k]});
        else csv.row({H.nodes[k].x, H.nodes[k].y, H.values[k]});
    }
    r.artifacts.push_back({"curvature.csv", csv.str()});
    return r;
}

inline CommandResult cmd_minkowski(const Scene &s) {
    CommandResult r{"minkowski", {}, {}, {}};
    detail::StageClock clock(r);
    const SubgraphDomain dom = s.subgraph();
    const GraphFunction &phi = dom.graph();
    MinkowskiTerms t = clock("minkowski", [&] { return minkowski_check(phi); });
    nlohmann::json v;
    put(v, "lhs", t.lhs);
    put(v, "rhs", t.rhs);
    put(v, "boundary_term", t.boundary_term);
    put(v, "difference", t.lhs - t.rhs);
    put(v, "identity_defect", t.lhs - (t.rhs - t.boundary_term));
    put(v, "orthogonality_residual", orthogonality_residual(phi));
    r.document = v;
    return r;
}

inline CommandResult cmd_cheeger(const Scene &s, const CommandOptions &opt) {
    CommandResult r{"cheeger", {}, {}, {}};
    detail::StageClock clock(r);
    VolumeGrid grid = clock("rasterize", [&] { return detail::scene_grid(s); });
    CheegerResult res = clock("solve", [&] { return opt.oracle ? cheeger_bruteforce(grid) : cheeger_dinkelbach(grid); });
    r.document = detail::cheeger_json(res);
    r.artifacts.push_back({"cheeger_mask.pgm", mask_pgm(res.minimizer)});
    return r;
}

inline CommandResult cmd_self_cheeger(const Scene &s, const CommandOptions &opt) {
    CommandResult r{"self-cheeger", {}, {}, {}};
    detail::StageClock clock(r);
    VolumeGrid grid = clock("rasterize", [&] { return detail::scene_grid(s); });
    SelfCheegerResult res = clock("solve", [&] { return self_cheeger_test(grid, opt.oracle); });
    nlohmann::json v = detail::cheeger_json(res.result);
    v["is_self_cheeger"] = res.is_self_cheeger;
    put(v, "h", res.h);
    put(v, "ratio_omega", res.ratio_omega);
    v["witness_cells"] = res.witness.count();
    r.document = v;
    r.artifacts.push_back({"self_cheeger_witness.pgm", mask_pgm(res.witness)});
    return r;
}

inline CommandResult cmd_witness(const Scene &s) {
    CommandResult r{"witness", {}, {}, {}};
    detail::StageClock clock(r);
    const SubgraphDomain dom = s.subgraph();
    const GraphFunction &phi = dom.graph();
    Witness w = clock("witness", [&] { return non_self_cheeger_witness(phi); });
    nlohmann::json v;
    put(v, "delta", w.delta);
    put(v, "alpha", w.alpha);
    put(v, "t", w.t);
    put(v, "old_ratio", w.old_ratio);
    put(v, "new_ratio", w.new_ratio);
    put(v, "margin", w.old_ratio - w.new_ratio);
    put(v, "v_log_scale", w.v_log_scale);
    v["halvings"] = w.halvings;
    r.document = v;
    const CrossSection &cs = phi.cross_section();
    CsvWriter csv({"x", "y", "phi", "v"});
    detail::for_each_domain_node(cs, [&](int i, int j, std::size_t n) {
        Point2 p = cs.node(i, j);
        csv.row({p.x, p.y, phi.values()[n], w.v[n]});
    });
    r.artifacts.push_back({"witness.csv", csv.str()});
    return r;
}

inline CommandResult cmd_torsion(const Scene &s) {
    CommandResult r{"torsion", {}, {}, {}};
    detail::StageClock clock(r);
    TriangleMesh mesh = clock("mesh", [&] { return triangulate(s.subgraph(), s.mesh_h); });
    ScalarField u = clock("solve", [&] { return solve_torsion(mesh); });
    TorsionCertificate c = clock("certificate", [&] { return torsion_certificate(mesh, u); });
    nlohmann::json v;
    put(v, "c_est", c.c_est);
    put(v, "overdet_residual", c.overdet_residual);
    put(v, "grad_bound_margin", c.grad_bound_margin);
    put(v, "volume_identity_gap", c.volume_identity_gap);
    put(v, "max_P", c.max_P);
    put(v, "max_P_on_relative_boundary", c.max_P_on_relative_boundary);
    put(v, "max_u", *std::max_element(u.values.begin(), u.values.end()));
    v["nodes"] = mesh.nodes.size();
    v["triangles"] = mesh.triangles.size();
    put(v, "min_angle_deg", mesh.min_angle_deg);
    r.document = v;
    CsvWriter csv({"x", "y", "u"});
    for (std::size_t k = 0; k < mesh.nodes.size(); ++k) csv.row({mesh.nodes[k].x, mesh.nodes[k].y, u.values[k]});
    r.artifacts.push_back({"torsion.csv", csv.str()});
    CsvWriter pcsv({"centroid_x", "centroid_y", "P"});
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto &tri = mesh.triangles[t];
        double x = (mesh.nodes[tri[0]].x + mesh.nodes[tri[1]].x + mesh.nodes[tri[2]].x) / 3.0;
        double y = (mesh.nodes[tri[0]].y + mesh.nodes[tri[1]].y + mesh.nodes[tri[2]].y) / 3.0;
        pcsv.row({x, y, c.P[t]});
    }
    r.artifacts.push_back({"p_function.csv", pcsv.str()});
    return r;
}

inline CommandResult cmd_eigen(const Scene &s) {
    CommandResult r{"eigen", {}, {}, {}};
    detail::StageClock clock(r);
    TriangleMesh mesh = clock("mesh", [&] { return triangulate(s.subgraph(), s.mesh_h); });
    EigenCertificate e = clock("solve", [&] { return solve_eigen(mesh); });
    VolumeGrid grid = clock("rasterize", [&] { return detail::scene_grid(s); });
    CheegerResult h = clock("cheeger", [&] { return cheeger_dinkelbach(grid); });
    attach_bound(e, h.h);
    nlohmann::json v;
    put(v, "lambda1", e.lambda1);
    put(v, "rayleigh", e.rayleigh);
    v["iterations"] = e.iterations;
    put(v, "cheeger_h", h.h);
    put(v, "cheeger_bound", e.cheeger_bound);
    v["bound_satisfied"] = e.bound_satisfied;
    r.document = v;
    CsvWriter csv({"x", "y", "eigenfunction"});
    for (std::size_t k = 0; k < mesh.nodes.size(); ++k)
        csv.row({mesh.nodes[k].x, mesh.nodes[k].y, e.eigenfunction.values[k]});
    r.artifacts.push_back({"eigenfunction.csv", csv.str()});
    return r;
}

inline CommandResult cmd_audit(const Scene &s, const CommandOptions &opt) {
    CommandResult r{"audit", {}, {}, {}};
    detail::StageClock clock(r);
    AuditOptions ao;
    ao.grid_delta = s.delta;
    auto res = opt.resolutions.empty() ? detail::default_resolutions(s) : opt.resolutions;
    AuditReport rep = clock("audit", [&] { return overdetermined_audit(s.container, *s.phi, res, ao); });
    r.document = to_json(rep);
    r.artifacts.push_back({"convergence.csv", convergence_csv(rep)});
    return r;
}

/// One sweep row; fields stay NaN when a stage fails or does not apply.
struct SweepRow {
    double value = NAN;
    double h = NAN;
    double lambda1 = NAN;
    double bound = NAN;
    double bound_satisfied = NAN;
    double c_est = NAN;
    double overdet_residual = NAN;
    double grad_lhs = NAN;
    double grad_rhs = NAN;
    double grad_satisfied = NAN;
    std::string error;
};

inline SweepRow sweep_row(const Scene &base, const std::string &param, double value) {
    SweepRow row;
    row.value = value;
    auto note = [&](const Error &e) {
        if (row.error.empty()) row.error = e.what();
    };
    std::optional<Scene> s;
    try {
        s = with_parameter(base, param, value);
    } catch (const Error &e) {
        note(e);
        return row;
    }
    try {
        row.h = cheeger_dinkelbach(detail::scene_grid(*s)).h;
    } catch (const Error &e) {
        note(e);
    }
    if (!s->phi) return row;
    try {
        auto g = gradient_necessary_condition(*s->phi);
        row.grad_lhs = g.lhs;
        row.grad_rhs = g.rhs;
        row.grad_satisfied = g.satisfied ? 1.0 : 0.0;
    } catch (const Error &e) {
        note(e);
    }
    try {
        TriangleMesh mesh = triangulate(s->subgraph(), s->mesh_h);
        auto e = solve_eigen(mesh);
        row.lambda1 = e.lambda1;
        if (std::isfinite(row.h)) {
            auto b = cheeger_eigen_bound(e.lambda1, row.h);
            row.bound = b.bound;
            row.bound_satisfied = b.satisfied ? 1.0 : 0.0;
        }
        auto c = torsion_certificate(mesh, solve_torsion(mesh));
        row.c_est = c.c_est;
        row.overdet_residual = c.overdet_residual;
    } catch (const Error &e) {
        note(e);
    }
    return row;
}

inline unsigned sweep_threads(unsigned requested) {
    if (requested == 0) {
        if (const char *env = std::getenv("CHEEGERKIT_THREADS")) {
            char *end = nullptr;
            long n = std::strtol(env, &end, 10);
            require(end != env && *end == '\0' && n > 0, ErrorKind::parse, "CHEEGERKIT_THREADS must be a positive integer");
            requested = unsigned(n);
        }
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

inline CommandResult cmd_sweep(const Scene &s, const CommandOptions &opt) {
    CommandResult r{"sweep", {}, {}, {}};
    detail::StageClock clock(r);
    require(s.sweep.has_value(), ErrorKind::parse, "sweep needs a 'sweep' block in the scene");
    require(!s.sweep->values.empty(), ErrorKind::resolution, "sweep range is empty");
    const auto &vals = s.sweep->values;
    const unsigned threads = sweep_threads(opt.threads);
    std::vector<SweepRow> rows(vals.size());
    clock("rows", [&] {
        // batches of `threads` rows; results land in parameter order regardless of finish order
        for (std::size_t start = 0; start < vals.size(); start += threads) {
            std::vector<std::future<SweepRow>> batch;
            for (std::size_t k = start; k < std::min(vals.size(), start + threads); ++k)
                batch.push_back(std::async(std::launch::async, sweep_row, std::cref(s), s.sweep->param, vals[k]));
            for (std::size_t k = 0; k < batch.size(); ++k) rows[start + k] = batch[k].get();
        }
        return 0;
    });
    CsvWriter csv({"param", "value", "h", "lambda1", "bound", "bound_satisfied", "c_est", "overdet_residual",
                   "grad_lhs", "grad_rhs", "grad_satisfied", "error"});
    nlohmann::json v;
    v["param"] = s.sweep->param;
    v["rows"] = nlohmann::json::array();
    for (const auto &row : rows) {
        csv.row_strings({s.sweep->param, format_number(row.value), format_number(row.h), format_number(row.lambda1),
                         format_number(row.bound), format_number(row.bound_satisfied), format_number(row.c_est),
                         format_number(row.overdet_residual), format_number(row.grad_lhs),
                         format_number(row.grad_rhs), format_number(row.grad_satisfied),
                         // errors are free text; keep the CSV single-field
                         [&] {
                             std::string e = row.error;
                             std::replace(e.begin(), e.end(), ',', ';');
                             return e;
                         }()});
        nlohmann::json j;
        put(j, "value", row.value);
        put(j, "h", row.h);
        put(j, "lambda1", row.lambda1);
        put(j, "bound", row.bound);
        if (std::isfinite(row.bound_satisfied)) j["bound_satisfied"] = row.bound_satisfied > 0.5;
        put(j, "c_est", row.c_est);
        put(j, "overdet_residual", row.overdet_residual);
        put(j, "grad_lhs", row.grad_lhs);
        put(j, "grad_rhs", row.grad_rhs);
        if (std::isfinite(row.grad_satisfied)) j["grad_satisfied"] = row.grad_satisfied > 0.5;
        if (!row.error.empty()) j["error"] = row.error;
        v["rows"].push_back(j);
    }
    // first adjacent pair where the gradient condition changes verdict
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double a = rows[k - 1].grad_satisfied, b = rows[k].grad_satisfied;
        if (std::isfinite(a) && std::isfinite(b) && a != b) {
            v["grad_flip_between"] = {rows[k - 1].value, rows[k].value};
            break;
        }
    }
    r.document = v;
    r.artifacts.push_back({"sweep.csv", csv.str()});
    return r;
}

inline const std::vector<std::string> &command_names() {
    static const std::vector<std::string> names{"curvature", "minkowski", "cheeger", "self-cheeger", "witness",
                                                "torsion",   "eigen",     "audit",   "sweep"};
    return names;
}

/// Dispatches by name and wraps the values as {"op", "inputs_digest", "values"}.
inline CommandResult run_command(const std::string &op, const Scene &s, const CommandOptions &opt = {}) {
    CommandResult r;
    if (op == "curvature") r = cmd_curvature(s);
    else if (op == "minkowski") r = cmd_minkowski(s);
    else if (op == "cheeger") r = cmd_cheeger(s, opt);
    else if (op == "self-cheeger") r = cmd_self_cheeger(s, opt);
    else if (op == "witness") r = cmd_witness(s);
    else if (op == "torsion") r = cmd_torsion(s);
    else if (op == "eigen") r = cmd_eigen(s);
    else if (op == "audit") r = cmd_audit(s, opt);
    else if (op == "sweep") r = cmd_sweep(s, opt);
    else fail(ErrorKind::parse, "unknown command '" + op + "'");
    nlohmann::json inputs = s.source;
    inputs["op"] = op;
    if (opt.oracle) inputs["oracle"] = true;
    if (op == "audit") {
        auto res = opt.resolutions.empty() ? detail::default_resolutions(s) : opt.resolutions;
        inputs["resolutions"] = res;
    }
    nlohmann::json doc;
    doc["op"] = op;
    doc["inputs_digest"] = digest(inputs);
    doc["values"] = std::move(r.document);
    r.document = std::move(doc);
    return r;
}

/// Timing and bookkeeping sidecar; the only output that varies between runs.
inline nlohmann::json manifest(const CommandResult &r, const std::string &result_file) {
    nlohmann::json m;
    m["command"] = r.op;
    m["scene_digest"] = r.document.value("inputs_digest", "");
    m["tool_version"] = kToolVersion;
    m["outputs"] = nlohmann::json::array({result_file});
    for (const auto &a : r.artifacts) m["outputs"].push_back(a.name);
    m["stages"] = nlohmann::json::object();
    for (const auto &[name, secs] : r.stages) m["stages"][name] = secs;
    return m;
}

} // namespace cheegerkit

#endif

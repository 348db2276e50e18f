#ifndef CHEEGERKIT_AUDIT_HPP
#define CHEEGERKIT_AUDIT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cheeger.hpp"
#include "domain.hpp"
#include "errors.hpp"
#include "fem.hpp"
#include "geometry.hpp"
#include "perturbation.hpp"
#include "triangle_mesh.hpp"
#include "volume_grid.hpp"

namespace cheegerkit {

enum class AuditStatus { pass, fail, warn, not_applicable };

inline std::string to_string(AuditStatus s) {
    switch (s) {
    case AuditStatus::pass: return "pass";
    case AuditStatus::fail: return "fail";
    case AuditStatus::warn: return "warn";
    case AuditStatus::not_applicable: return "n.a.";
    }
    return "?";
}

struct AuditEntry {
    std::string check;
    AuditStatus status = AuditStatus::pass;
    std::map<std::string, double> values;
    std::map<std::string, std::string> notes;
    std::string property; ///< the property being checked, in words
};

struct ConvergenceRow {
    double mesh_h = 0.0;
    double c_est = 0.0;
    double overdet_residual = 0.0;
    double volume_gap = 0.0;
    double margin = 0.0;
    double rate = NAN; ///< observed order of overdet_residual against the previous row
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    std::vector<ConvergenceRow> convergence;

    const AuditEntry *find(const std::string &name) const {
        for (const auto &e : entries)
            if (e.check == name) return &e;
        return nullptr;
    }
};

struct AuditOptions {
    double grid_delta = 1.0 / 64; ///< Cheeger rasterization step
    double orthogonality_tol = 1e-3;
    double overdet_rel_tol = 0.02; ///< overdetermined when max |∂u/∂ν + c| ≤ tol·c at the finest mesh
    double cmc_tol = 1e-3;
    bool parallel = true; ///< run the per-resolution torsion solves concurrently
};

namespace detail {

inline AuditEntry entry(std::string check, std::string ref) {
    AuditEntry e;
    e.check = std::move(check);
    e.property = std::move(ref);
    return e;
}

inline AuditEntry not_applicable(std::string check, std::string ref, std::string reason) {
    AuditEntry e = entry(std::move(check), std::move(ref));
    e.status = AuditStatus::not_applicable;
    e.notes["reason"] = std::move(reason);
    return e;
}

struct TorsionRun {
    double h;
    std::optional<TorsionCertificate> cert;
    double mesh_size = 0.0;
    std::string error;
};

inline TorsionRun run_torsion(const SubgraphDomain &dom, double h) {
    TorsionRun r{h, std::nullopt, 0.0, {}};
    try {
        TriangleMesh m = triangulate(dom, h);
        r.mesh_size = m.mesh_size;
        r.cert = torsion_certificate(m, solve_torsion(m));
    } catch (const Error &e) {
        r.error = e.what();
    }
    return r;
}

} // namespace detail

/// Runs every checkable consequence of overdetermined solvability on Ω_φ and
/// records one entry per check. Failures inside a stage become entry statuses;
/// the report always completes.
inline AuditReport overdetermined_audit(const Container &container, const GraphFunction &phi,
                                        std::vector<double> resolutions, const AuditOptions &opt = {}) {
    require(container.is_cylinder(), ErrorKind::unsupported_domain, "the audit needs a cylinder container");
    require(!resolutions.empty(), ErrorKind::resolution, "the audit needs at least one mesh size");
    std::sort(resolutions.begin(), resolutions.end(), std::greater<>());
    const SubgraphDomain dom = build_subgraph_domain(container, phi);
    const int N = dom.dimension();
    const bool convex = container.convex();
    AuditReport rep;
    auto &E = rep.entries;

    // geometry
    const double orth = orthogonality_residual(phi);
    const bool orthogonal = orth <= opt.orthogonality_tol;
    {
        auto e = detail::entry("orthogonality", "graph meets the container wall orthogonally");
        e.values["residual"] = orth;
        e.values["tolerance"] = opt.orthogonality_tol;
        e.status = orthogonal ? AuditStatus::pass : AuditStatus::warn;
        E.push_back(std::move(e));
    }
    std::optional<CurvatureField> H;
    {
        auto e = detail::entry("mean_curvature", "mean curvature of the graph");
        try {
            H = mean_curvature(phi);
            e.values["mean"] = H->mean;
            e.values["max"] = H->max;
            e.values["min"] = H->min;
            e.values["stddev"] = H->stddev;
        } catch (const Error &err) {
            e.status = AuditStatus::fail;
            e.notes["error"] = err.what();
        }
        E.push_back(std::move(e));
    }
    if (H && orthogonal && H->stddev <= opt.cmc_tol) {
        // an orthogonal CMC graph must be flat: H = 0 and φ constant
        auto e = detail::entry("cmc_flatness", "orthogonal constant-mean-curvature graphs are flat");
        double mean = 0.0, var = 0.0;
        for (double v : phi.values()) mean += v;
        mean /= double(phi.values().size());
        for (double v : phi.values()) var += (v - mean) * (v - mean);
        double rel_sd = std::sqrt(var / double(phi.values().size())) / mean;
        e.values["abs_mean_H"] = std::abs(H->mean);
        e.values["phi_rel_stddev"] = rel_sd;
        e.status = std::abs(H->mean) <= opt.cmc_tol && rel_sd <= 1e-2 ? AuditStatus::pass : AuditStatus::fail;
        E.push_back(std::move(e));
    } else {
        E.push_back(detail::not_applicable("cmc_flatness", "orthogonal constant-mean-curvature graphs are flat",
                                           "graph is not orthogonal and CMC within tolerance"));
    }
    {
        auto e = detail::entry("minkowski", "Minkowski formula for graphs with its boundary term");
        try {
            auto m = minkowski_check(phi);
            e.values["lhs"] = m.lhs;
            e.values["rhs"] = m.rhs;
            e.values["boundary_term"] = m.boundary_term;
            double gap = std::abs(m.lhs - (m.rhs - m.boundary_term));
            e.values["identity_gap"] = gap;
            e.status = gap <= 1e-3 * std::max(1.0, std::abs(m.rhs)) ? AuditStatus::pass : AuditStatus::fail;
        } catch (const Error &err) {
            e.status = AuditStatus::fail;
            e.notes["error"] = err.what();
        }
        E.push_back(std::move(e));
    }

    // PDE stages, N = 2 only
    std::optional<TorsionCertificate> cert;
    double finest_mesh = 0.0;
    std::optional<EigenCertificate> eig;
    bool overdetermined = false;
    if (N != 2) {
        const std::string why = "unsupported-dimension: PDE solves are available for N = 2 only";
        for (const char *name : {"torsion", "gradient_bound", "p_function_bound", "volume_identity", "eigen"})
            E.push_back(detail::not_applicable(name, "mixed torsion and eigenvalue problems", why));
    } else {
        std::vector<detail::TorsionRun> runs;
        if (opt.parallel) {
            std::vector<std::future<detail::TorsionRun>> fut;
            for (double h : resolutions) fut.push_back(std::async(std::launch::async, detail::run_torsion, dom, h));
            for (auto &f : fut) runs.push_back(f.get());
        } else {
            for (double h : resolutions) runs.push_back(detail::run_torsion(dom, h));
        }
        auto e = detail::entry("torsion", "constant normal derivative of the torsion function on the relative boundary");
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const auto &r = runs[k];
            if (!r.cert) {
                e.notes["error_h=" + std::to_string(r.h)] = r.error;
                continue;
            }
            ConvergenceRow row{r.h, r.cert->c_est, r.cert->overdet_residual, r.cert->volume_identity_gap,
                               r.cert->grad_bound_margin, NAN};
            if (!rep.convergence.empty() && rep.convergence.back().overdet_residual > 0 && row.overdet_residual > 0)
                row.rate = std::log(rep.convergence.back().overdet_residual / row.overdet_residual) /
                           std::log(rep.convergence.back().mesh_h / row.mesh_h);
            rep.convergence.push_back(row);
            cert = r.cert;
            finest_mesh = r.mesh_size;
        }
        if (!cert) {
            e.status = AuditStatus::fail;
            E.push_back(std::move(e));
        } else {
            e.values["c_est"] = cert->c_est;
            e.values["overdet_residual"] = cert->overdet_residual;
            e.values["tolerance"] = opt.overdet_rel_tol * cert->c_est;
            e.values["mesh_h"] = rep.convergence.back().mesh_h;
            overdetermined = cert->overdet_residual <= opt.overdet_rel_tol * cert->c_est;
            e.status = overdetermined ? AuditStatus::pass : AuditStatus::fail;
            E.push_back(std::move(e));
        }
    }
    const std::string hyp = !convex       ? "container is not convex"
                            : !cert       ? "no torsion solution"
                            : "torsion solution is not overdetermined within tolerance";
    const bool theorem_applies = overdetermined && convex;

    if (cert) {
        const double c = cert->c_est;
        const double mesh = finest_mesh;
        if (theorem_applies) {
            auto g = detail::entry("gradient_bound", "gradient of the torsion function is bounded by c");
            g.values["margin"] = cert->grad_bound_margin;
            g.values["tolerance"] = -5.0 * mesh;
            g.status = cert->grad_bound_margin >= -5.0 * mesh ? AuditStatus::pass : AuditStatus::fail;
            E.push_back(std::move(g));
            auto p = detail::entry("p_function_bound", "P-function bounded by c squared, maximum on the relative boundary");
            p.values["max_P"] = cert->max_P;
            p.values["bound"] = c * c * (1.0 + 5.0 * mesh);
            p.values["max_on_relative_boundary"] = cert->max_P_on_relative_boundary ? 1.0 : 0.0;
            p.status = cert->max_P <= c * c * (1.0 + 5.0 * mesh) && cert->max_P_on_relative_boundary
                           ? AuditStatus::pass
                           : AuditStatus::fail;
            E.push_back(std::move(p));
        } else {
            E.push_back(detail::not_applicable("gradient_bound", "gradient of the torsion function is bounded by c", hyp));
            E.push_back(detail::not_applicable("p_function_bound",
                                               "P-function bounded by c squared, maximum on the relative boundary", hyp));
        }
        auto v = detail::entry("volume_identity", "volume equals c times the relative boundary measure");
        const double area = dom.volume();
        v.values["gap"] = cert->volume_identity_gap;
        v.values["volume"] = area;
        v.status = cert->volume_identity_gap <= 1e-2 * area ? AuditStatus::pass : AuditStatus::fail;
        E.push_back(std::move(v));

        auto ee = detail::entry("eigen", "first eigenpair of the mixed Laplacian");
        try {
            TriangleMesh m = triangulate(dom, resolutions.back());
            eig = solve_eigen(m);
            ee.values["lambda1"] = eig->lambda1;
            ee.values["rayleigh"] = eig->rayleigh;
            ee.values["iterations"] = eig->iterations;
            bool positive = true;
            auto dir = m.dirichlet_flags();
            for (std::size_t i = 0; i < m.nodes.size(); ++i)
                if (!dir[i] && eig->eigenfunction.values[i] <= 0) positive = false;
            ee.values["positive"] = positive ? 1.0 : 0.0;
            ee.status = positive && std::abs(eig->rayleigh - eig->lambda1) <= 1e-8 * eig->lambda1 ? AuditStatus::pass
                                                                                               : AuditStatus::fail;
        } catch (const Error &err) {
            ee.status = AuditStatus::fail;
            ee.notes["error"] = err.what();
        }
        E.push_back(std::move(ee));
    } else if (N == 2) {
        for (const char *name : {"gradient_bound", "p_function_bound", "volume_identity", "eigen"})
            E.push_back(detail::not_applicable(name, "mixed torsion and eigenvalue problems", "no torsion solution"));
    }

    // Cheeger stages
    std::optional<SelfCheegerResult> sc;
    {
        auto e = detail::entry("cheeger", "relative Cheeger constant of the domain");
        try {
            VolumeGrid g = rasterize(dom, opt.grid_delta);
            sc = self_cheeger_test(g);
            e.values["h"] = sc->h;
            e.values["iterations"] = sc->result.iterations;
            e.values["grid_delta"] = opt.grid_delta;
            e.values["touches_relative_boundary"] = sc->result.touched_relative_boundary ? 1.0 : 0.0;
        } catch (const Error &err) {
            e.status = AuditStatus::fail;
            e.notes["error"] = err.what();
        }
        E.push_back(std::move(e));
    }
    if (sc) {
        auto e = detail::entry("self_cheeger", "domains with an overdetermined solution are self-Cheeger");
        e.values["is_self_cheeger"] = sc->is_self_cheeger ? 1.0 : 0.0;
        e.values["ratio_omega"] = sc->ratio_omega;
        e.values["h"] = sc->h;
        if (theorem_applies) {
            double target = 1.0 / cert->c_est;
            e.values["inverse_c"] = target;
            bool close = std::abs(sc->h - target) <= 0.03 * target;
            e.status = sc->is_self_cheeger && close ? AuditStatus::pass : AuditStatus::fail;
        } else {
            e.status = sc->is_self_cheeger ? AuditStatus::pass : AuditStatus::warn;
            e.notes["hypothesis"] = hyp;
        }
        E.push_back(std::move(e));
    } else {
        E.push_back(detail::not_applicable("self_cheeger", "domains with an overdetermined solution are self-Cheeger",
                                           "Cheeger solver failed"));
    }
    if (sc && eig) {
        auto b = cheeger_eigen_bound(eig->lambda1, sc->h);
        auto e = detail::entry("cheeger_eigen_bound", "first eigenvalue at least h squared over four");
        e.values["lambda1"] = eig->lambda1;
        e.values["bound"] = b.bound;
        e.status = b.satisfied ? AuditStatus::pass : AuditStatus::fail;
        E.push_back(std::move(e));
    } else {
        E.push_back(detail::not_applicable("cheeger_eigen_bound", "first eigenvalue at least h squared over four",
                                           "needs both the eigenvalue and the Cheeger constant"));
    }

    // curvature consequences
    if (cert && H) {
        auto r = curvature_upper_bound_check(phi, cert->c_est);
        auto e = detail::entry("curvature_upper_bound", "mean curvature below 1/(N c) on the relative boundary");
        e.values["max_H"] = r.max_H;
        e.values["bound"] = r.bound;
        e.values["equality_branch"] = r.equality_branch ? 1.0 : 0.0;
        if (!theorem_applies) {
            e.status = AuditStatus::not_applicable;
            e.notes["reason"] = hyp;
        } else if (r.equality_branch) {
            e.status = AuditStatus::warn;
            e.notes["equality"] = "curvature sits on the bound everywhere";
        } else {
            e.status = r.strict ? AuditStatus::pass : AuditStatus::fail;
        }
        E.push_back(std::move(e));
    } else {
        E.push_back(detail::not_applicable("curvature_upper_bound", "mean curvature below 1/(N c) on the relative boundary",
                                           "needs a torsion solution"));
    }
    if (H) {
        auto r = curvature_bound_check(phi);
        auto e = detail::entry("self_cheeger_curvature", "self-Cheeger orthogonal graphs have curvature below P/((N-1)|Omega|)");
        e.values["max_H"] = r.max_H;
        e.values["bound"] = r.bound;
        if (sc && sc->is_self_cheeger && orthogonal)
            e.status = r.satisfied ? AuditStatus::pass : AuditStatus::fail;
        else {
            e.status = AuditStatus::not_applicable;
            e.notes["reason"] = orthogonal ? "domain is not self-Cheeger" : "graph is not orthogonal";
        }
        E.push_back(std::move(e));
    }
    {
        auto g = gradient_necessary_condition(phi, opt.orthogonality_tol);
        auto e = detail::entry("gradient_condition", "necessary gradient bound for overdetermined graphs");
        e.values["lhs"] = g.lhs;
        e.values["rhs"] = g.rhs;
        e.values["orthogonality"] = g.orthogonality;
        if (!g.hypothesis_ok) {
            e.status = AuditStatus::warn;
            e.notes["warning"] = g.warning;
        } else {
            e.status = g.satisfied ? AuditStatus::pass : AuditStatus::fail;
        }
        if (!phi.cross_section().convex()) e.notes["convexity"] = "cross-section is not convex";
        E.push_back(std::move(e));
    }
    return rep;
}

} // namespace cheegerkit

#endif

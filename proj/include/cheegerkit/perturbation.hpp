#ifndef CHEEGERKIT_PERTURBATION_HPP
#define CHEEGERKIT_PERTURBATION_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "graph_function.hpp"
#include "grid_calculus.hpp"

namespace cheegerkit {

/// First variation of p_v(t) = P_C(Ω_{φ+tv}) and V_v(t) = |Ω_{φ+tv}| at t = 0.
struct PerturbationReport {
    double p0 = 0.0;
    double V0 = 0.0;
    double dp = 0.0;
    double dV = 0.0;
    double criterion = 0.0; ///< dp·V0 − p0·dV; negative means the ratio decreases
};

inline double graph_volume(const GraphFunction &phi) {
    return integrate_cells(phi.cross_section(), phi.values(), [](const CellSample &c) { return c.value; });
}

inline PerturbationReport perturbation_derivative(const GraphFunction &phi, std::span<const double> v) {
    const CrossSection &cs = phi.cross_section();
    require(v.size() == cs.node_count(), ErrorKind::size, "perturbation field has the wrong node count");
    for (double x : v) {
        require(std::isfinite(x), ErrorKind::sign, "perturbation field must be finite");
        require(x <= 0, ErrorKind::sign, "perturbation field must be nonpositive");
    }
    PerturbationReport r;
    r.p0 = surface_area(phi);
    r.V0 = graph_volume(phi);
    r.dp = integrate_cells(cs, phi.values(), v, [](const CellSample &a, const CellSample &b) {
        return dot(a.grad, b.grad) / std::sqrt(1.0 + norm2(a.grad));
    });
    r.dV = integrate_cells(cs, v, [](const CellSample &c) { return c.value; });
    r.criterion = r.dp * r.V0 - r.p0 * r.dV;
    return r;
}

/// −∫_ω v div(∇φ/√(1+|∇φ|²)) dx′, the integrated-by-parts form of dp with the
/// boundary integral dropped. Dimension 1 only: trapezoid weights with the
/// half-cell end curvature, so it differs from dp by exactly the dropped term.
inline double perturbation_by_parts(const GraphFunction &phi, std::span<const double> v) {
    const CrossSection &cs = phi.cross_section();
    require(cs.dim() == 1, ErrorKind::unsupported_dimension, "integrated-by-parts form is implemented for N = 2");
    require(v.size() == cs.node_count(), ErrorKind::size, "perturbation field has the wrong node count");
    auto H = detail::nodal_curvature_1d(phi);
    const int n = cs.cells(0);
    const double h = cs.step(0);
    double s = 0.0;
    // −div F = (N−1) H with N − 1 = 1
    for (int i = 0; i <= n; ++i) s += (i == 0 || i == n ? 0.5 * h : h) * v[std::size_t(i)] * H[std::size_t(i)];
    return s;
}

struct CurvatureBound {
    double max_H = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

/// max H against P_C(Ω_φ)/((N−1)|Ω_φ|), the bound forced on self-Cheeger
/// subgraphs with orthogonal contact.
inline CurvatureBound curvature_bound_check(const GraphFunction &phi, double tolerance = 1e-6) {
    CurvatureField H = mean_curvature(phi);
    CurvatureBound b;
    b.max_H = H.max;
    b.bound = surface_area(phi) / (double(phi.dim()) * graph_volume(phi));
    b.satisfied = b.max_H <= b.bound + tolerance * std::max(1.0, b.bound);
    return b;
}

struct Witness {
    double delta = 0.0;      ///< min nodal |∇φ|
    double alpha = 0.0;
    std::vector<double> v;   ///< −e^{α(φ − max φ)}, the exponential witness up to a positive factor
    double v_log_scale = 0.0; ///< α·max φ: the unscaled witness is v·e^{v_log_scale}
    double t = 0.0;          ///< step along v
    double old_ratio = 0.0;
    double new_ratio = 0.0;
    int halvings = 0;
};

/// Exponential perturbation that strictly lowers P_C/|Ω| for a graph whose
/// gradient never vanishes.
inline Witness non_self_cheeger_witness(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    auto g = nodal_gradient(cs, phi.values());
    Witness w;
    double G = 0.0;
    w.delta = INFINITY;
    for (int j = 0; j < cs.nodes(1); ++j)
        for (int i = 0; i < cs.nodes(0); ++i) {
            if (cs.dim() == 2 && !cs.contains_closed(cs.node(i, j))) continue;
            double m = std::sqrt(norm2(g[cs.node_index(i, j)]));
            w.delta = std::min(w.delta, m);
            G = std::max(G, m);
        }
    require(w.delta > 0, ErrorKind::hypothesis_violated, "gradient of the graph function vanishes at some node");
    const double P = surface_area(phi), V = graph_volume(phi);
    w.old_ratio = P / V;
    w.alpha = 2.0 * P * std::sqrt(1.0 + G * G) / (V * w.delta * w.delta);
    const double top = phi.max();
    w.v_log_scale = w.alpha * top;
    w.v.resize(cs.node_count());
    for (std::size_t k = 0; k < w.v.size(); ++k) w.v[k] = -std::exp(w.alpha * (phi.values()[k] - top));

    const double t0 = 0.5 * phi.min(); // max |v| = 1 after scaling
    for (double t = t0; t / t0 >= 1e-12; t *= 0.5, ++w.halvings) {
        std::vector<double> moved(w.v.size());
        bool positive = true;
        for (std::size_t k = 0; k < moved.size(); ++k) {
            moved[k] = phi.values()[k] + t * w.v[k];
            positive = positive && moved[k] > 0;
        }
        if (!positive) continue;
        GraphFunction next = GraphFunction::from_samples(cs, std::move(moved));
        double r = surface_area(next) / graph_volume(next);
        if (r < w.old_ratio) {
            w.t = t;
            w.new_ratio = r;
            return w;
        }
    }
    fail(ErrorKind::witness_search_failure, "no step down to 1e-12 of the initial step lowered the ratio");
}

} // namespace cheegerkit

#endif

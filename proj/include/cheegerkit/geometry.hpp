#ifndef CHEEGERKIT_GEOMETRY_HPP
#define CHEEGERKIT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "graph_function.hpp"
#include "grid_calculus.hpp"

namespace cheegerkit {

/// Mean curvature of Γ_φ at the grid nodes where the stencil fits.
struct CurvatureField {
    std::vector<Point2> nodes;
    std::vector<double> values;
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    double stddev = 0.0;

    void summarize() {
        if (values.empty()) return;
        double s = 0.0;
        for (double v : values) s += v;
        mean = s / double(values.size());
        double q = 0.0;
        for (double v : values) q += (v - mean) * (v - mean);
        stddev = std::sqrt(q / double(values.size()));
        auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        min = *lo;
        max = *hi;
    }
};

namespace detail {

inline double flux(double g) { return g / std::sqrt(1.0 + g * g); }

// 1D graph: F at half-nodes i+½ (i = 0..n−1) from the node differences.
inline std::vector<double> half_fluxes(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    const int n = cs.cells(0);
    const double h = cs.step(0);
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) f[std::size_t(i)] = flux((phi(i + 1) - phi(i)) / h);
    return f;
}

// 1D graph: H at every node. Interior nodes difference neighbouring half-node
// fluxes; the two end nodes close the difference over a half cell with the
// flux of the one-sided boundary gradient.
inline std::vector<double> nodal_curvature_1d(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    require_stencil(cs);
    const int n = cs.cells(0);
    const double h = cs.step(0);
    auto f = half_fluxes(phi);
    auto g = nodal_gradient(cs, phi.values());
    std::vector<double> H(std::size_t(n) + 1);
    for (int i = 1; i < n; ++i) H[std::size_t(i)] = -(f[std::size_t(i)] - f[std::size_t(i) - 1]) / h;
    H[0] = -(f[0] - flux(g[0][0])) / (0.5 * h);
    H[std::size_t(n)] = -(flux(g[std::size_t(n)][0]) - f[std::size_t(n) - 1]) / (0.5 * h);
    return H;
}

inline bool stencil_in_domain(const CrossSection &cs, int i, int j) {
    if (i < 1 || j < 1 || i >= cs.cells(0) || j >= cs.cells(1)) return false;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
            if (!cs.contains_closed(cs.node(i + di, j + dj))) return false;
    return true;
}

// 2D graph: H at node (i, j), fluxes at the four half-nodes with the
// tangential derivative averaged from the two adjacent central differences.
inline double nodal_curvature_2d(const GraphFunction &phi, int i, int j) {
    const CrossSection &cs = phi.cross_section();
    const double hx = cs.step(0), hy = cs.step(1);
    auto f = [&](int a, int b) { return phi(a, b); };
    auto fx = [&](int a, int b) { // flux x-component at (a+½, b)
        double px = (f(a + 1, b) - f(a, b)) / hx;
        double py = ((f(a, b + 1) - f(a, b - 1)) + (f(a + 1, b + 1) - f(a + 1, b - 1))) / (4.0 * hy);
        return px / std::sqrt(1.0 + px * px + py * py);
    };
    auto fy = [&](int a, int b) { // flux y-component at (a, b+½)
        double py = (f(a, b + 1) - f(a, b)) / hy;
        double px = ((f(a + 1, b) - f(a - 1, b)) + (f(a + 1, b + 1) - f(a - 1, b + 1))) / (4.0 * hx);
        return py / std::sqrt(1.0 + px * px + py * py);
    };
    double div = (fx(i, j) - fx(i - 1, j)) / hx + (fy(i, j) - fy(i, j - 1)) / hy;
    return -0.5 * div;
}

// Sample points on the open edges of ω with outward normals and arc weights.
struct EdgeSample {
    Point2 p;
    Vec2 normal;
    double weight;
};

inline std::vector<EdgeSample> edge_samples(const CrossSection &cs) {
    std::vector<EdgeSample> out;
    const auto &v = cs.vertices();
    const double step = std::min(cs.step(0), cs.step(1));
    for (std::size_t k = 0; k < v.size(); ++k) {
        Point2 a = v[k], b = v[(k + 1) % v.size()];
        double len = std::hypot(b.x - a.x, b.y - a.y);
        int m = std::max(2, int(std::ceil(len / step)));
        Vec2 nrm{(b.y - a.y) / len, -(b.x - a.x) / len};
        for (int s = 0; s < m; ++s) {
            double t = (s + 0.5) / m;
            out.push_back({{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, nrm, len / m});
        }
    }
    return out;
}

} // namespace detail

/// H = −(1/(N−1)) div(∇φ/√(1+|∇φ|²)) on interior nodes, from half-node fluxes.
inline CurvatureField mean_curvature(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    detail::require_stencil(cs);
    CurvatureField out;
    if (cs.dim() == 1) {
        auto H = detail::nodal_curvature_1d(phi);
        for (int i = 1; i < cs.cells(0); ++i) {
            out.nodes.push_back(cs.node(i, 0));
            out.values.push_back(H[std::size_t(i)]);
        }
    } else {
        for (int j = 1; j < cs.cells(1); ++j)
            for (int i = 1; i < cs.cells(0); ++i) {
                if (!detail::stencil_in_domain(cs, i, j)) continue;
                out.nodes.push_back(cs.node(i, j));
                out.values.push_back(detail::nodal_curvature_2d(phi, i, j));
            }
    }
    require(!out.values.empty(), ErrorKind::resolution, "no grid node admits the curvature stencil");
    out.summarize();
    return out;
}

/// max over ∂ω of |∇φ · ν_∂ω|; polygon corners are skipped.
inline double orthogonality_residual(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    auto g = nodal_gradient(cs, phi.values());
    if (cs.dim() == 1) return std::max(std::abs(g.front()[0]), std::abs(g.back()[0]));
    double r = 0.0;
    for (const auto &s : detail::edge_samples(cs)) r = std::max(r, std::abs(dot(interpolate(cs, g, s.p), s.normal)));
    return r;
}

/// H_{N−1}(Γ_φ) = ∫_ω √(1+|∇φ|²) dx′.
inline double surface_area(const GraphFunction &phi) {
    return integrate_cells(phi.cross_section(), phi.values(),
                           [](const CellSample &c) { return std::sqrt(1.0 + norm2(c.grad)); });
}

/// (1/(N−1)) ∫_∂ω φ (∇φ·ν)/√(1+|∇φ|²) dσ; in dim 1 the boundary is two points.
inline double boundary_flux_term(const GraphFunction &phi, bool weight_by_phi = true) {
    const CrossSection &cs = phi.cross_section();
    auto g = nodal_gradient(cs, phi.values());
    if (cs.dim() == 1) {
        const int n = cs.cells(0);
        double wl = weight_by_phi ? phi(0) : 1.0, wr = weight_by_phi ? phi(n) : 1.0;
        return wr * detail::flux(g.back()[0]) - wl * detail::flux(g.front()[0]);
    }
    double s = 0.0;
    for (const auto &e : detail::edge_samples(cs)) {
        Vec2 gi = interpolate(cs, g, e.p);
        double w = weight_by_phi ? phi.evaluate(e.p) : 1.0;
        s += e.weight * w * dot(gi, e.normal) / std::sqrt(1.0 + norm2(gi));
    }
    return 0.5 * s;
}

struct MinkowskiTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    double boundary_term = 0.0;
};

/// Both sides of the graph Minkowski formula and the boundary term that
/// separates them when Γ_φ is not orthogonal to the wall.
///
/// In dim 1 the curvature is weighted by the trapezoid rule with half-cell
/// end values, which makes lhs = rhs − boundary_term hold exactly by summation
/// by parts. In dim 2 the lhs is an interior-node sum (first order).
inline MinkowskiTerms minkowski_check(const GraphFunction &phi) {
    const CrossSection &cs = phi.cross_section();
    detail::require_stencil(cs);
    const double dm1 = double(cs.dim());
    MinkowskiTerms t;
    t.rhs = integrate_cells(cs, phi.values(),
                            [](const CellSample &c) { return norm2(c.grad) / std::sqrt(1.0 + norm2(c.grad)); }) /
            dm1;
    t.boundary_term = boundary_flux_term(phi);
    if (cs.dim() == 1) {
        // ⟨x_N e_N, ν⟩ dσ = φ dx′ on a graph
        auto H = detail::nodal_curvature_1d(phi);
        const int n = cs.cells(0);
        const double h = cs.step(0);
        for (int i = 0; i <= n; ++i) t.lhs += (i == 0 || i == n ? 0.5 * h : h) * H[std::size_t(i)] * phi(i);
    } else {
        const double w = cs.step(0) * cs.step(1);
        for (int j = 1; j < cs.cells(1); ++j)
            for (int i = 1; i < cs.cells(0); ++i)
                if (detail::stencil_in_domain(cs, i, j)) t.lhs += w * detail::nodal_curvature_2d(phi, i, j) * phi(i, j);
    }
    return t;
}

} // namespace cheegerkit

#endif

#ifndef CHEEGERKIT_GRID_CALCULUS_HPP
#define CHEEGERKIT_GRID_CALCULUS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "cross_section.hpp"
#include "errors.hpp"

// Finite differences and midpoint quadrature on the cross-section node grid.

namespace cheegerkit {

using Vec2 = std::array<double, 2>;

/// Value and gradient of a nodal field at the centre of one grid cell.
struct CellSample {
    Point2 center;
    double weight = 0.0;
    double value = 0.0;
    Vec2 grad{0.0, 0.0};
};

namespace detail {

inline void require_stencil(const CrossSection &cs) {
    require(cs.nodes(0) >= 3 && (cs.dim() == 1 || cs.nodes(1) >= 3), ErrorKind::resolution,
            "need at least 3 grid nodes per direction");
}

// Derivative along one axis at node k of a line of n nodes; second-order
// central inside, second-order one-sided at the two ends.
inline double line_derivative(std::span<const double> f, std::size_t stride, int k, int n, double h) {
    auto at = [&](int m) { return f[std::size_t(m) * stride]; };
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

} // namespace detail

/// Gradient at every node of the bounding-box grid.
inline std::vector<Vec2> nodal_gradient(const CrossSection &cs, std::span<const double> f) {
    detail::require_stencil(cs);
    const int nx = cs.nodes(0), ny = cs.nodes(1);
    std::vector<Vec2> g(cs.node_count(), Vec2{0.0, 0.0});
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            auto &gi = g[cs.node_index(i, j)];
            gi[0] = detail::line_derivative(f.subspan(cs.node_index(0, j)), 1, i, nx, cs.step(0));
            if (cs.dim() == 2)
                gi[1] = detail::line_derivative(f.subspan(cs.node_index(i, 0)), std::size_t(nx), j, ny, cs.step(1));
        }
    }
    return g;
}

/// Bilinear (linear in dim 1) interpolation of a nodal vector field.
inline Vec2 interpolate(const CrossSection &cs, std::span<const Vec2> g, Point2 p) {
    auto locate = [&](int axis, double c, int &i, double &s) {
        double u = std::clamp((c - cs.lo(axis)) / cs.step(axis), 0.0, double(cs.cells(axis)));
        i = std::min(int(std::floor(u)), cs.cells(axis) - 1);
        s = u - i;
    };
    int i, j = 0;
    double sx, sy = 0.0;
    locate(0, p.x, i, sx);
    if (cs.dim() == 2) locate(1, p.y, j, sy);
    Vec2 out{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        if (cs.dim() == 1) {
            out[c] = (1 - sx) * g[cs.node_index(i, 0)][c] + sx * g[cs.node_index(i + 1, 0)][c];
        } else {
            out[c] = (1 - sx) * (1 - sy) * g[cs.node_index(i, j)][c] + sx * (1 - sy) * g[cs.node_index(i + 1, j)][c] +
                     (1 - sx) * sy * g[cs.node_index(i, j + 1)][c] + sx * sy * g[cs.node_index(i + 1, j + 1)][c];
        }
    }
    return out;
}

/// Calls f(CellSample) for every grid cell whose centre lies in ω, with the
/// field's average and difference gradient over the cell corners.
template <class F>
void for_each_cell(const CrossSection &cs, std::span<const double> field, F &&f) {
    const double hx = cs.step(0);
    if (cs.dim() == 1) {
        for (int i = 0; i < cs.cells(0); ++i) {
            double a = field[std::size_t(i)], b = field[std::size_t(i) + 1];
            f(CellSample{{cs.lo(0) + (i + 0.5) * hx, 0.0}, hx, 0.5 * (a + b), {(b - a) / hx, 0.0}});
        }
        return;
    }
    const double hy = cs.step(1);
    for (int j = 0; j < cs.cells(1); ++j) {
        for (int i = 0; i < cs.cells(0); ++i) {
            Point2 c{cs.lo(0) + (i + 0.5) * hx, cs.lo(1) + (j + 0.5) * hy};
            if (!cs.contains(c)) continue;
            double f00 = field[cs.node_index(i, j)], f10 = field[cs.node_index(i + 1, j)];
            double f01 = field[cs.node_index(i, j + 1)], f11 = field[cs.node_index(i + 1, j + 1)];
            f(CellSample{c, hx * hy, 0.25 * (f00 + f10 + f01 + f11),
                         {0.5 * ((f10 + f11) - (f00 + f01)) / hx, 0.5 * ((f01 + f11) - (f00 + f10)) / hy}});
        }
    }
}

/// Midpoint quadrature over ω of g(sample).
template <class G>
double integrate_cells(const CrossSection &cs, std::span<const double> field, G &&g) {
    double s = 0.0;
    for_each_cell(cs, field, [&](const CellSample &c) { s += c.weight * g(c); });
    return s;
}

/// Midpoint quadrature of g(sample_a, sample_b) for two nodal fields.
template <class G>
double integrate_cells(const CrossSection &cs, std::span<const double> a, std::span<const double> b, G &&g) {
    std::vector<CellSample> sa;
    for_each_cell(cs, a, [&](const CellSample &c) { sa.push_back(c); });
    double s = 0.0;
    std::size_t k = 0;
    for_each_cell(cs, b, [&](const CellSample &c) { s += c.weight * g(sa[k++], c); });
    return s;
}

inline double norm2(const Vec2 &v) { return v[0] * v[0] + v[1] * v[1]; }
inline double dot(const Vec2 &a, const Vec2 &b) { return a[0] * b[0] + a[1] * b[1]; }

} // namespace cheegerkit

#endif

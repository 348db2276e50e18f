#ifndef CHEEGERKIT_CROSS_SECTION_HPP
#define CHEEGERKIT_CROSS_SECTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace cheegerkit {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

inline double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double signed_area(const std::vector<Point2> &poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 &a = poly[i];
        const Point2 &b = poly[(i + 1) % poly.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    auto sgn = [](double v) { return (v > 0) - (v < 0); };
    int d1 = sgn(cross(q1, q2, p1)), d2 = sgn(cross(q1, q2, p2));
    int d3 = sgn(cross(p1, p2, q1)), d4 = sgn(cross(p1, p2, q2));
    if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
    auto on_seg = [](Point2 a, Point2 b, Point2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    };
    if (d1 == 0 && on_seg(q1, q2, p1)) return true;
    if (d2 == 0 && on_seg(q1, q2, p2)) return true;
    if (d3 == 0 && on_seg(p1, p2, q1)) return true;
    if (d4 == 0 && on_seg(p1, p2, q2)) return true;
    return false;
}

} // namespace detail

/// The base ω of a cylinder: an interval (dim 1) or a simple counterclockwise
/// polygon (dim 2), carrying a uniform node grid over its bounding box whose
/// step never exceeds the requested spacing.
class CrossSection {
public:
    static CrossSection interval(double lo, double hi, double spacing) {
        require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, ErrorKind::invalid_cross_section,
                "interval length must be positive");
        require(spacing > 0 && std::isfinite(spacing), ErrorKind::invalid_cross_section,
                "grid spacing must be positive");
        CrossSection cs;
        cs.dim_ = 1;
        cs.lo_ = {lo, 0.0};
        cs.hi_ = {hi, 0.0};
        cs.spacing_ = spacing;
        cs.cells_ = {cells_for(hi - lo, spacing), 0};
        cs.convex_ = true;
        return cs;
    }

    static CrossSection polygon(std::vector<Point2> vertices, double spacing) {
        require(vertices.size() >= 3, ErrorKind::invalid_cross_section, "polygon needs at least 3 vertices");
        require(spacing > 0 && std::isfinite(spacing), ErrorKind::invalid_cross_section,
                "grid spacing must be positive");
        const double area = detail::signed_area(vertices);
        require(area > 0, ErrorKind::invalid_cross_section,
                "polygon must be non-degenerate and counterclockwise");
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                require(!detail::segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                                    vertices[(j + 1) % n]),
                        ErrorKind::invalid_cross_section, "polygon is not simple");
            }
        }
        CrossSection cs;
        cs.dim_ = 2;
        cs.vertices_ = std::move(vertices);
        cs.lo_ = cs.hi_ = cs.vertices_.front();
        for (const auto &v : cs.vertices_) {
            cs.lo_.x = std::min(cs.lo_.x, v.x);
            cs.lo_.y = std::min(cs.lo_.y, v.y);
            cs.hi_.x = std::max(cs.hi_.x, v.x);
            cs.hi_.y = std::max(cs.hi_.y, v.y);
        }
        cs.spacing_ = spacing;
        cs.cells_ = {cells_for(cs.hi_.x - cs.lo_.x, spacing), cells_for(cs.hi_.y - cs.lo_.y, spacing)};
        cs.convex_ = true;
        bool turned = false;
        for (std::size_t i = 0; i < n; ++i) {
            double c = detail::cross(cs.vertices_[i], cs.vertices_[(i + 1) % n], cs.vertices_[(i + 2) % n]);
            if (c < 0) cs.convex_ = false;
            if (c > 0) turned = true;
        }
        cs.convex_ = cs.convex_ && turned;
        return cs;
    }

    int dim() const noexcept { return dim_; }
    bool convex() const noexcept { return convex_; }
    double spacing() const noexcept { return spacing_; }
    const std::vector<Point2> &vertices() const noexcept { return vertices_; }

    double lo(int axis) const { return axis == 0 ? lo_.x : lo_.y; }
    double hi(int axis) const { return axis == 0 ? hi_.x : hi_.y; }
    double length(int axis) const { return hi(axis) - lo(axis); }

    /// Node intervals along an axis (0 for the unused axis of an interval).
    int cells(int axis) const { return cells_[axis]; }
    int nodes(int axis) const { return cells_[axis] + 1; }
    double step(int axis) const { return cells_[axis] == 0 ? 0.0 : length(axis) / cells_[axis]; }
    std::size_t node_count() const { return std::size_t(nodes(0)) * std::size_t(nodes(1)); }
    std::size_t node_index(int i, int j) const { return std::size_t(j) * std::size_t(nodes(0)) + std::size_t(i); }
    Point2 node(int i, int j) const { return {lo_.x + i * step(0), dim_ == 2 ? lo_.y + j * step(1) : 0.0}; }

    /// |ω|: length (dim 1) or area (dim 2).
    double measure() const {
        return dim_ == 1 ? length(0) : detail::signed_area(vertices_);
    }

    /// Open containment test (ray casting for polygons).
    bool contains(Point2 p) const {
        if (dim_ == 1) return p.x > lo_.x && p.x < hi_.x;
        bool in = false;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point2 &a = vertices_[i], &b = vertices_[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < xi) in = !in;
            }
        }
        return in;
    }

    bool on_boundary(Point2 p, double tol) const {
        if (dim_ == 1) return std::abs(p.x - lo_.x) <= tol || std::abs(p.x - hi_.x) <= tol;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 &a = vertices_[i], &b = vertices_[(i + 1) % n];
            double dx = b.x - a.x, dy = b.y - a.y;
            double len2 = dx * dx + dy * dy;
            double s = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
            double ex = a.x + s * dx - p.x, ey = a.y + s * dy - p.y;
            if (std::sqrt(ex * ex + ey * ey) <= tol) return true;
        }
        return false;
    }

    bool contains_closed(Point2 p) const {
        const double tol = 1e-12 * std::max({1.0, length(0), dim_ == 2 ? length(1) : 0.0});
        return contains(p) || on_boundary(p, tol);
    }

private:
    static int cells_for(double len, double spacing) {
        // nudge keeps exact divisors (1/0.25) from rounding up
        return std::max(1, int(std::ceil(len / spacing - 1e-9)));
    }

    int dim_ = 1;
    Point2 lo_, hi_;
    double spacing_ = 0.0;
    std::array<int, 2> cells_{0, 0};
    bool convex_ = true;
    std::vector<Point2> vertices_;
};

} // namespace cheegerkit

#endif

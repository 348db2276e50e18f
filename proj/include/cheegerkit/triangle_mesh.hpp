#ifndef CHEEGERKIT_TRIANGLE_MESH_HPP
#define CHEEGERKIT_TRIANGLE_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"

namespace cheegerkit {

enum class BoundaryTag { relative, free }; ///< Γ_Ω (graph top) or Γ_{1,Ω} (walls and bottom)

struct BoundaryEdge {
    int a, b;
    BoundaryTag tag;
};

/// Conforming triangulation of a planar Ω_φ.
struct TriangleMesh {
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary;
    double min_angle_deg = 0.0;
    double mesh_size = 0.0; ///< longest edge

    double area(std::size_t t) const {
        const auto &tri = triangles[t];
        return 0.5 * detail::cross(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
    }

    double total_area() const {
        double s = 0.0;
        for (std::size_t t = 0; t < triangles.size(); ++t) s += area(t);
        return s;
    }

    double edge_length(const BoundaryEdge &e) const {
        return std::hypot(nodes[e.b].x - nodes[e.a].x, nodes[e.b].y - nodes[e.a].y);
    }

    double tagged_length(BoundaryTag tag) const {
        double s = 0.0;
        for (const auto &e : boundary)
            if (e.tag == tag) s += edge_length(e);
        return s;
    }

    /// Nodes carrying the Dirichlet condition (endpoints of Γ_Ω edges).
    std::vector<std::uint8_t> dirichlet_flags() const {
        std::vector<std::uint8_t> d(nodes.size(), 0);
        for (const auto &e : boundary)
            if (e.tag == BoundaryTag::relative) d[e.a] = d[e.b] = 1;
        return d;
    }
};

namespace detail {

inline double min_angle(Point2 a, Point2 b, Point2 c) {
    auto angle = [](Point2 o, Point2 p, Point2 q) {
        double ux = p.x - o.x, uy = p.y - o.y, vx = q.x - o.x, vy = q.y - o.y;
        return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

} // namespace detail

/// Structured mesh: the reference grid (x_i, s_j) mapped by (x′, s) ↦ (x′, s·φ(x′)),
/// each quad split along the diagonal that gives the larger minimum angle.
inline TriangleMesh triangulate(const SubgraphDomain &dom, double target_h, double min_angle_deg = 20.0) {
    require(dom.dimension() == 2, ErrorKind::unsupported_dimension, "triangulation is available for N = 2 only");
    require(target_h > 0 && std::isfinite(target_h), ErrorKind::resolution, "mesh size must be positive");
    const CrossSection &cs = dom.cross_section();
    const GraphFunction &phi = dom.graph();
    const int nx = std::max(1, int(std::ceil(cs.length(0) / target_h - 1e-9)));
    const int ny = std::max(1, int(std::ceil(phi.max() / target_h - 1e-9)));
    TriangleMesh m;
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    std::vector<double> top(std::size_t(nx) + 1);
    for (int i = 0; i <= nx; ++i) {
        double x = cs.lo(0) + cs.length(0) * i / nx;
        top[std::size_t(i)] = phi.evaluate({x, 0.0});
        require(top[std::size_t(i)] > 0, ErrorKind::invalid_graph, "graph touches the container bottom");
    }
    m.nodes.resize(std::size_t(nx + 1) * std::size_t(ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes[std::size_t(id(i, j))] = {cs.lo(0) + cs.length(0) * i / nx, top[std::size_t(i)] * j / ny};

    double worst = std::numbers::pi;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            const auto &P = m.nodes;
            double q1 = std::min(detail::min_angle(P[a], P[b], P[c]), detail::min_angle(P[a], P[c], P[d]));
            double q2 = std::min(detail::min_angle(P[a], P[b], P[d]), detail::min_angle(P[b], P[c], P[d]));
            if (q1 >= q2) {
                m.triangles.push_back({a, b, c});
                m.triangles.push_back({a, c, d});
            } else {
                m.triangles.push_back({a, b, d});
                m.triangles.push_back({b, c, d});
            }
            worst = std::min(worst, std::max(q1, q2));
        }
    m.min_angle_deg = worst * 180.0 / std::numbers::pi;
    require(m.min_angle_deg >= min_angle_deg, ErrorKind::mesh_quality,
            "minimum triangle angle " + std::to_string(m.min_angle_deg) + " degrees is below " +
                std::to_string(min_angle_deg));
    require(m.total_area() > 0, ErrorKind::invalid_graph, "domain has zero area");

    for (int i = 0; i < nx; ++i) {
        m.boundary.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::free});
        m.boundary.push_back({id(i + 1, ny), id(i, ny), BoundaryTag::relative});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary.push_back({id(nx, j), id(nx, j + 1), BoundaryTag::free});
        m.boundary.push_back({id(0, j + 1), id(0, j), BoundaryTag::free});
    }
    for (const auto &t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const Point2 &p = m.nodes[t[k]], &q = m.nodes[t[(k + 1) % 3]];
            m.mesh_size = std::max(m.mesh_size, std::hypot(q.x - p.x, q.y - p.y));
        }
    return m;
}

} // namespace cheegerkit

#endif

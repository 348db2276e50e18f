#ifndef CHEEGERKIT_DOMAIN_HPP
#define CHEEGERKIT_DOMAIN_HPP

#include <cmath>

#include "container.hpp"
#include "graph_function.hpp"
#include "grid_calculus.hpp"

namespace cheegerkit {

/// Ω_φ = {(x', x_N) : x' ∈ ω, 0 < x_N < φ(x')} inside a cylinder over ω.
/// Γ_Ω is the graph of φ; Γ_{1,Ω} is the lateral wall part plus the bottom ω × {0}.
class SubgraphDomain {
public:
    SubgraphDomain(Container container, GraphFunction phi)
        : container_(std::move(container)), phi_(std::move(phi)) {}

    const Container &container() const noexcept { return container_; }
    const GraphFunction &graph() const noexcept { return phi_; }
    const CrossSection &cross_section() const { return phi_.cross_section(); }
    int dimension() const { return phi_.dim() + 1; }

    /// |Ω_φ| = ∫_ω φ dx' by the midpoint rule.
    double volume() const {
        return integrate_cells(cross_section(), phi_.values(), [](const CellSample &c) { return c.value; });
    }

    /// H_{N-1}(Γ_{1,Ω}): bottom |ω| plus the wall strip ∫_∂ω φ dσ.
    double free_boundary_measure() const {
        const CrossSection &cs = cross_section();
        if (cs.dim() == 1) return cs.length(0) + phi_(0) + phi_(cs.cells(0));
        double wall = 0.0;
        const auto &v = cs.vertices();
        for (std::size_t k = 0; k < v.size(); ++k) {
            Point2 a = v[k], b = v[(k + 1) % v.size()];
            double len = std::hypot(b.x - a.x, b.y - a.y);
            int m = std::max(2, int(std::ceil(len / std::min(cs.step(0), cs.step(1)))));
            for (int s = 0; s < m; ++s) {
                double t = (s + 0.5) / m;
                wall += phi_.evaluate({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}) * len / m;
            }
        }
        return cs.measure() + wall;
    }

private:
    Container container_;
    GraphFunction phi_;
};

/// Builds Ω_φ; only cylinder containers carry subgraph domains.
inline SubgraphDomain build_subgraph_domain(const Container &container, const GraphFunction &phi) {
    require(container.is_cylinder(), ErrorKind::unsupported_domain, "subgraph domains need a cylinder container");
    const CrossSection &base = container.cross_section();
    require(base.dim() == phi.dim() && base.cells(0) == phi.cross_section().cells(0) &&
                base.cells(1) == phi.cross_section().cells(1),
            ErrorKind::invalid_graph, "graph function is not sampled on the container cross-section grid");
    // GraphFunction already rejects non-positive nodes; re-check in case of a moved-from grid
    require(phi.min() > 0, ErrorKind::invalid_graph, "graph function must be positive");
    return SubgraphDomain(container, phi);
}

/// Ω = C ∩ B_R for a planar cone C with vertex at the origin.
class SectorDomain {
public:
    SectorDomain(Container cone, double radius) : cone_(std::move(cone)), radius_(radius) {
        require(cone_.kind() == ContainerKind::cone, ErrorKind::unsupported_domain, "sector domains need a cone");
        require(radius > 0 && std::isfinite(radius), ErrorKind::unsupported_domain, "sector radius must be positive");
    }

    const Container &container() const noexcept { return cone_; }
    double radius() const noexcept { return radius_; }
    double volume() const { return 0.5 * radius_ * radius_ * (cone_.theta2() - cone_.theta1()); }
    bool contains(double x, double y) const { return cone_.contains(x, y) && x * x + y * y < radius_ * radius_; }

private:
    Container cone_;
    double radius_;
};

} // namespace cheegerkit

#endif

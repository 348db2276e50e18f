#ifndef CHEEGERKIT_CONTAINER_HPP
#define CHEEGERKIT_CONTAINER_HPP

#include <cmath>
#include <numbers>
#include <optional>

#include "cross_section.hpp"
#include "errors.hpp"

namespace cheegerkit {

enum class ContainerKind { cylinder, cone };

/// Unbounded container: the half-cylinder ω × (0, ∞) with the last coordinate
/// as axis, or a planar cone {r(cos θ, sin θ) : r > 0, θ₁ < θ < θ₂}.
class Container {
public:
    static Container cylinder(CrossSection base) {
        Container c;
        c.kind_ = ContainerKind::cylinder;
        c.base_ = std::move(base);
        return c;
    }

    static Container cone(double theta1, double theta2) {
        require(std::isfinite(theta1) && std::isfinite(theta2) && theta2 > theta1,
                ErrorKind::unsupported_domain, "cone sector needs theta1 < theta2");
        require(theta2 - theta1 < 2 * std::numbers::pi, ErrorKind::unsupported_domain,
                "cone sector must be narrower than the full plane");
        Container c;
        c.kind_ = ContainerKind::cone;
        c.theta1_ = theta1;
        c.theta2_ = theta2;
        return c;
    }

    ContainerKind kind() const noexcept { return kind_; }
    bool is_cylinder() const noexcept { return kind_ == ContainerKind::cylinder; }

    const CrossSection &cross_section() const {
        require(base_.has_value(), ErrorKind::unsupported_domain, "cone containers have no cross-section");
        return *base_;
    }

    double theta1() const noexcept { return theta1_; }
    double theta2() const noexcept { return theta2_; }

    /// Ambient dimension N.
    int dimension() const { return is_cylinder() ? base_->dim() + 1 : 2; }

    bool convex() const {
        if (is_cylinder()) return base_->convex();
        return theta2_ - theta1_ <= std::numbers::pi;
    }

    /// Open containment for a point of R^N (z unused when N = 2).
    bool contains(double x, double y, double z = 0.0) const {
        if (is_cylinder()) {
            if (base_->dim() == 1) return base_->contains({x, 0.0}) && y > 0;
            return base_->contains({x, y}) && z > 0;
        }
        if (x == 0.0 && y == 0.0) return false;
        double a = std::atan2(y, x);
        // shift into [theta1, theta1 + 2π)
        while (a < theta1_) a += 2 * std::numbers::pi;
        while (a >= theta1_ + 2 * std::numbers::pi) a -= 2 * std::numbers::pi;
        return a < theta2_;
    }

private:
    ContainerKind kind_ = ContainerKind::cylinder;
    std::optional<CrossSection> base_;
    double theta1_ = 0.0;
    double theta2_ = 0.0;
};

} // namespace cheegerkit

#endif

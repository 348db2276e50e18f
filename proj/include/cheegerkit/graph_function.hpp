#ifndef CHEEGERKIT_GRAPH_FUNCTION_HPP
#define CHEEGERKIT_GRAPH_FUNCTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "cross_section.hpp"
#include "errors.hpp"

namespace cheegerkit {

enum class FamilyKind { constant, affine, cosine };

/// Closed-form graph families used for analytic comparisons.
///   constant: φ = h
///   affine:   φ = a·x' + b
///   cosine:   φ = b + a·cos(kπ(x − x₀)/L) (times the same factor in y for dim 2)
struct Family {
    FamilyKind kind = FamilyKind::constant;
    double height = 1.0;
    std::array<double, 2> slope{0.0, 0.0};
    double offset = 0.0;
    double base = 0.0;
    double amplitude = 0.0;
    double wavenumber = 1.0;

    static Family constant(double h) {
        Family f;
        f.kind = FamilyKind::constant;
        f.height = h;
        return f;
    }
    static Family affine(double a, double b) { return affine({a, 0.0}, b); }
    static Family affine(std::array<double, 2> a, double b) {
        Family f;
        f.kind = FamilyKind::affine;
        f.slope = a;
        f.offset = b;
        return f;
    }
    static Family cosine(double b, double a, double k = 1.0) {
        Family f;
        f.kind = FamilyKind::cosine;
        f.base = b;
        f.amplitude = a;
        f.wavenumber = k;
        return f;
    }

    double evaluate(const CrossSection &cs, Point2 p) const {
        switch (kind) {
        case FamilyKind::constant: return height;
        case FamilyKind::affine: return slope[0] * p.x + slope[1] * p.y + offset;
        case FamilyKind::cosine: {
            double c = std::cos(wavenumber * std::numbers::pi * (p.x - cs.lo(0)) / cs.length(0));
            if (cs.dim() == 2) c *= std::cos(wavenumber * std::numbers::pi * (p.y - cs.lo(1)) / cs.length(1));
            return base + amplitude * c;
        }
        }
        return 0.0;
    }
};

/// Nodal samples of a positive function φ on the cross-section grid. The graph
/// Γ_φ lies over ω and Ω_φ is the region between the container bottom and Γ_φ.
class GraphFunction {
public:
    static GraphFunction from_family(CrossSection cs, Family family) {
        std::vector<double> v(cs.node_count());
        for (int j = 0; j < cs.nodes(1); ++j)
            for (int i = 0; i < cs.nodes(0); ++i) v[cs.node_index(i, j)] = family.evaluate(cs, cs.node(i, j));
        GraphFunction g(std::move(cs), std::move(v));
        g.family_ = family;
        return g;
    }

    static GraphFunction from_samples(CrossSection cs, std::vector<double> values) {
        require(values.size() == cs.node_count(), ErrorKind::invalid_graph,
                "expected " + std::to_string(cs.node_count()) + " samples, got " + std::to_string(values.size()));
        return GraphFunction(std::move(cs), std::move(values));
    }

    /// Samples an arbitrary callable; f(x) for dim 1, f(x, y) for dim 2.
    template <class F>
    static GraphFunction sample(CrossSection cs, F &&f) {
        std::vector<double> v(cs.node_count());
        for (int j = 0; j < cs.nodes(1); ++j)
            for (int i = 0; i < cs.nodes(0); ++i) {
                Point2 p = cs.node(i, j);
                if constexpr (std::is_invocable_v<F, double, double>)
                    v[cs.node_index(i, j)] = f(p.x, p.y);
                else
                    v[cs.node_index(i, j)] = f(p.x);
            }
        return GraphFunction(std::move(cs), std::move(v));
    }

    const CrossSection &cross_section() const noexcept { return cs_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::optional<Family> &family() const noexcept { return family_; }
    int dim() const noexcept { return cs_.dim(); }

    double operator()(int i, int j = 0) const { return values_[cs_.node_index(i, j)]; }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }

    /// Analytic value when tagged, otherwise (bi)linear interpolation of the nodes.
    double evaluate(Point2 p) const {
        if (family_) return family_->evaluate(cs_, p);
        auto locate = [&](int axis, double c, int &i, double &s) {
            double h = cs_.step(axis);
            double u = std::clamp((c - cs_.lo(axis)) / h, 0.0, double(cs_.cells(axis)));
            i = std::min(int(std::floor(u)), cs_.cells(axis) - 1);
            s = u - i;
        };
        int i, j = 0;
        double sx, sy = 0.0;
        locate(0, p.x, i, sx);
        if (cs_.dim() == 1) return (1 - sx) * (*this)(i) + sx * (*this)(i + 1);
        locate(1, p.y, j, sy);
        return (1 - sx) * (1 - sy) * (*this)(i, j) + sx * (1 - sy) * (*this)(i + 1, j) +
               (1 - sx) * sy * (*this)(i, j + 1) + sx * sy * (*this)(i + 1, j + 1);
    }

    /// φ + t·v as an untagged graph (v nodal, same grid).
    GraphFunction perturbed(double t, std::span<const double> v) const {
        require(v.size() == values_.size(), ErrorKind::invalid_graph, "perturbation has wrong node count");
        std::vector<double> w(values_.size());
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = values_[k] + t * v[k];
        return GraphFunction(cs_, std::move(w));
    }

private:
    GraphFunction(CrossSection cs, std::vector<double> values) : cs_(std::move(cs)), values_(std::move(values)) {
        for (double v : values_) {
            require(std::isfinite(v), ErrorKind::invalid_graph, "graph samples must be finite");
            require(v > 0, ErrorKind::invalid_graph, "graph function must be positive at every node");
        }
    }

    CrossSection cs_;
    std::vector<double> values_;
    std::optional<Family> family_;
};

} // namespace cheegerkit

#endif

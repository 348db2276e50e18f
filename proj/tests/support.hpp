#ifndef CHEEGERKIT_TESTS_SUPPORT_HPP
#define CHEEGERKIT_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "cheegerkit/domain.hpp"
#include "cheegerkit/volume_grid.hpp"

namespace testing_support {

using namespace cheegerkit;

inline Container strip(double length, double spacing, double lo = 0.0) {
    return Container::cylinder(CrossSection::interval(lo, lo + length, spacing));
}

inline SubgraphDomain flat_domain(double height, double spacing, double length = 1.0) {
    Container c = strip(length, spacing);
    return build_subgraph_domain(c, GraphFunction::from_family(c.cross_section(), Family::constant(height)));
}

template <class F>
SubgraphDomain sampled_domain(const Container &c, F &&f) {
    return build_subgraph_domain(c, GraphFunction::sample(c.cross_section(), std::forward<F>(f)));
}

inline VolumeGrid manual_grid(int nx, int ny, std::vector<CellState> states, std::array<SideRule, 6> sides,
                              Stencil s = Stencil::faces, double delta = 0.25) {
    VolumeGrid::Spec spec;
    spec.dim = 2;
    spec.delta = delta;
    spec.cells = {nx, ny, 1};
    spec.stencil = s;
    spec.states = std::move(states);
    spec.sides = sides;
    return VolumeGrid(spec);
}

constexpr std::array<SideRule, 6> kOpen{SideRule::open, SideRule::open, SideRule::open,
                                        SideRule::open, SideRule::open, SideRule::open};
constexpr std::array<SideRule, 6> kStrip{SideRule::mirror, SideRule::mirror, SideRule::mirror,
                                         SideRule::open,   SideRule::open,   SideRule::open};

/// Small 2D grid with random cell states, side rules, stencil and Δ; at most 22 inside cells.
inline VolumeGrid random_grid(std::mt19937 &rng) {
    const int nx = 3 + int(rng() % 4), ny = 3 + int(rng() % 4);
    std::vector<CellState> st(std::size_t(nx * ny));
    int inside = 0;
    for (auto &s : st) {
        bool in = inside < 22 && rng() % 3 != 0;
        inside += in;
        s = in ? CellState::inside : (rng() % 4 ? CellState::container : CellState::outside_container);
    }
    if (inside == 0) st[0] = CellState::inside;
    std::array<SideRule, 6> sides;
    for (auto &s : sides) s = rng() % 2 ? SideRule::open : SideRule::mirror;
    return manual_grid(nx, ny, st, sides, rng() % 2 ? Stencil::crofton16 : Stencil::faces, 1.0 / (2 + rng() % 5));
}

/// Kind of the Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorKind> kind_of(F &&f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    return std::nullopt;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n = 4096) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

} // namespace testing_support

#endif

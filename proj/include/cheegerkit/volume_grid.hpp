#ifndef CHEEGERKIT_VOLUME_GRID_HPP
#define CHEEGERKIT_VOLUME_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"

namespace cheegerkit {

enum class CellState : std::uint8_t {
    outside_container, ///< not in C; faces towards it are free
    container,         ///< in C but not in Ω
    inside,            ///< in Ω
};

/// What lies past a side of the cell box. `mirror` means the container wall
/// runs along that side (neighbours reflect back into the box); `open` means
/// the container continues past it with cells that are not in Ω.
enum class SideRule : std::uint8_t { mirror, open };

/// Neighbourhood used by the discrete perimeter.
enum class Stencil : std::uint8_t {
    faces,     ///< axis neighbours only, weight = face measure
    crofton16, ///< 2D only: axial, diagonal and knight-move neighbours
};

enum class FaceKind { interior, free, relative };

inline constexpr int kWeightClasses = 3;

struct StencilOffset {
    std::array<int, 3> d;
    int cls;
};

inline std::span<const StencilOffset> stencil_offsets(Stencil s, int dim) {
    static const StencilOffset faces2[] = {
        {{1, 0, 0}, 0}, {{-1, 0, 0}, 0}, {{0, 1, 0}, 0}, {{0, -1, 0}, 0}};
    static const StencilOffset faces3[] = {{{1, 0, 0}, 0}, {{-1, 0, 0}, 0}, {{0, 1, 0}, 0},
                                           {{0, -1, 0}, 0}, {{0, 0, 1}, 0}, {{0, 0, -1}, 0}};
    static const StencilOffset crofton[] = {
        {{1, 0, 0}, 0},  {{-1, 0, 0}, 0},  {{0, 1, 0}, 0},   {{0, -1, 0}, 0},
        {{1, 1, 0}, 1},  {{-1, -1, 0}, 1}, {{1, -1, 0}, 1},  {{-1, 1, 0}, 1},
        {{1, 2, 0}, 2},  {{-1, -2, 0}, 2}, {{-1, 2, 0}, 2},  {{1, -2, 0}, 2},
        {{2, 1, 0}, 2},  {{-2, -1, 0}, 2}, {{2, -1, 0}, 2},  {{-2, 1, 0}, 2},
    };
    if (s == Stencil::crofton16) return crofton;
    return dim == 3 ? std::span<const StencilOffset>(faces3) : std::span<const StencilOffset>(faces2);
}

/// Dimensionless weight c of one neighbour pair; the pair contributes
/// c·Δ^{N−1} to the perimeter when it straddles the boundary of a set.
///
/// The knight-move weight is the Boykov–Kolmogorov Crofton weight
/// (π/8)/(2√5); axial and diagonal weights are then solved so that lines at
/// 0° and 45° are measured exactly. The worst direction is overestimated by
/// about 2.8% and no direction is underestimated.
inline double class_weight(Stencil s, int cls) {
    if (s == Stencil::faces) return cls == 0 ? 1.0 : 0.0;
    const double knight = std::numbers::pi / (16.0 * std::sqrt(5.0));
    switch (cls) {
    case 0: return std::numbers::sqrt2 - 1.0 - 2.0 * knight;
    case 1: return 1.0 - 1.0 / std::numbers::sqrt2 - 2.0 * knight;
    default: return knight;
    }
}

/// Pair structure of the discrete relative perimeter restricted to Ω.
/// Counts are in half-pairs: each directed view of a pair is one half.
struct CutStructure {
    struct Link {
        int a, b; ///< inside-cell indices, a < b
        int cls;
        int half;
    };
    std::vector<std::array<std::int32_t, kWeightClasses>> unary; ///< pairs towards C \ Ω, per inside cell
    std::vector<Link> links;
    std::vector<std::vector<int>> incident; ///< link indices per inside cell
};

/// Uniform Cartesian cells of side Δ covering a box around Ω, each tagged with
/// its relation to the container and the domain. Immutable; copies share storage.
class VolumeGrid {
public:
    struct Spec {
        int dim = 2;
        std::array<int, 3> cells{1, 1, 1};
        double delta = 1.0;
        std::array<double, 3> origin{0.0, 0.0, 0.0};
        std::vector<CellState> states;
        std::array<SideRule, 6> sides{SideRule::open, SideRule::open, SideRule::open,
                                      SideRule::open, SideRule::open, SideRule::open}; ///< x-, x+, y-, y+, z-, z+
        Stencil stencil = Stencil::faces;
        std::optional<ContainerKind> container; ///< origin of the grid, if rasterized
    };

    explicit VolumeGrid(Spec spec) {
        require(spec.dim == 2 || spec.dim == 3, ErrorKind::unsupported_dimension, "grids are 2D or 3D");
        if (spec.dim == 2) spec.cells[2] = 1;
        require(spec.cells[0] > 0 && spec.cells[1] > 0 && spec.cells[2] > 0, ErrorKind::resolution,
                "grid must have cells");
        require(spec.delta > 0, ErrorKind::resolution, "cell size must be positive");
        require(!(spec.stencil == Stencil::crofton16 && spec.dim == 3), ErrorKind::unsupported_dimension,
                "the 16-neighbourhood stencil is 2D only");
        require(spec.states.size() == std::size_t(spec.cells[0]) * spec.cells[1] * spec.cells[2],
                ErrorKind::resolution, "state array does not match the cell box");
        auto d = std::make_shared<Data>();
        d->spec = std::move(spec);
        d->inside_index.assign(d->spec.states.size(), -1);
        for (std::size_t c = 0; c < d->spec.states.size(); ++c) {
            if (d->spec.states[c] == CellState::inside) {
                d->inside_index[c] = int(d->inside_cells.size());
                d->inside_cells.push_back(c);
            }
        }
        d_ = std::move(d);
        build_cut();
    }

    int dim() const noexcept { return d_->spec.dim; }
    int cells(int axis) const { return d_->spec.cells[axis]; }
    double delta() const noexcept { return d_->spec.delta; }
    const std::array<double, 3> &origin() const noexcept { return d_->spec.origin; }
    Stencil stencil() const noexcept { return d_->spec.stencil; }
    SideRule side(int s) const { return d_->spec.sides[s]; }
    const std::optional<ContainerKind> &container() const noexcept { return d_->spec.container; }
    const Spec &spec() const noexcept { return d_->spec; }

    std::size_t box_size() const noexcept { return d_->spec.states.size(); }
    std::size_t box_index(int i, int j, int k = 0) const {
        return (std::size_t(k) * cells(1) + std::size_t(j)) * cells(0) + std::size_t(i);
    }
    std::array<int, 3> coords(std::size_t c) const {
        int i = int(c % cells(0));
        int j = int((c / cells(0)) % cells(1));
        int k = int(c / (std::size_t(cells(0)) * cells(1)));
        return {i, j, k};
    }
    CellState state(std::size_t c) const { return d_->spec.states[c]; }
    CellState state(int i, int j, int k = 0) const { return state(box_index(i, j, k)); }

    /// Physical centre of a box cell.
    std::array<double, 3> center(std::size_t c) const {
        auto ijk = coords(c);
        return {origin()[0] + (ijk[0] + 0.5) * delta(), origin()[1] + (ijk[1] + 0.5) * delta(),
                dim() == 3 ? origin()[2] + (ijk[2] + 0.5) * delta() : 0.0};
    }

    std::size_t inside_count() const noexcept { return d_->inside_cells.size(); }
    std::span<const std::size_t> inside_cells() const noexcept { return d_->inside_cells; }
    int inside_index(std::size_t box) const { return d_->inside_index[box]; }

    double cell_volume() const { return std::pow(delta(), dim()); }
    double face_measure() const { return std::pow(delta(), dim() - 1); }

    const CutStructure &cut() const noexcept { return d_->cut; }

    /// Where a neighbour lands: a box cell, itself (mirror on a wall), or the
    /// open container past the box.
    struct Neighbour {
        enum class Kind { cell, self, beyond } kind;
        std::size_t cell = 0;
    };

    Neighbour resolve(std::size_t from, const std::array<int, 3> &offset) const {
        auto p = coords(from);
        bool beyond = false;
        for (int a = 0; a < dim(); ++a) {
            int n = cells(a);
            int t = p[a] + offset[a];
            if (t < 0) {
                if (side(2 * a) == SideRule::mirror) t = -1 - t;
                else beyond = true;
            } else if (t >= n) {
                if (side(2 * a + 1) == SideRule::mirror) t = 2 * n - 1 - t;
                else beyond = true;
            }
            // reach ≤ 2 needs n ≥ 2 for the reflection to land in the box
            if (!beyond && (t < 0 || t >= n)) beyond = true;
            p[a] = t;
        }
        if (beyond) return {Neighbour::Kind::beyond, 0};
        std::size_t c = box_index(p[0], p[1], p[2]);
        if (c == from) return {Neighbour::Kind::self, c};
        return {Neighbour::Kind::cell, c};
    }

    /// Classification of the face of box cell `c` in direction ±axis.
    FaceKind face_kind(std::size_t c, int axis, int dir) const {
        std::array<int, 3> off{0, 0, 0};
        off[axis] = dir > 0 ? 1 : -1;
        Neighbour nb = resolve(c, off);
        if (nb.kind == Neighbour::Kind::self) return FaceKind::free;
        if (nb.kind == Neighbour::Kind::beyond) return FaceKind::relative;
        switch (state(nb.cell)) {
        case CellState::outside_container: return FaceKind::free;
        case CellState::container: return FaceKind::relative;
        case CellState::inside: return FaceKind::interior;
        }
        return FaceKind::free;
    }

private:
    struct Data {
        Spec spec;
        std::vector<int> inside_index;
        std::vector<std::size_t> inside_cells;
        CutStructure cut;
    };

    void build_cut() {
        auto &d = const_cast<Data &>(*d_);
        const std::size_t n = d.inside_cells.size();
        d.cut.unary.assign(n, {0, 0, 0});
        std::map<std::tuple<int, int, int>, int> pairs;
        auto offsets = stencil_offsets(stencil(), dim());
        for (std::size_t p = 0; p < n; ++p) {
            for (const auto &o : offsets) {
                Neighbour nb = resolve(d.inside_cells[p], o.d);
                if (nb.kind == Neighbour::Kind::self) continue;
                if (nb.kind == Neighbour::Kind::beyond) {
                    d.cut.unary[p][o.cls] += 2;
                    continue;
                }
                switch (state(nb.cell)) {
                case CellState::outside_container: break;
                case CellState::container: d.cut.unary[p][o.cls] += 2; break;
                case CellState::inside: {
                    int q = d.inside_index[nb.cell];
                    int a = std::min(int(p), q), b = std::max(int(p), q);
                    pairs[{a, b, o.cls}] += 1;
                    break;
                }
                }
            }
        }
        d.cut.incident.assign(n, {});
        for (const auto &[key, half] : pairs) {
            auto [a, b, cls] = key;
            int id = int(d.cut.links.size());
            d.cut.links.push_back({a, b, cls, half});
            d.cut.incident[a].push_back(id);
            d.cut.incident[b].push_back(id);
        }
    }

    std::shared_ptr<const Data> d_;
};

/// A candidate set E ⊆ Ω as one flag per inside cell of its grid.
class SubsetMask {
public:
    explicit SubsetMask(VolumeGrid grid) : grid_(std::move(grid)), bits_(grid_.inside_count(), 0) {}
    SubsetMask(VolumeGrid grid, std::vector<std::uint8_t> bits) : grid_(std::move(grid)), bits_(std::move(bits)) {
        require(bits_.size() == grid_.inside_count(), ErrorKind::size, "mask size does not match the grid");
    }

    static SubsetMask full(VolumeGrid grid) {
        SubsetMask m(std::move(grid));
        std::fill(m.bits_.begin(), m.bits_.end(), std::uint8_t{1});
        return m;
    }

    const VolumeGrid &grid() const noexcept { return grid_; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    bool contains(std::size_t inside_idx) const { return bits_[inside_idx] != 0; }
    void set(std::size_t inside_idx, bool on) { bits_[inside_idx] = on ? 1 : 0; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : bits_) c += b;
        return c;
    }
    bool empty() const { return count() == 0; }

    friend bool operator==(const SubsetMask &a, const SubsetMask &b) { return a.bits_ == b.bits_; }

private:
    VolumeGrid grid_;
    std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void require_extent(int cells, const char *axis) {
    require(cells >= 4, ErrorKind::resolution,
            std::string("grid step too coarse: fewer than 4 cells across the ") + axis + " extent");
}

} // namespace detail

/// Default perimeter stencil: 16-neighbourhood in 2D cylinders, faces otherwise.
inline Stencil default_stencil(const SubgraphDomain &dom) {
    return dom.dimension() == 2 ? Stencil::crofton16 : Stencil::faces;
}

/// Cells of side Δ over Ω_φ; a cell is in Ω when its centre lies below the graph.
inline VolumeGrid rasterize(const SubgraphDomain &dom, double delta, std::optional<Stencil> stencil = {}) {
    require(delta > 0 && std::isfinite(delta), ErrorKind::resolution, "grid step must be positive");
    const CrossSection &cs = dom.cross_section();
    const GraphFunction &phi = dom.graph();
    VolumeGrid::Spec spec;
    spec.dim = dom.dimension();
    spec.delta = delta;
    spec.stencil = stencil.value_or(default_stencil(dom));
    spec.container = ContainerKind::cylinder;
    auto column_height = [&](double f) { return std::max(0, int(std::ceil(f / delta - 0.5))); };

    if (cs.dim() == 1) {
        const double len = cs.length(0);
        const int nx = int(std::lround(len / delta));
        require(nx > 0 && std::abs(nx * delta - len) <= 1e-9 * len, ErrorKind::resolution,
                "grid step must divide the cross-section length");
        detail::require_extent(nx, "horizontal");
        std::vector<int> heights(nx);
        int ny = 0;
        for (int i = 0; i < nx; ++i) {
            heights[i] = column_height(phi.evaluate({cs.lo(0) + (i + 0.5) * delta, 0.0}));
            ny = std::max(ny, heights[i]);
        }
        detail::require_extent(ny, "vertical");
        spec.cells = {nx, ny, 1};
        spec.origin = {cs.lo(0), 0.0, 0.0};
        spec.states.assign(std::size_t(nx) * ny, CellState::container);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (j < heights[i]) spec.states[std::size_t(j) * nx + i] = CellState::inside;
        spec.sides = {SideRule::mirror, SideRule::mirror, SideRule::mirror, SideRule::open,
                      SideRule::open, SideRule::open};
        return VolumeGrid(std::move(spec));
    }

    const int nx = std::max(1, int(std::ceil(cs.length(0) / delta - 1e-9)));
    const int ny = std::max(1, int(std::ceil(cs.length(1) / delta - 1e-9)));
    detail::require_extent(nx, "x");
    detail::require_extent(ny, "y");
    std::vector<int> heights(std::size_t(nx) * ny, -1);
    int nz = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Point2 c{cs.lo(0) + (i + 0.5) * delta, cs.lo(1) + (j + 0.5) * delta};
            if (!cs.contains(c)) continue;
            int h = column_height(phi.evaluate(c));
            heights[std::size_t(j) * nx + i] = h;
            nz = std::max(nz, h);
        }
    }
    detail::require_extent(nz, "vertical");
    spec.cells = {nx, ny, nz};
    spec.origin = {cs.lo(0), cs.lo(1), 0.0};
    spec.states.assign(std::size_t(nx) * ny * nz, CellState::outside_container);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int h = heights[std::size_t(j) * nx + i];
                if (h < 0) continue;
                spec.states[(std::size_t(k) * ny + j) * nx + i] = k < h ? CellState::inside : CellState::container;
            }
    spec.sides = {SideRule::mirror, SideRule::mirror, SideRule::mirror, SideRule::mirror,
                  SideRule::mirror, SideRule::open};
    return VolumeGrid(std::move(spec));
}

/// Cells of side Δ over C ∩ B_R, with a two-cell margin of container/exterior
/// cells. The box corner sits on a lattice node through the cone vertex.
inline VolumeGrid rasterize(const SectorDomain &dom, double delta) {
    require(delta > 0 && std::isfinite(delta), ErrorKind::resolution, "grid step must be positive");
    const Container &cone = dom.container();
    const double r = dom.radius();
    // bounding box of the sector: vertex, arc ends and axis extremes on the arc
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    auto add = [&](double a) {
        double x = r * std::cos(a), y = r * std::sin(a);
        xlo = std::min(xlo, x), xhi = std::max(xhi, x), ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    };
    add(cone.theta1());
    add(cone.theta2());
    for (int q = -8; q <= 8; ++q) {
        double a = q * std::numbers::pi / 2;
        if (a > cone.theta1() && a < cone.theta2()) add(a);
    }
    detail::require_extent(int(std::floor((xhi - xlo) / delta)), "x");
    detail::require_extent(int(std::floor((yhi - ylo) / delta)), "y");
    const int margin = 2;
    const int i0 = int(std::floor(xlo / delta)) - margin, i1 = int(std::ceil(xhi / delta)) + margin;
    const int j0 = int(std::floor(ylo / delta)) - margin, j1 = int(std::ceil(yhi / delta)) + margin;
    VolumeGrid::Spec spec;
    spec.dim = 2;
    spec.delta = delta;
    spec.cells = {i1 - i0, j1 - j0, 1};
    spec.origin = {i0 * delta, j0 * delta, 0.0};
    spec.stencil = Stencil::faces;
    spec.container = ContainerKind::cone;
    spec.states.assign(std::size_t(spec.cells[0]) * spec.cells[1], CellState::outside_container);
    for (int j = 0; j < spec.cells[1]; ++j)
        for (int i = 0; i < spec.cells[0]; ++i) {
            double x = spec.origin[0] + (i + 0.5) * delta, y = spec.origin[1] + (j + 0.5) * delta;
            CellState s = CellState::outside_container;
            if (cone.contains(x, y)) s = dom.contains(x, y) ? CellState::inside : CellState::container;
            spec.states[std::size_t(j) * spec.cells[0] + i] = s;
        }
    return VolumeGrid(std::move(spec));
}

/// tE on a grid t times larger with the same cell size: every cell of the
/// parent grid (and of E) becomes a t×…×t block. Needs a cone grid whose
/// lattice passes through the vertex.
inline SubsetMask dilate(const SubsetMask &mask, int t) {
    const VolumeGrid &g = mask.grid();
    require(g.container() != ContainerKind::cylinder, ErrorKind::dilation_not_closed,
            "dilation leaves a half-cylinder");
    require(g.container() == ContainerKind::cone, ErrorKind::unsupported_domain, "dilation needs a cone grid");
    require(t >= 1, ErrorKind::resolution, "dilation factor must be a positive integer");
    for (int a = 0; a < g.dim(); ++a) {
        double q = g.origin()[a] / g.delta();
        require(std::abs(q - std::round(q)) <= 1e-9, ErrorKind::unsupported_domain,
                "cone vertex must lie on the grid lattice");
    }
    VolumeGrid::Spec spec = g.spec();
    for (int a = 0; a < g.dim(); ++a) {
        spec.cells[a] *= t;
        spec.origin[a] = std::round(g.origin()[a] / g.delta()) * t * g.delta();
    }
    spec.states.assign(std::size_t(spec.cells[0]) * spec.cells[1] * spec.cells[2], CellState::outside_container);
    std::vector<std::uint8_t> member(spec.states.size(), 0);
    for (std::size_t c = 0; c < g.box_size(); ++c) {
        auto p = g.coords(c);
        int in = g.inside_index(c);
        bool on = in >= 0 && mask.contains(std::size_t(in));
        const int tz = g.dim() == 3 ? t : 1;
        for (int dz = 0; dz < tz; ++dz)
            for (int dy = 0; dy < t; ++dy)
                for (int dx = 0; dx < t; ++dx) {
                    std::size_t f = (std::size_t(p[2] * tz + dz) * spec.cells[1] + std::size_t(p[1] * t + dy)) *
                                        spec.cells[0] +
                                    std::size_t(p[0] * t + dx);
                    spec.states[f] = g.state(c);
                    member[f] = on;
                }
    }
    VolumeGrid fine(std::move(spec));
    std::vector<std::uint8_t> bits(fine.inside_count(), 0);
    for (std::size_t k = 0; k < fine.inside_count(); ++k) bits[k] = member[fine.inside_cells()[k]];
    return SubsetMask(std::move(fine), std::move(bits));
}

} // namespace cheegerkit

#endif

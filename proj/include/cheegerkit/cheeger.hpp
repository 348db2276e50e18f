#ifndef CHEEGERKIT_CHEEGER_HPP
#define CHEEGERKIT_CHEEGER_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include "errors.hpp"
#include "perimeter.hpp"
#include "volume_grid.hpp"

namespace cheegerkit {

enum class CheegerMethod { dinkelbach, bruteforce };

inline std::string to_string(CheegerMethod m) { return m == CheegerMethod::dinkelbach ? "dinkelbach" : "bruteforce"; }

struct CheegerResult {
    double h = 0.0;
    SubsetMask minimizer;
    int iterations = 0;
    CheegerMethod method = CheegerMethod::dinkelbach;
    bool touched_relative_boundary = false;
    std::vector<double> lambdas; ///< Dinkelbach iterates, λ₀ first
};

/// True when some cell of the minimizer is within one cell (Chebyshev) of a
/// cell that has a face towards C \ Ω.
inline bool touches_boundary_check(const SubsetMask &mask, const VolumeGrid &grid) {
    require(!mask.empty(), ErrorKind::empty_set, "boundary check needs a nonempty set");
    std::vector<std::uint8_t> near(grid.box_size(), 0);
    for (std::size_t c : grid.inside_cells()) {
        bool rel = false;
        for (int a = 0; a < grid.dim() && !rel; ++a)
            rel = grid.face_kind(c, a, -1) == FaceKind::relative || grid.face_kind(c, a, +1) == FaceKind::relative;
        if (!rel) continue;
        auto p = grid.coords(c);
        const int kz = grid.dim() == 3 ? 1 : 0;
        for (int dz = -kz; dz <= kz; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int i = p[0] + dx, j = p[1] + dy, k = p[2] + dz;
                    if (i < 0 || j < 0 || k < 0 || i >= grid.cells(0) || j >= grid.cells(1) || k >= grid.cells(2))
                        continue;
                    near[grid.box_index(i, j, k)] = 1;
                }
    }
    for (std::size_t q = 0; q < grid.inside_count(); ++q)
        if (mask.contains(q) && near[grid.inside_cells()[q]]) return true;
    return false;
}

inline bool touches_boundary_check(const CheegerResult &result, const VolumeGrid &grid) {
    return touches_boundary_check(result.minimizer, grid);
}

/// Exhaustive minimum of P_C(E)/|E| over all nonempty cell unions. Ties go to
/// the lexicographically smallest ascending list of inside-cell indices.
inline CheegerResult cheeger_bruteforce(const VolumeGrid &grid) {
    const std::size_t n = grid.inside_count();
    require(n > 0, ErrorKind::empty_domain, "grid has no inside cells");
    require(n <= 22, ErrorKind::size, "brute force is limited to 22 cells, grid has " + std::to_string(n));
    const CutStructure &cut = grid.cut();

    // a precedes b in the tie-break order
    auto precedes = [](std::uint32_t a, std::uint32_t b) {
        std::uint32_t diff = a ^ b;
        int i = std::countr_zero(diff);
        std::uint32_t with = (a >> i) & 1u ? a : b;
        std::uint32_t without = with == a ? b : a;
        bool without_ends = (i + 1 >= 32) || (without >> (i + 1)) == 0;
        bool with_first = !without_ends;
        return with_first ? with == a : without == a;
    };

    std::uint32_t cur = 0, best = 0;
    Tally t, best_t;
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        int p = std::countr_zero(k); // Gray code flips bit p
        bool was_in = (cur >> p) & 1u;
        int sgn = was_in ? -1 : 1;
        t.cells += sgn;
        for (int c = 0; c < kWeightClasses; ++c) t.half[c] += sgn * cut.unary[p][c];
        for (int li : cut.incident[p]) {
            const auto &l = cut.links[li];
            int other = l.a == p ? l.b : l.a;
            bool other_in = (cur >> other) & 1u;
            // cut before flip iff was_in != other_in
            t.half[l.cls] += (was_in != other_in) ? -l.half : l.half;
        }
        cur ^= (1u << p);
        if (best == 0) {
            best = cur, best_t = t;
            continue;
        }
        int c = compare_ratio(grid, t, best_t);
        if (c < 0 || (c == 0 && precedes(cur, best))) best = cur, best_t = t;
    }
    std::vector<std::uint8_t> bits(n);
    for (std::size_t q = 0; q < n; ++q) bits[q] = (best >> q) & 1u;
    CheegerResult r{ratio_of(grid, best_t), SubsetMask(grid, std::move(bits)), 1, CheegerMethod::bruteforce, false, {}};
    r.touched_relative_boundary = touches_boundary_check(r.minimizer, grid);
    return r;
}

struct MincutResult {
    SubsetMask mask;
    double energy = 0.0; ///< P_C(E) − λ|E|, recomputed from the mask
};

/// Global minimizer of P_C(E) − λ|E| over all masks (empty allowed) as an
/// s–t minimum cut; E is the source side.
inline MincutResult mincut_subproblem(const VolumeGrid &grid, double lambda) {
    require(lambda > 0 && std::isfinite(lambda), ErrorKind::sign, "lambda must be positive");
    using namespace boost;
    using Traits = adjacency_list_traits<vecS, vecS, directedS>;
    using Graph = adjacency_list<
        vecS, vecS, directedS,
        property<vertex_index_t, long,
                 property<vertex_color_t, default_color_type,
                          property<vertex_distance_t, long, property<vertex_predecessor_t, Traits::edge_descriptor>>>>,
        property<edge_capacity_t, double,
                 property<edge_residual_capacity_t, double, property<edge_reverse_t, Traits::edge_descriptor>>>>;

    const std::size_t n = grid.inside_count();
    const CutStructure &cut = grid.cut();
    Graph g(n + 2);
    const auto s = vertex(n, g), sink = vertex(n + 1, g);
    auto cap = get(edge_capacity, g);
    auto rev = get(edge_reverse, g);
    auto arc = [&](Traits::vertex_descriptor a, Traits::vertex_descriptor b, double ab, double ba) {
        auto e1 = add_edge(a, b, g).first;
        auto e2 = add_edge(b, a, g).first;
        cap[e1] = ab;
        cap[e2] = ba;
        rev[e1] = e2;
        rev[e2] = e1;
    };
    const double fm = grid.face_measure();
    const double gain = lambda * grid.cell_volume();
    for (std::size_t p = 0; p < n; ++p) {
        double out = 0.0;
        for (int c = 0; c < kWeightClasses; ++c) out += class_weight(grid.stencil(), c) * cut.unary[p][c];
        arc(s, vertex(p, g), gain, 0.0);
        if (out > 0) arc(vertex(p, g), sink, 0.5 * out * fm, 0.0);
    }
    for (const auto &l : cut.links) {
        double w = 0.5 * class_weight(grid.stencil(), l.cls) * l.half * fm;
        if (w > 0) arc(vertex(l.a, g), vertex(l.b, g), w, w);
    }
    boykov_kolmogorov_max_flow(g, s, sink);
    auto color = get(vertex_color, g);
    const auto source_color = color[s];
    std::vector<std::uint8_t> bits(n);
    for (std::size_t p = 0; p < n; ++p) bits[p] = color[vertex(p, g)] == source_color;
    SubsetMask mask(grid, std::move(bits));
    double energy = mask.empty() ? 0.0 : relative_perimeter(mask) - lambda * volume(mask);
    return {std::move(mask), energy};
}

/// h_C(Ω) by Dinkelbach iteration on min-cuts, starting from λ₀ = P_C(Ω)/|Ω|.
inline CheegerResult cheeger_dinkelbach(const VolumeGrid &grid, int max_iterations = 100) {
    require(grid.inside_count() > 0, ErrorKind::empty_domain, "grid has no inside cells");
    SubsetMask best = SubsetMask::full(grid);
    Tally best_t = tally(best);
    double lambda = ratio_of(grid, best_t);
    std::vector<double> lambdas{lambda};
    if (lambda == 0.0) { // Ω has no relative boundary at all; nothing beats 0
        CheegerResult r{0.0, std::move(best), 0, CheegerMethod::dinkelbach, false, std::move(lambdas)};
        return r;
    }
    for (int k = 1; k <= max_iterations; ++k) {
        MincutResult mc = mincut_subproblem(grid, lambda);
        bool done = mc.mask.empty();
        if (!done) {
            Tally t = tally(mc.mask);
            if (compare_ratio(grid, t, best_t) >= 0) {
                done = true;
            } else {
                best = std::move(mc.mask);
                best_t = t;
                double next = ratio_of(grid, best_t);
                done = std::abs(next - lambda) <= 1e-10 || next == 0.0;
                lambda = next;
                lambdas.push_back(lambda);
            }
        }
        if (done) {
            CheegerResult r{lambda, std::move(best), k, CheegerMethod::dinkelbach, false, std::move(lambdas)};
            r.touched_relative_boundary = touches_boundary_check(r.minimizer, grid);
            return r;
        }
    }
    fail(ErrorKind::non_convergence, "Dinkelbach iteration hit the cap of " + std::to_string(max_iterations) +
                                         " iterations; last lambda " + std::to_string(lambda));
}

struct SelfCheegerResult {
    bool is_self_cheeger = false;
    double h = 0.0;
    double ratio_omega = 0.0;
    SubsetMask witness;
    CheegerResult result;
};

inline SelfCheegerResult self_cheeger_test(const VolumeGrid &grid, bool oracle = false) {
    CheegerResult r = oracle ? cheeger_bruteforce(grid) : cheeger_dinkelbach(grid);
    SubsetMask full = SubsetMask::full(grid);
    double ro = ratio(full);
    bool self = ro <= r.h * (1.0 + 1e-6);
    SubsetMask witness = self ? full : r.minimizer;
    double h = r.h;
    return {self, h, ro, std::move(witness), std::move(r)};
}

} // namespace cheegerkit

#endif

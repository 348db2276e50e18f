#ifndef CHEEGERKIT_PERIMETER_HPP
#define CHEEGERKIT_PERIMETER_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "errors.hpp"
#include "volume_grid.hpp"

namespace cheegerkit {

/// Integer content of a mask: half-pair counts per weight class and cell count.
/// Every perimeter and volume value is computed from these, so two sets with
/// the same tallies get bit-identical numbers.
struct Tally {
    std::array<std::int64_t, kWeightClasses> half{0, 0, 0};
    std::int64_t cells = 0;

    friend bool operator==(const Tally &, const Tally &) = default;
};

inline Tally tally(const SubsetMask &mask) {
    const VolumeGrid &g = mask.grid();
    const CutStructure &cut = g.cut();
    Tally t;
    for (std::size_t p = 0; p < g.inside_count(); ++p) {
        if (!mask.contains(p)) continue;
        ++t.cells;
        for (int c = 0; c < kWeightClasses; ++c) t.half[c] += cut.unary[p][c];
    }
    for (const auto &l : cut.links)
        if (mask.contains(std::size_t(l.a)) != mask.contains(std::size_t(l.b))) t.half[l.cls] += l.half;
    return t;
}

/// Perimeter of a tally: Δ^{N−1} Σ_c w_c · half_c / 2.
inline double perimeter_of(const VolumeGrid &g, const std::array<std::int64_t, kWeightClasses> &half) {
    double s = 0.0;
    for (int c = 0; c < kWeightClasses; ++c) s += class_weight(g.stencil(), c) * double(half[c]);
    return 0.5 * s * g.face_measure();
}

inline double relative_perimeter(const SubsetMask &mask) {
    require(!mask.empty(), ErrorKind::empty_set, "perimeter of an empty set");
    return perimeter_of(mask.grid(), tally(mask).half);
}

inline double volume(const SubsetMask &mask) { return double(mask.count()) * mask.grid().cell_volume(); }

/// P/|E| from a tally, reduced by the common gcd first so that equal ratios
/// give the same double regardless of how the set was found.
inline double ratio_of(const VolumeGrid &g, Tally t) {
    require(t.cells > 0, ErrorKind::empty_set, "ratio of an empty set");
    std::int64_t d = t.cells;
    for (auto h : t.half) d = std::gcd(d, h);
    for (auto &h : t.half) h /= d;
    t.cells /= d;
    return perimeter_of(g, t.half) / (double(t.cells) * g.cell_volume());
}

inline double ratio(const SubsetMask &mask) { return ratio_of(mask.grid(), tally(mask)); }

/// Sign of ratio(a) − ratio(b). Exactly 0 when the integer tallies are
/// proportional; otherwise decided in floating point.
inline int compare_ratio(const VolumeGrid &g, const Tally &a, const Tally &b) {
    require(a.cells > 0 && b.cells > 0, ErrorKind::empty_set, "ratio of an empty set");
    bool equal = true;
    double s = 0.0;
    for (int c = 0; c < kWeightClasses; ++c) {
        // products stay far below 2^63 for grids of desk size
        std::int64_t d = a.half[c] * b.cells - b.half[c] * a.cells;
        if (d != 0) equal = false;
        s += class_weight(g.stencil(), c) * double(d);
    }
    if (equal) return 0;
    return (s > 0) - (s < 0);
}

} // namespace cheegerkit

#endif

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cheegerkit/cheeger.hpp"
#include "cheegerkit/perturbation.hpp"
#include "support.hpp"

using namespace cheegerkit;
using namespace testing_support;

namespace {

GraphFunction line_graph(double spacing, std::function<double(double)> f) {
    return GraphFunction::sample(CrossSection::interval(0.0, 1.0, spacing), f);
}

} // namespace

TEST(Bruteforce, SingleInteriorCell) {
    std::vector<CellState> iso(25, CellState::container);
    iso[12] = CellState::inside;
    auto gi = manual_grid(5, 5, iso, kOpen);
    auto r = cheeger_bruteforce(gi);
    EXPECT_DOUBLE_EQ(r.h, 4.0 * gi.delta() / (gi.delta() * gi.delta()));
    EXPECT_EQ(r.minimizer.count(), 1u);
}

TEST(Bruteforce, TwoByTwoBlockInStrip) {
    auto g = manual_grid(2, 2, std::vector<CellState>(4, CellState::inside), kStrip);
    auto r = cheeger_bruteforce(g);
    const double d = g.delta();
    EXPECT_DOUBLE_EQ(r.h, 2.0 * d * 1.0 / (4.0 * d * d));
    EXPECT_EQ(r.minimizer.count(), 4u);
}

TEST(Bruteforce, TieBreakIsLexicographic) {
    std::vector<CellState> st(15, CellState::container);
    st[6] = st[8] = CellState::inside; // two separated cells on the middle row
    auto g = manual_grid(5, 3, st, kOpen);
    auto r = cheeger_bruteforce(g);
    ASSERT_EQ(r.minimizer.count(), 1u);
    EXPECT_TRUE(r.minimizer.contains(0));
    // {0}, {0, 1} and {1} all share the ratio; Dinkelbach returns one of them
    auto d = cheeger_dinkelbach(g);
    EXPECT_EQ(d.h, r.h);
}

TEST(Bruteforce, SizeAndEmptyErrors) {
    auto big = rasterize(flat_domain(0.625, 0.125, 1.25), 0.125);
    ASSERT_EQ(big.inside_count(), 50u);
    EXPECT_EQ(kind_of([&] { cheeger_bruteforce(big); }), ErrorKind::size);
    auto empty = manual_grid(4, 4, std::vector<CellState>(16, CellState::container), kOpen);
    EXPECT_EQ(kind_of([&] { cheeger_bruteforce(empty); }), ErrorKind::empty_domain);
    EXPECT_EQ(kind_of([&] { cheeger_dinkelbach(empty); }), ErrorKind::empty_domain);
}

TEST(Mincut, BelowCheegerConstantIsEmpty) {
    auto g = manual_grid(2, 2, std::vector<CellState>(4, CellState::inside), kStrip);
    double h = cheeger_bruteforce(g).h;
    auto r = mincut_subproblem(g, 0.5 * h);
    EXPECT_TRUE(r.mask.empty());
    EXPECT_EQ(r.energy, 0.0);
}

TEST(Mincut, AboveOmegaRatioIsNegative) {
    auto g = rasterize(flat_domain(1.0, 0.125), 0.125);
    double ro = ratio(SubsetMask::full(g));
    auto r = mincut_subproblem(g, 1.5 * ro);
    EXPECT_FALSE(r.mask.empty());
    EXPECT_LT(r.energy, 0.0);
}

TEST(Mincut, RatioBelowLambda) {
    auto g = manual_grid(2, 2, std::vector<CellState>(4, CellState::inside), kStrip);
    double h = cheeger_bruteforce(g).h;
    auto r = mincut_subproblem(g, 2.0 * h);
    ASSERT_FALSE(r.mask.empty());
    EXPECT_LE(ratio(r.mask), 2.0 * h);
}

TEST(Mincut, NonPositiveLambdaIsSignError) {
    auto g = rasterize(flat_domain(1.0, 0.125), 0.125);
    EXPECT_EQ(kind_of([&] { mincut_subproblem(g, 0.0); }), ErrorKind::sign);
}

TEST(Mincut, MatchesExhaustiveEnergy) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = random_grid(rng);
        const std::size_t n = g.inside_count();
        double lambda = 0.5 + 10.0 * (rng() % 1000) / 1000.0;
        double best = 0.0;
        for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
            SubsetMask m(g);
            for (std::size_t k = 0; k < n; ++k) m.set(k, bits >> k & 1u);
            best = std::min(best, relative_perimeter(m) - lambda * volume(m));
        }
        EXPECT_NEAR(mincut_subproblem(g, lambda).energy, best, 1e-9 * (1.0 + std::abs(best)));
    }
}

TEST(Dinkelbach, MatchesBruteforce) {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        auto g = random_grid(rng);
        auto a = cheeger_bruteforce(g), b = cheeger_dinkelbach(g);
        EXPECT_EQ(a.h, b.h);
        EXPECT_EQ(compare_ratio(g, tally(a.minimizer), tally(b.minimizer)), 0);
    }
}

TEST(Dinkelbach, MonotoneIterates) {
    auto dom = sampled_domain(strip(1.0, 1.0 / 32), [](double x) {
        return 0.2 + 1.6 * std::max(0.0, 1.0 - 8.0 * std::abs(x - 0.5));
    });
    auto g = rasterize(dom, 1.0 / 32);
    auto r = cheeger_dinkelbach(g);
    for (std::size_t k = 1; k < r.lambdas.size(); ++k) EXPECT_LE(r.lambdas[k], r.lambdas[k - 1]);
    EXPECT_EQ(r.lambdas.front(), ratio(SubsetMask::full(g)));
    EXPECT_DOUBLE_EQ(ratio(r.minimizer), r.h);
}

TEST(Dinkelbach, UnitRectangleStrip) {
    auto g = rasterize(flat_domain(1.0, 1.0 / 64), 1.0 / 64);
    auto r = cheeger_dinkelbach(g);
    EXPECT_NEAR(r.h, 1.0, 0.03);
    EXPECT_TRUE(r.touched_relative_boundary);
}

TEST(Dinkelbach, SingleCellOneIteration) {
    std::vector<CellState> st(25, CellState::container);
    st[12] = CellState::inside;
    auto r = cheeger_dinkelbach(manual_grid(5, 5, st, kOpen));
    EXPECT_EQ(r.iterations, 1);
    EXPECT_EQ(r.minimizer.count(), 1u);
}

TEST(SelfCheeger, RectangleIsSelfCheeger) {
    auto s = self_cheeger_test(rasterize(flat_domain(1.0, 1.0 / 64), 1.0 / 64));
    EXPECT_TRUE(s.is_self_cheeger);
    EXPECT_EQ(s.witness.count(), s.witness.grid().inside_count());
}

TEST(SelfCheeger, SpikeIsNot) {
    auto dom = sampled_domain(strip(1.0, 1.0 / 64), [](double x) {
        return 0.2 + 1.6 * std::max(0.0, 1.0 - 8.0 * std::abs(x - 0.5));
    });
    auto g = rasterize(dom, 1.0 / 64);
    auto s = self_cheeger_test(g);
    EXPECT_FALSE(s.is_self_cheeger);
    EXPECT_LT(s.h, s.ratio_omega);
    // the witness drops the spike tip: nothing above the slab part near x = 1/2
    std::size_t tip = 0;
    for (std::size_t k = 0; k < g.inside_count(); ++k)
        if (s.witness.contains(k) && g.center(g.inside_cells()[k])[1] > 1.5) ++tip;
    EXPECT_EQ(tip, 0u);
}

TEST(SelfCheeger, SingleCell) {
    std::vector<CellState> st(25, CellState::container);
    st[12] = CellState::inside;
    EXPECT_TRUE(self_cheeger_test(manual_grid(5, 5, st, kOpen)).is_self_cheeger);
}

TEST(SelfCheeger, CurvatureBoundHookOnFlatGraph) {
    auto dom = flat_domain(1.0, 1.0 / 32);
    auto s = self_cheeger_test(rasterize(dom, 1.0 / 32));
    ASSERT_TRUE(s.is_self_cheeger);
    ASSERT_LT(orthogonality_residual(dom.graph()), 1e-12);
    auto b = curvature_bound_check(dom.graph());
    EXPECT_TRUE(b.satisfied);
    EXPECT_EQ(b.max_H, 0.0);
    EXPECT_DOUBLE_EQ(b.bound, 1.0);
}

TEST(CurvatureBound, CircularGraph) {
    const double R = 1.0, c = 0.5;
    auto phi = line_graph(1.0 / 64, [&](double x) { return c + std::sqrt(R * R - (x - 0.5) * (x - 0.5)); });
    auto b = curvature_bound_check(phi);
    EXPECT_NEAR(b.max_H, 1.0 / R, 1e-3);
    // bound by independent quadrature of the arc length and area
    double len = 2.0 * std::asin(0.5 / R) * R;
    double area = simpson([&](double x) { return c + std::sqrt(R * R - (x - 0.5) * (x - 0.5)); }, 0.0, 1.0);
    EXPECT_NEAR(b.bound, len / area, 1e-3);
}

TEST(TouchesBoundary, ShrunkenMaskInside) {
    auto g = rasterize(flat_domain(1.0, 1.0 / 16), 1.0 / 16);
    SubsetMask m(g);
    for (std::size_t k = 0; k < g.inside_count(); ++k) {
        auto p = g.coords(g.inside_cells()[k]);
        m.set(k, p[0] >= 4 && p[0] < 12 && p[1] < 6);
    }
    EXPECT_FALSE(touches_boundary_check(m, g));
    EXPECT_TRUE(touches_boundary_check(SubsetMask::full(g), g));
}

TEST(TouchesBoundary, ConeMinimizers) {
    for (double theta : {0.8, 1.6, 2.8}) {
        auto g = rasterize(SectorDomain(Container::cone(0.0, theta), 1.0), 1.0 / 24);
        auto r = cheeger_dinkelbach(g);
        EXPECT_TRUE(r.touched_relative_boundary) << "theta = " << theta;
    }
}

TEST(ConeScaling, CheegerConstantScalesInversely) {
    auto g = rasterize(SectorDomain(Container::cone(0.0, 1.2), 0.5), 1.0 / 16);
    double h = cheeger_dinkelbach(g).h;
    for (int t : {2, 3}) {
        auto big = dilate(SubsetMask::full(g), t).grid();
        EXPECT_NEAR(cheeger_dinkelbach(big).h, h / t, 1e-12 * h);
    }
}

TEST(Perturbation, ConstantGraphUniformPush) {
    auto phi = line_graph(1.0 / 16, [](double) { return 1.0; });
    std::vector<double> v(phi.values().size(), -1.0);
    auto r = perturbation_derivative(phi, v);
    EXPECT_EQ(r.dp, 0.0);
    EXPECT_DOUBLE_EQ(r.dV, -1.0);
    EXPECT_DOUBLE_EQ(r.criterion, r.p0 * 1.0);
    EXPECT_GT(r.criterion, 0.0);
}

TEST(Perturbation, ZeroFieldIsZero) {
    auto phi = line_graph(1.0 / 16, [](double x) { return 1.0 + x * x; });
    std::vector<double> v(phi.values().size(), 0.0);
    auto r = perturbation_derivative(phi, v);
    EXPECT_EQ(r.dp, 0.0);
    EXPECT_EQ(r.dV, 0.0);
    EXPECT_EQ(r.criterion, 0.0);
}

TEST(Perturbation, PositiveFieldIsSignError) {
    auto phi = line_graph(1.0 / 16, [](double) { return 1.0; });
    std::vector<double> v(phi.values().size(), -1.0);
    v[3] = 0.1;
    EXPECT_EQ(kind_of([&] { perturbation_derivative(phi, v); }), ErrorKind::sign);
}

TEST(Perturbation, FiniteDifferenceOfDiscreteFunctionals) {
    auto phi = line_graph(1.0 / 32, [](double x) { return 1.5 + 0.3 * std::sin(2.0 * x); });
    std::vector<double> v(phi.values().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = -0.5 - 0.5 * std::cos(double(k));
    auto r = perturbation_derivative(phi, v);
    const double eps = 1e-5;
    auto P = [&](double t) { return surface_area(phi.perturbed(t, v)); };
    auto V = [&](double t) { return graph_volume(phi.perturbed(t, v)); };
    EXPECT_NEAR((P(eps) - P(-eps)) / (2 * eps), r.dp, 1e-8);
    EXPECT_NEAR((V(eps) - V(-eps)) / (2 * eps), r.dV, 1e-10);
    EXPECT_DOUBLE_EQ(r.p0, surface_area(phi));
    EXPECT_DOUBLE_EQ(r.V0, graph_volume(phi));
}

TEST(Perturbation, IntegrationByPartsAgreesSecondOrder) {
    // v = −φ on the orthogonal cosine family
    auto gap = [](double s) {
        auto phi = line_graph(s, [](double x) { return 2.0 + 0.25 * std::cos(M_PI * x); });
        std::vector<double> v(phi.values().begin(), phi.values().end());
        for (double &x : v) x = -x;
        return std::abs(perturbation_derivative(phi, v).dp - perturbation_by_parts(phi, v));
    };
    double a = gap(1.0 / 32), b = gap(1.0 / 64);
    EXPECT_LT(b, 1e-3);
    EXPECT_GE(a / b, 3.5);
}

TEST(Witness, AffineClosedForm) {
    auto phi = line_graph(1.0 / 64, [](double x) { return 1.0 + 0.5 * x; });
    auto w = non_self_cheeger_witness(phi);
    EXPECT_NEAR(w.alpha, 8.0, 0.08);
    EXPECT_NEAR(w.delta, 0.5, 1e-12);
    EXPECT_NEAR(w.old_ratio, std::sqrt(1.25) / 1.25, 1e-12);
    EXPECT_LT(w.new_ratio, w.old_ratio);
    EXPECT_GE(w.old_ratio - w.new_ratio, 1e-4);
}

TEST(Witness, ConstantGraphViolatesHypothesis) {
    auto phi = line_graph(1.0 / 16, [](double) { return 1.0; });
    EXPECT_EQ(kind_of([&] { non_self_cheeger_witness(phi); }), ErrorKind::hypothesis_violated);
}

TEST(Witness, StrictDecreaseWheneverGradientNonzero) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> slope(0.2, 2.0), off(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        double a = slope(rng), b = off(rng), c = 0.1 * slope(rng);
        auto phi = line_graph(1.0 / 32, [&](double x) { return b + a * x + c * x * x; });
        auto w = non_self_cheeger_witness(phi);
        EXPECT_LT(w.new_ratio, w.old_ratio);
    }
}

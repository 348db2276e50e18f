// Acceptance runner: `acceptance --criterion k` checks one criterion, no flag checks all ten.
// Each criterion prints one PASS/FAIL line followed by its indented clauses.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cheegerkit/audit.hpp"
#include "cheegerkit/commands.hpp"
#include "cheegerkit/fem.hpp"
#include "../support.hpp"

using namespace cheegerkit;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class Verdict {
public:
    void check(bool ok, const std::string &clause, const std::string &detail) {
        ok_ = ok_ && ok;
        lines_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + clause + ": " + detail);
    }
    bool ok() const { return ok_; }
    const std::vector<std::string> &lines() const { return lines_; }

private:
    bool ok_ = true;
    std::vector<std::string> lines_;
};

std::string fmt(const char *f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

GraphFunction sampled(double spacing, const std::function<double(double)> &f) {
    return GraphFunction::sample(CrossSection::interval(0.0, 1.0, spacing), f);
}

GraphFunction cosine_graph(double spacing, double b, double a, double k) {
    return GraphFunction::from_family(CrossSection::interval(0.0, 1.0, spacing), Family::cosine(b, a, k));
}

constexpr double kHeights[] = {0.5, 1.0, 2.0};

// Flat torsion: u = (h² − y²)/2, c = h, |Ω| = h·|Γ|.
void criterion1(Verdict &v) {
    const double mesh_h = 1.0 / 64;
    for (double h : kHeights) {
        auto t0 = Clock::now();
        TriangleMesh m = triangulate(flat_domain(h, mesh_h), mesh_h);
        ScalarField u = solve_torsion(m);
        TorsionCertificate c = torsion_certificate(m, u);
        const double secs = seconds_since(t0);
        double err = 0.0;
        for (std::size_t k = 0; k < m.nodes.size(); ++k)
            err = std::max(err, std::abs(u.values[k] - 0.5 * (h * h - m.nodes[k].y * m.nodes[k].y)));
        double p_dev = 0.0;
        for (double p : c.P) p_dev = std::max(p_dev, std::abs(p - h * h) / (h * h));
        const std::string tag = fmt("h=%g ", h);
        v.check(err <= 1e-3, tag + "torsion max error", fmt("%.3e <= 1e-3", err));
        v.check(std::abs(c.c_est - h) <= 0.01 * h, tag + "c_est", fmt("%.6f vs %g (1%%)", c.c_est, h));
        v.check(p_dev <= 0.02, tag + "P within 2% of h^2 everywhere", fmt("max relative deviation %.4f", p_dev));
        v.check(c.volume_identity_gap <= 0.01 * h, tag + "volume identity gap",
                fmt("%.3e <= %.3e", c.volume_identity_gap, 0.01 * h));
        v.check(secs <= 10.0, tag + "runtime", fmt("%.2f s <= 10 s", secs));
    }
}

void criterion2(Verdict &v) {
    const double mesh_h = 1.0 / 64;
    for (double h : kHeights) {
        auto t0 = Clock::now();
        SubgraphDomain dom = flat_domain(h, mesh_h);
        EigenCertificate e = solve_eigen(triangulate(dom, mesh_h));
        double hc = cheeger_dinkelbach(rasterize(dom, mesh_h)).h;
        const double secs = seconds_since(t0);
        const double exact = M_PI * M_PI / (4 * h * h);
        const std::string tag = fmt("h=%g ", h);
        v.check(std::abs(e.lambda1 - exact) <= 0.01 * exact, tag + "lambda1",
                fmt("%.6f vs %.6f (1%%)", e.lambda1, exact));
        v.check(e.lambda1 >= 0.98 * hc * hc / 4, tag + "lambda1 >= h_C^2/4",
                fmt("%.6f >= 0.98 * %.6f", e.lambda1, hc * hc / 4));
        v.check(secs <= 20.0, tag + "runtime", fmt("%.2f s <= 20 s", secs));
    }
}

void criterion3(Verdict &v) {
    auto t0 = Clock::now();
    const double delta = 1.0 / 64;
    for (double h : kHeights) {
        SelfCheegerResult r = self_cheeger_test(rasterize(flat_domain(h, delta), delta));
        const std::string tag = fmt("h=%g ", h);
        v.check(r.is_self_cheeger, tag + "self-Cheeger", fmt("h_C %.6f, ratio(Omega) %.6f", r.h, r.ratio_omega));
        v.check(std::abs(r.h - 1.0 / h) <= 0.03 / h, tag + "h_C", fmt("%.6f vs %g (3%%)", r.h, 1.0 / h));
    }
    double secs = seconds_since(t0);
    v.check(secs <= 60.0, "runtime", fmt("%.2f s <= 60 s", secs));
}

void criterion4(Verdict &v) {
    auto t0 = Clock::now();
    std::mt19937 rng(20240611);
    int same_h = 0, same_ratio = 0;
    const int n = 200;
    for (int trial = 0; trial < n; ++trial) {
        VolumeGrid g = random_grid(rng);
        CheegerResult b = cheeger_bruteforce(g), d = cheeger_dinkelbach(g);
        same_h += b.h == d.h;
        same_ratio += compare_ratio(g, tally(b.minimizer), tally(d.minimizer)) == 0;
    }
    double secs = seconds_since(t0);
    v.check(same_h == n, "identical h", fmt("%d / %d", same_h, n));
    v.check(same_ratio == n, "equal-ratio minimizers", fmt("%d / %d", same_ratio, n));
    v.check(secs <= 60.0, "runtime", fmt("%.2f s <= 60 s", secs));
}

void criterion5(Verdict &v) {
    std::mt19937 rng(31);
    const std::pair<double, double> cones[] = {{0.8, 1.0}, {1.2, 0.75}, {1.6, 1.0}, {2.4, 0.5}, {3.0, 0.75}};
    double vol_dev = 0.0, per_dev = 0.0, h_dev = 0.0;
    int masks = 0;
    for (auto [theta, radius] : cones) {
        VolumeGrid g = rasterize(SectorDomain(Container::cone(0.0, theta), radius), 1.0 / 16);
        for (int k = 0; k < 10; ++k) {
            SubsetMask m(g);
            for (std::size_t c = 0; c < g.inside_count(); ++c) m.set(c, rng() % 3 == 0);
            if (m.empty()) m.set(0, true);
            ++masks;
            for (int t : {2, 3}) {
                SubsetMask d = dilate(m, t);
                vol_dev = std::max(vol_dev, std::abs(volume(d) / (t * t * volume(m)) - 1.0));
                per_dev = std::max(per_dev, std::abs(relative_perimeter(d) / (t * relative_perimeter(m)) - 1.0));
            }
        }
        const double h = cheeger_dinkelbach(g).h;
        for (int t : {2, 3}) {
            double ht = cheeger_dinkelbach(dilate(SubsetMask::full(g), t).grid()).h;
            h_dev = std::max(h_dev, std::abs(ht * t / h - 1.0));
        }
    }
    v.check(masks == 50, "mask count", fmt("%d", masks));
    v.check(vol_dev <= 1e-12, "volume scales by t^2", fmt("max relative deviation %.2e", vol_dev));
    v.check(per_dev <= 1e-12, "perimeter scales by t", fmt("max relative deviation %.2e", per_dev));
    v.check(h_dev <= 1e-12, "h_C scales by 1/t", fmt("max relative deviation %.2e", h_dev));
}

void criterion6(Verdict &v) {
    // the cosine scene: 1 + 0.1 cos(πx)
    double gaps[3];
    const double steps[3] = {1.0 / 64, 1.0 / 128, 1.0 / 256};
    for (int k = 0; k < 3; ++k) {
        MinkowskiTerms t = minkowski_check(cosine_graph(steps[k], 1.0, 0.1, 1.0));
        gaps[k] = std::abs(t.lhs - t.rhs);
    }
    v.check(gaps[2] <= 1e-3, "cosine |lhs - rhs| at 1/256", fmt("%.3e <= 1e-3", gaps[2]));
    for (int k = 0; k < 2; ++k) {
        double order = std::log2(gaps[k] / gaps[k + 1]);
        v.check(order >= 1.8, fmt("order %g -> %g", steps[k], steps[k + 1]), fmt("%.3f >= 1.8", order));
    }
    MinkowskiTerms a = minkowski_check(sampled(1.0 / 256, [](double x) { return 1.0 + 0.5 * x; }));
    double defect = std::abs(a.lhs - (a.rhs - a.boundary_term));
    v.check(defect <= 1e-3, "affine three-term identity", fmt("%.3e <= 1e-3", defect));
    v.check(std::abs(a.lhs - a.rhs) > 1e-3, "affine two-term gap is visible", fmt("%.3e", std::abs(a.lhs - a.rhs)));
}

void criterion7(Verdict &v) {
    const double spacing = 1.0 / 64;
    double amp = 0.1, mean_h = 0.0, spread = 0.0, prev_spread = INFINITY;
    bool monotone = true;
    for (int k = 0; k < 8; ++k, amp /= 2) {
        GraphFunction phi = cosine_graph(spacing, 1.0, amp, 1.0);
        CurvatureField H = mean_curvature(phi);
        const auto vals = phi.values();
        double mean = 0.0, var = 0.0;
        for (double x : vals) mean += x;
        mean /= double(vals.size());
        for (double x : vals) var += (x - mean) * (x - mean);
        spread = std::sqrt(var / double(vals.size())) / mean;
        mean_h = H.mean;
        monotone = monotone && spread < prev_spread;
        prev_spread = spread;
    }
    amp *= 2;
    v.check(std::abs(mean_h) <= 1e-3, fmt("|mean H| at amplitude %.4g", amp), fmt("%.3e <= 1e-3", std::abs(mean_h)));
    v.check(spread <= 1e-2, fmt("stddev/mean of phi at amplitude %.4g", amp), fmt("%.3e <= 1e-2", spread));
    v.check(monotone, "spread shrinks with the amplitude", monotone ? "yes" : "no");
}

void criterion8(Verdict &v) {
    Witness w = non_self_cheeger_witness(sampled(1.0 / 64, [](double x) { return 1.0 + 0.5 * x; }));
    double margin = w.old_ratio - w.new_ratio;
    v.check(w.new_ratio < w.old_ratio && margin >= 1e-4, "ratio decrease",
            fmt("%.6f -> %.6f, margin %.3e >= 1e-4", w.old_ratio, w.new_ratio, margin));
    v.check(std::abs(w.alpha - 8.0) <= 0.08, "alpha", fmt("%.6f vs 8 (1%%)", w.alpha));
}

double flip_amplitude() {
    // 1 + a cos(2πx) is orthogonal at both walls for every a
    auto ok = [](double a) { return gradient_necessary_condition(cosine_graph(1.0 / 64, 1.0, a, 2.0)).satisfied; };
    double lo = 0.0, hi = 0.6;
    for (int k = 0; k < 60; ++k) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void criterion9(Verdict &v) {
    GradientCondition flat = gradient_necessary_condition(sampled(1.0 / 16, [](double) { return 1.0; }));
    v.check(flat.lhs == 0.5 && flat.rhs == 1.0 && flat.satisfied, "flat passes exactly",
            fmt("lhs %.17g < rhs %.17g", flat.lhs, flat.rhs));
    GradientCondition steep = gradient_necessary_condition(cosine_graph(1.0 / 64, 1.0, 0.6, 2.0));
    v.check(steep.hypothesis_ok && !steep.satisfied, "steep orthogonal bump fails",
            fmt("lhs %.6f >= rhs %.6f", steep.lhs, steep.rhs));
    double a1 = flip_amplitude(), a2 = flip_amplitude();
    v.check(std::bit_cast<std::uint64_t>(a1) == std::bit_cast<std::uint64_t>(a2), "flip amplitude bit-identical",
            fmt("%.17g, %.17g", a1, a2));
    v.check(a1 > 0.2 && a1 < 0.3, "flip inside the bump sweep bracket", fmt("%.6f in (0.2, 0.3)", a1));
}

void criterion10(Verdict &v) {
    Scene s = load_scene(std::string(CHEEGERKIT_SCENES_DIR) + "/flat_cylinder.json");
    std::string first;
    int identical = 0;
    for (int k = 0; k < 3; ++k) {
        std::string text = run_command("audit", s).document.dump(2);
        if (k == 0) first = text;
        identical += text == first;
    }
    v.check(identical == 3, "byte-identical audit JSON", fmt("%d / 3 runs match, %zu bytes", identical, first.size()));
}

const std::function<void(Verdict &)> kCriteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                     criterion6, criterion7, criterion8, criterion9, criterion10};

const char *kTitles[] = {"flat-cylinder torsion closed form",
                         "eigenvalue closed form and Cheeger bound",
                         "flat cylinder is self-Cheeger",
                         "Dinkelbach matches brute force",
                         "cone scaling",
                         "Minkowski formula",
                         "small-amplitude CMC graphs are flat",
                         "non-self-Cheeger witness",
                         "gradient necessary condition",
                         "audit determinism"};

bool run(int k) {
    Verdict v;
    auto t0 = Clock::now();
    try {
        kCriteria[k - 1](v);
    } catch (const Error &e) {
        v.check(false, "error", e.what());
    }
    std::printf("criterion %d %s: %s (%.2f s)\n", k, v.ok() ? "PASS" : "FAIL", kTitles[k - 1], seconds_since(t0));
    for (const auto &line : v.lines()) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    return v.ok();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    int criterion = 0;
    app.add_option("--criterion", criterion, "criterion number, 1 to 10 (default: all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);
    bool ok = true;
    for (int k = 1; k <= 10; ++k)
        if (criterion == 0 || criterion == k) ok = run(k) && ok;
    return ok ? 0 : 1;
}

#ifndef CHEEGERKIT_FEM_HPP
#define CHEEGERKIT_FEM_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "errors.hpp"
#include "geometry.hpp"
#include "grid_calculus.hpp"
#include "triangle_mesh.hpp"

namespace cheegerkit {

/// P1 field on a mesh: nodal values plus the constant gradient of each triangle.
struct ScalarField {
    std::vector<double> values;
    std::vector<Vec2> gradients;
};

namespace detail {

// Barycentric gradients of a triangle's three hat functions.
inline std::array<Vec2, 3> hat_gradients(const TriangleMesh &m, std::size_t t) {
    const auto &tri = m.triangles[t];
    const Point2 &a = m.nodes[tri[0]], &b = m.nodes[tri[1]], &c = m.nodes[tri[2]];
    const double twice = detail::cross(a, b, c);
    return {Vec2{(b.y - c.y) / twice, (c.x - b.x) / twice}, Vec2{(c.y - a.y) / twice, (a.x - c.x) / twice},
            Vec2{(a.y - b.y) / twice, (b.x - a.x) / twice}};
}

inline std::vector<Vec2> field_gradients(const TriangleMesh &m, const std::vector<double> &u) {
    std::vector<Vec2> g(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        auto dh = hat_gradients(m, t);
        Vec2 s{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            s[0] += u[m.triangles[t][k]] * dh[k][0];
            s[1] += u[m.triangles[t][k]] * dh[k][1];
        }
        g[t] = s;
    }
    return g;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Assembly {
    SparseMatrix K, M; ///< full stiffness and consistent mass
    Eigen::VectorXd F; ///< load of the constant source 1
};

inline Assembly assemble(const TriangleMesh &m) {
    const Eigen::Index n = Eigen::Index(m.nodes.size());
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(m.triangles.size() * 9);
    mt.reserve(m.triangles.size() * 9);
    Assembly a;
    a.F = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto &tri = m.triangles[t];
        const double area = m.area(t);
        auto dh = hat_gradients(m, t);
        for (int i = 0; i < 3; ++i) {
            a.F[tri[i]] += area / 3.0;
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri[i], tri[j], area * dot(dh[i], dh[j]));
                mt.emplace_back(tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
            }
        }
    }
    a.K.resize(n, n);
    a.M.resize(n, n);
    a.K.setFromTriplets(kt.begin(), kt.end());
    a.M.setFromTriplets(mt.begin(), mt.end());
    return a;
}

// Maps nodes to unknowns; Dirichlet nodes get −1.
inline std::vector<int> free_numbering(const TriangleMesh &m, int &count) {
    auto dir = m.dirichlet_flags();
    std::vector<int> map(m.nodes.size(), -1);
    count = 0;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (!dir[i]) map[i] = count++;
    return map;
}

inline SparseMatrix restrict(const SparseMatrix &A, const std::vector<int> &map, int count) {
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            int r = map[std::size_t(it.row())], c = map[std::size_t(it.col())];
            if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
        }
    SparseMatrix R(count, count);
    R.setFromTriplets(t.begin(), t.end());
    return R;
}

inline void require_dirichlet(const TriangleMesh &m) {
    bool any = std::any_of(m.boundary.begin(), m.boundary.end(),
                           [](const BoundaryEdge &e) { return e.tag == BoundaryTag::relative; });
    require(any, ErrorKind::ill_posed, "mesh has no Dirichlet (relative boundary) edge");
}

class CgSolver {
public:
    // the solver keeps a reference to its matrix, so the matrix lives here
    CgSolver(SparseMatrix A, double tol) : A_(std::move(A)) {
        cg_.setTolerance(tol);
        cg_.setMaxIterations(std::max<Eigen::Index>(1000, 10 * A_.rows()));
        cg_.compute(A_);
        require(cg_.info() == Eigen::Success, ErrorKind::linear_solve, "conjugate gradient setup failed");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd &b) {
        Eigen::VectorXd x = cg_.solve(b);
        require(cg_.info() == Eigen::Success, ErrorKind::linear_solve,
                "conjugate gradient did not reach the tolerance; residual " + std::to_string(cg_.error()));
        return x;
    }

private:
    SparseMatrix A_;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg_;
};

} // namespace detail

/// −Δu = 1 in Ω, u = 0 on Γ_Ω, ∂u/∂ν = 0 on Γ_{1,Ω}, by P1 elements.
inline ScalarField solve_torsion(const TriangleMesh &mesh, double tol = 1e-10) {
    detail::require_dirichlet(mesh);
    int nf = 0;
    auto map = detail::free_numbering(mesh, nf);
    auto as = detail::assemble(mesh);
    ScalarField u;
    u.values.assign(mesh.nodes.size(), 0.0);
    if (nf > 0) {
        Eigen::VectorXd b(nf);
        for (std::size_t i = 0; i < map.size(); ++i)
            if (map[i] >= 0) b[map[i]] = as.F[Eigen::Index(i)];
        detail::CgSolver cg(detail::restrict(as.K, map, nf), tol);
        Eigen::VectorXd x = cg.solve(b);
        for (std::size_t i = 0; i < map.size(); ++i)
            if (map[i] >= 0) u.values[i] = x[map[i]];
    }
    u.gradients = detail::field_gradients(mesh, u.values);
    return u;
}

struct TorsionCertificate {
    ScalarField u;
    double c_est = 0.0;
    double overdet_residual = 0.0;    ///< max over Γ_Ω nodes of |∂u/∂ν + c_est|
    std::vector<double> P;            ///< per triangle
    std::vector<double> normal_flux;  ///< ∂u/∂ν at each Dirichlet node, in node order
    double grad_bound_margin = 0.0;   ///< c_est − max |Du|
    double volume_identity_gap = 0.0; ///< | |Ω| − c_est·H_1(Γ_Ω) |
    double max_P = 0.0;
    bool max_P_on_relative_boundary = false;
};

/// Normal derivative on Γ_Ω from the consistent residual flux: (Ku − F)_i at
/// a Dirichlet node equals ∫_Γ ∂u/∂ν ψ_i, divided by the lumped edge mass.
inline TorsionCertificate torsion_certificate(const TriangleMesh &mesh, const ScalarField &u) {
    constexpr double N = 2.0;
    auto as = detail::assemble(mesh);
    Eigen::Map<const Eigen::VectorXd> uv(u.values.data(), Eigen::Index(u.values.size()));
    Eigen::VectorXd R = as.K * uv - as.F;
    std::vector<double> mass(mesh.nodes.size(), 0.0);
    for (const auto &e : mesh.boundary)
        if (e.tag == BoundaryTag::relative) {
            double l = mesh.edge_length(e);
            mass[e.a] += 0.5 * l;
            mass[e.b] += 0.5 * l;
        }
    TorsionCertificate c;
    c.u = u;
    double total = 0.0, len = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (mass[i] > 0) {
            total += R[Eigen::Index(i)];
            len += mass[i];
            c.normal_flux.push_back(R[Eigen::Index(i)] / mass[i]);
        }
    c.c_est = -total / len;
    for (double q : c.normal_flux) c.overdet_residual = std::max(c.overdet_residual, std::abs(q + c.c_est));

    auto dir = mesh.dirichlet_flags();
    double max_grad = 0.0;
    c.P.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto &tri = mesh.triangles[t];
        double mean_u = (u.values[tri[0]] + u.values[tri[1]] + u.values[tri[2]]) / 3.0;
        double g2 = norm2(u.gradients[t]);
        max_grad = std::max(max_grad, std::sqrt(g2));
        c.P[t] = g2 + (2.0 / N) * mean_u;
        if (t == 0 || c.P[t] > c.max_P) {
            c.max_P = c.P[t];
            c.max_P_on_relative_boundary = dir[tri[0]] || dir[tri[1]] || dir[tri[2]];
        }
    }
    c.grad_bound_margin = c.c_est - max_grad;
    c.volume_identity_gap = std::abs(mesh.total_area() - c.c_est * mesh.tagged_length(BoundaryTag::relative));
    return c;
}

struct EigenCertificate {
    double lambda1 = 0.0;
    ScalarField eigenfunction; ///< positive, unit L² norm
    double rayleigh = 0.0;
    int iterations = 0;
    double cheeger_bound = 0.0;
    bool bound_satisfied = false;
};

/// Smallest eigenvalue of the mixed problem by inverse power iteration (shift 0).
inline EigenCertificate solve_eigen(const TriangleMesh &mesh, double rel_tol = 1e-8, int max_iterations = 2000) {
    detail::require_dirichlet(mesh);
    int nf = 0;
    auto map = detail::free_numbering(mesh, nf);
    require(nf > 0, ErrorKind::ill_posed, "mesh has no free nodes");
    auto as = detail::assemble(mesh);
    auto K = detail::restrict(as.K, map, nf);
    auto M = detail::restrict(as.M, map, nf);
    detail::CgSolver cg(K, 1e-12); // K stays in use for Rayleigh quotients

    Eigen::VectorXd x = Eigen::VectorXd::Ones(nf);
    x /= std::sqrt(x.dot(M * x));
    double lambda = x.dot(K * x);
    EigenCertificate e;
    for (int k = 1;; ++k) {
        Eigen::VectorXd y = cg.solve(M * x);
        y /= std::sqrt(y.dot(M * y));
        double next = y.dot(K * y);
        x = std::move(y);
        if (std::abs(next - lambda) <= rel_tol * next) {
            lambda = next;
            e.iterations = k;
            break;
        }
        lambda = next;
        if (k >= max_iterations)
            fail(ErrorKind::non_convergence, "inverse iteration hit the cap of " + std::to_string(max_iterations));
    }
    if (x.sum() < 0) x = -x;
    e.lambda1 = lambda;
    e.rayleigh = x.dot(K * x) / x.dot(M * x);
    e.eigenfunction.values.assign(mesh.nodes.size(), 0.0);
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map[i] >= 0) e.eigenfunction.values[i] = x[map[i]];
    e.eigenfunction.gradients = detail::field_gradients(mesh, e.eigenfunction.values);
    return e;
}

/// Rayleigh quotient ∫|∇v|²/∫v² of a nodal field (Dirichlet nodes ignored).
inline double rayleigh_quotient(const TriangleMesh &mesh, const std::vector<double> &v) {
    auto as = detail::assemble(mesh);
    std::vector<double> w = v;
    auto dir = mesh.dirichlet_flags();
    for (std::size_t i = 0; i < w.size(); ++i)
        if (dir[i]) w[i] = 0.0;
    Eigen::Map<const Eigen::VectorXd> x(w.data(), Eigen::Index(w.size()));
    return x.dot(as.K * x) / x.dot(as.M * x);
}

struct EigenBound {
    double bound = 0.0; ///< h²/4
    bool satisfied = false;
};

inline EigenBound cheeger_eigen_bound(double lambda1, double h, double slack = 0.02) {
    EigenBound b;
    b.bound = 0.25 * h * h;
    b.satisfied = lambda1 >= b.bound * (1.0 - slack);
    return b;
}

inline void attach_bound(EigenCertificate &e, double h) {
    auto b = cheeger_eigen_bound(e.lambda1, h);
    e.cheeger_bound = b.bound;
    e.bound_satisfied = b.satisfied;
}

struct CurvatureUpperBound {
    double max_H = 0.0;
    double bound = 0.0; ///< 1/(N·c)
    bool strict = false;
    bool equality_branch = false; ///< every nodal H within the band around the bound
};

inline CurvatureUpperBound curvature_upper_bound_check(const GraphFunction &phi, double c_est, double band = 1e-3) {
    require(c_est > 0, ErrorKind::sign, "c must be positive");
    CurvatureField H = mean_curvature(phi);
    const double N = double(phi.dim() + 1);
    CurvatureUpperBound r;
    r.max_H = H.max;
    r.bound = 1.0 / (N * c_est);
    r.strict = r.max_H < r.bound;
    r.equality_branch = std::all_of(H.values.begin(), H.values.end(),
                                    [&](double h) { return std::abs(h - r.bound) <= band * r.bound; });
    return r;
}

struct GradientCondition {
    double lhs = 0.0; ///< H_{N−1}(Γ_φ)/N
    double rhs = 0.0; ///< ∫_ω 1/√(1+|∇φ|²)
    bool satisfied = false;
    double orthogonality = 0.0;
    bool hypothesis_ok = false;
    std::string warning;
};

/// Necessary gradient bound for overdetermined solvability on Ω_φ with an
/// orthogonal graph: H_{N−1}(Γ_φ)/N < ∫_ω 1/√(1+|∇φ|²).
inline GradientCondition gradient_necessary_condition(const GraphFunction &phi, double orth_tol = 1e-3) {
    GradientCondition g;
    g.lhs = surface_area(phi) / double(phi.dim() + 1);
    g.rhs = integrate_cells(phi.cross_section(), phi.values(),
                            [](const CellSample &c) { return 1.0 / std::sqrt(1.0 + norm2(c.grad)); });
    g.satisfied = g.lhs < g.rhs;
    g.orthogonality = orthogonality_residual(phi);
    g.hypothesis_ok = g.orthogonality <= orth_tol;
    if (!g.hypothesis_ok)
        g.warning = "graph does not meet the wall orthogonally (residual " + std::to_string(g.orthogonality) +
                    "); the bound is not implied";
    return g;
}

} // namespace cheegerkit

#endif

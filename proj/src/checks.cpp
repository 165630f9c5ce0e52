#include "peterlin/checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "peterlin/manufactured.hpp"
#include "peterlin/scheme.hpp"
#include "peterlin/study.hpp"

namespace peterlin {

namespace {

SuiteResult lemma5_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "lemma5-identity";
    std::mt19937 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const Mat2 e{dist(rng), dist(rng), dist(rng), dist(rng)};
        const SymMat2 d{dist(rng), dist(rng), dist(rng)};
        SymMat2 adj = adjugate(d);
        if (opts.flip_adjugate_sign) adj = adj * -1.0;
        const double identity =
            d.trace() * ddot(d.full(), e) - ddot(mul(e, d), d.full()) - 0.5 * e.trace() * ddot(adj, d);
        const double bound = 1e-10 * (1.0 + e.frobenius() * d.frobenius() * d.frobenius());
        worst = std::max(worst, std::abs(identity) / bound);
        if (std::abs(lemma5_residual(e, d)) > bound) worst = std::max(worst, 2.0);
    }
    res.passed = worst <= 1.0;
    std::ostringstream msg;
    msg << "worst residual at " << worst << "x the bound over 1e5 pairs";
    res.detail = msg.str();
    return res;
}

SuiteResult adjugate_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "adjugate-identity";
    std::mt19937 rng(opts.seed + 1);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    const SymMat2 id_adj = adjugate(identity_sym());
    double worst = std::max({std::abs(id_adj.t11 - 1.0), std::abs(id_adj.t12), std::abs(id_adj.t22 - 1.0)});
    for (int k = 0; k < 100000; ++k) {
        const SymMat2 d{dist(rng), dist(rng), dist(rng)};
        const Mat2 prod = mul(d.full(), adjugate(d));
        const double det = d.det();
        worst = std::max({worst, std::abs(prod.a11 - det), std::abs(prod.a12), std::abs(prod.a21),
                          std::abs(prod.a22 - det)});
    }
    res.passed = worst <= 1e-12 * (1.0 + 100.0);  // entries up to 10 in magnitude
    std::ostringstream msg;
    msg << "max deviation of D D# from det(D) I: " << worst;
    res.detail = msg.str();
    return res;
}

SuiteResult jacobian_fd_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "jacobian-vs-fd";
    const TriMesh mesh = TriMesh::structured(8);
    SchemeParams params;
    params.eps = opts.eps;
    params.dt = 1.0 / 16.0;
    params.t_end = 0.5;
    Solver solver(mesh, params, VelocityField::zero(), ForcingFields::none());

    std::mt19937 rng(opts.seed + 2);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const StateTriple prev = StateTriple::zero(mesh);

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(solver.n_dofs()), d(solver.n_dofs());
        for (auto* v : {&x, &d})
            for (double& e : *v) e = dist(rng);
        // candidates and directions live on the constrained manifold u|Gamma = 0
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (mesh.boundary_vertex(v))
                for (int a = 0; a < 2; ++a) x[2 * v + a] = d[2 * v + a] = 0.0;

        const std::vector<double> jd = solver.jacobian_apply_raw(x, d);
        const double alpha = 1e-6 * (1.0 + norm2(x)) / norm2(d);
        std::vector<double> xp(x), xm(x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            xp[i] += alpha * d[i];
            xm[i] -= alpha * d[i];
        }
        const std::vector<double> rp = solver.residual_raw(prev, xp);
        const std::vector<double> rm = solver.residual_raw(prev, xm);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double fd = (rp[i] - rm[i]) / (2.0 * alpha);
            num += (jd[i] - fd) * (jd[i] - fd);
            den += jd[i] * jd[i];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    res.passed = worst <= 1e-6;
    std::ostringstream msg;
    msg << "worst relative deviation " << worst << " over 20 states/directions at N=8";
    res.detail = msg.str();
    return res;
}

SuiteResult transport_reduction_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "zero-velocity-transport";
    const TriMesh mesh = TriMesh::structured(8);
    std::mt19937 rng(opts.seed + 3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    double worst = 0.0;
    for (FeKind kind : {FeKind::scalar, FeKind::vector2, FeKind::symtensor2}) {
        FeFunction g(mesh, kind);
        for (double& c : g.coeffs()) c = dist(rng);
        const auto load = transported_load(g, VelocityField::zero(), 0.1, 0.1, QuadratureRule::degree5());
        const SparseMatrix m = assemble_mass(mesh, g.components());
        const auto mg = m.multiply(g.coeffs());
        for (std::size_t i = 0; i < load.size(); ++i) worst = std::max(worst, std::abs(load[i] - mg[i]));
    }
    res.passed = worst <= 1e-12;
    std::ostringstream msg;
    msg << "max |load - M g| = " << worst;
    res.detail = msg.str();
    return res;
}

SuiteResult ode_oracle_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "frozen-flow-reaction-ode";
    const TriMesh mesh = TriMesh::structured(4);
    SchemeParams params;
    params.eps = opts.eps;
    params.dt = 0.05;
    params.t_end = 1.0;
    Solver::Options sopts;
    sopts.freeze_flow = true;
    Solver solver(mesh, params, VelocityField::zero(), ForcingFields::none(), sopts);

    StateTriple state = StateTriple::zero(mesh);
    const double c0 = 0.8;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        state.c.at(v, 0) = c0;
        state.c.at(v, 2) = c0;
    }

    // backward Euler on c' = -4 c^3 + 2 c, cubic solved by scalar Newton
    double oracle = c0;
    double worst = 0.0;
    for (int step = 1; step <= 20; ++step) {
        state = solver.advance(state);
        const double prev = oracle;
        for (int it = 0; it < 60; ++it) {
            const double f = oracle - prev + params.dt * (4.0 * oracle * oracle * oracle - 2.0 * oracle);
            const double fp = 1.0 + params.dt * (12.0 * oracle * oracle - 2.0);
            const double delta = f / fp;
            oracle -= delta;
            if (std::abs(delta) < 1e-15) break;
        }
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            worst = std::max({worst, std::abs(state.c.at(v, 0) - oracle), std::abs(state.c.at(v, 1)),
                              std::abs(state.c.at(v, 2) - oracle)});
        }
    }
    res.passed = worst <= 1e-9;
    std::ostringstream msg;
    msg << "max nodal deviation from the scalar oracle over 20 steps: " << worst;
    res.detail = msg.str();
    return res;
}

SuiteResult stokes_projection_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "stokes-projection";
    std::ostringstream msg;
    bool ok = true;

    {
        // a discrete pair (u_h, 0) is a fixed point
        const TriMesh mesh = TriMesh::structured(8);
        std::mt19937 rng(opts.seed + 4);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        FeFunction u(mesh, FeKind::vector2);
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (!mesh.boundary_vertex(v)) {
                u.at(v, 0) = dist(rng);
                u.at(v, 1) = dist(rng);
            }
        const auto [uh, ph] = stokes_project(mesh, 0.1, 1.0, [&](int tri, const std::array<double, 3>&, Vec2) {
            return FlowSample{u.grad_vector(tri), 0.0};
        });
        double dev = 0.0;
        for (int i = 0; i < u.n_dofs(); ++i) dev = std::max(dev, std::abs(uh.coeffs()[i] - u.coeffs()[i]));
        for (double c : ph.coeffs()) dev = std::max(dev, std::abs(c));
        ok = ok && dev <= 1e-10;
        msg << "fixed-point deviation " << dev;
    }
    {
        // projection error of the benchmark initial velocity
        const ExactSolution ex;
        double el2[3], eh1[3];
        const int ns[3] = {16, 32, 64};
        for (int k = 0; k < 3; ++k) {
            const TriMesh mesh = TriMesh::structured(ns[k]);
            const auto [uh, ph] = stokes_project(mesh, 0.1, 1.0, [&](int, const std::array<double, 3>&, Vec2 x) {
                return FlowSample{ex.grad_u(x, 0.0), 0.0};
            });
            const FeFunction iu = FeFunction::interpolate(mesh, [&](Vec2 x) { return ex.u(x, 0.0); });
            const FeNorms n = norms(uh - iu);
            el2[k] = n.l2;
            eh1[k] = n.h1();
        }
        for (int k = 0; k + 1 < 3; ++k) {
            const double sl2 = convergence_slope(el2[k], el2[k + 1], ns[k], ns[k + 1]);
            const double sh1 = convergence_slope(eh1[k], eh1[k + 1], ns[k], ns[k + 1]);
            ok = ok && sl2 >= 1.7 && sh1 >= 0.9;
            msg << "; slopes L2 " << sl2 << " H1 " << sh1;
        }
    }
    res.passed = ok;
    res.detail = msg.str();
    return res;
}

SuiteResult eps_linearity_suite(const CheckOptions& opts) {
    SuiteResult res;
    res.name = "forcing-diffusion-linearity";
    if (opts.eps == 0.0) {
        res.skipped = true;
        res.passed = true;
        res.detail = "skipped at eps = 0 (no tensor diffusion)";
        return res;
    }
    const ExactSolution ex;
    std::mt19937 rng(opts.seed + 5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x{dist(rng), dist(rng)};
        const double t = 0.5 * dist(rng);
        const ForcingValue fe = manufactured_forcing(ex, x, t, 1.0, opts.eps);
        const ForcingValue f0 = manufactured_forcing(ex, x, t, 1.0, 0.0);
        const SymMat2 diff = fe.F - f0.F;
        const SymMat2 expect = ex.laplace_C(x, t) * -opts.eps;
        worst = std::max(worst, (diff - expect).frobenius() / (1.0 + expect.frobenius()));
    }
    res.passed = worst <= 1e-12;
    std::ostringstream msg;
    msg << "max relative deviation of F(eps) - F(0) from -eps*Laplace(C): " << worst;
    res.detail = msg.str();
    return res;
}

}  // namespace

std::vector<SuiteResult> run_check_suites(const CheckOptions& opts) {
    return {lemma5_suite(opts),        adjugate_suite(opts),          jacobian_fd_suite(opts),
            transport_reduction_suite(opts), ode_oracle_suite(opts), stokes_projection_suite(opts),
            eps_linearity_suite(opts)};
}

}  // namespace peterlin

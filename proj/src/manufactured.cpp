#include "peterlin/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace peterlin {

namespace {

constexpr double kPi = std::numbers::pi;

/// One separable building block  amp * s(x1) s(x2) sin(pi (k1 x1 + k2 x2 + t)) + offset
/// with s = sin^2(pi .) when enveloped and s = 1 otherwise. Partial
/// derivatives up to third order in space and first in time (mixed with up to
/// second in space) come from the product rule; the time coefficient in the
/// phase is always 1.
struct TrigProduct {
    double amp;
    double k1, k2;
    double offset;
    bool envelope;

    struct Derivs {
        double v;
        double d1, d2, dt;
        double d11, d12, d22, d1t, d2t;
        double d111, d112, d122, d222;
    };

    Derivs eval(Vec2 x, double t) const {
        // envelope factors and their derivatives
        double s1 = 1.0, s1p = 0.0, s1pp = 0.0, s1ppp = 0.0;
        double s2 = 1.0, s2p = 0.0, s2pp = 0.0, s2ppp = 0.0;
        if (envelope) {
            const double sx = std::sin(kPi * x.x), s2x = std::sin(2.0 * kPi * x.x), c2x = std::cos(2.0 * kPi * x.x);
            s1 = sx * sx;
            s1p = kPi * s2x;
            s1pp = 2.0 * kPi * kPi * c2x;
            s1ppp = -4.0 * kPi * kPi * kPi * s2x;
            const double sy = std::sin(kPi * x.y), s2y = std::sin(2.0 * kPi * x.y), c2y = std::cos(2.0 * kPi * x.y);
            s2 = sy * sy;
            s2p = kPi * s2y;
            s2pp = 2.0 * kPi * kPi * c2y;
            s2ppp = -4.0 * kPi * kPi * kPi * s2y;
        }
        const double phi = k1 * x.x + k2 * x.y + t;
        const double w0 = std::sin(kPi * phi);
        const double w1 = kPi * std::cos(kPi * phi);
        const double w2 = -kPi * kPi * w0;
        const double w3 = -kPi * kPi * w1;

        Derivs d;
        d.v = amp * s1 * s2 * w0 + offset;
        d.d1 = amp * (s1p * s2 * w0 + s1 * s2 * k1 * w1);
        d.d2 = amp * (s1 * s2p * w0 + s1 * s2 * k2 * w1);
        d.dt = amp * s1 * s2 * w1;
        d.d11 = amp * (s1pp * s2 * w0 + 2.0 * s1p * s2 * k1 * w1 + s1 * s2 * k1 * k1 * w2);
        d.d22 = amp * (s1 * s2pp * w0 + 2.0 * s1 * s2p * k2 * w1 + s1 * s2 * k2 * k2 * w2);
        d.d12 = amp * (s1p * s2p * w0 + s1p * s2 * k2 * w1 + s1 * s2p * k1 * w1 + s1 * s2 * k1 * k2 * w2);
        d.d1t = amp * (s1p * s2 * w1 + s1 * s2 * k1 * w2);
        d.d2t = amp * (s1 * s2p * w1 + s1 * s2 * k2 * w2);
        d.d111 = amp * (s1ppp * s2 * w0 + 3.0 * s1pp * s2 * k1 * w1 + 3.0 * s1p * s2 * k1 * k1 * w2 +
                        s1 * s2 * k1 * k1 * k1 * w3);
        d.d222 = amp * (s1 * s2ppp * w0 + 3.0 * s1 * s2pp * k2 * w1 + 3.0 * s1 * s2p * k2 * k2 * w2 +
                        s1 * s2 * k2 * k2 * k2 * w3);
        d.d112 = amp * (s1pp * s2p * w0 + s1pp * s2 * k2 * w1 + 2.0 * s1p * s2p * k1 * w1 +
                        2.0 * s1p * s2 * k1 * k2 * w2 + s1 * s2p * k1 * k1 * w2 + s1 * s2 * k1 * k1 * k2 * w3);
        d.d122 = amp * (s1p * s2pp * w0 + s1p * s2 * k2 * k2 * w2 + 2.0 * s1p * s2p * k2 * w1 +
                        2.0 * s1 * s2p * k1 * k2 * w2 + s1 * s2pp * k1 * w1 + s1 * s2 * k1 * k2 * k2 * w3);
        return d;
    }
};

const TrigProduct kPsi{std::sqrt(3.0) / (2.0 * kPi), 1.0, 1.0, 0.0, true};
const TrigProduct kP{1.0, 1.0, 2.0, 0.0, false};
const TrigProduct kC11{0.5, 1.0, 0.0, 1.0, true};
const TrigProduct kC22{0.5, 0.0, 1.0, 1.0, true};
const TrigProduct kC12{0.5, 1.0, 1.0, 0.0, true};

}  // namespace

double ExactSolution::psi(Vec2 x, double t) const { return kPsi.eval(x, t).v; }

Vec2 ExactSolution::u(Vec2 x, double t) const {
    const auto d = kPsi.eval(x, t);
    return {d.d2, -d.d1};
}

Vec2 ExactSolution::du_dt(Vec2 x, double t) const {
    const auto d = kPsi.eval(x, t);
    return {d.d2t, -d.d1t};
}

Mat2 ExactSolution::grad_u(Vec2 x, double t) const {
    const auto d = kPsi.eval(x, t);
    return {d.d12, d.d22, -d.d11, -d.d12};
}

Vec2 ExactSolution::laplace_u(Vec2 x, double t) const {
    const auto d = kPsi.eval(x, t);
    return {d.d112 + d.d222, -(d.d111 + d.d122)};
}

double ExactSolution::p(Vec2 x, double t) const { return kP.eval(x, t).v; }

Vec2 ExactSolution::grad_p(Vec2 x, double t) const {
    const auto d = kP.eval(x, t);
    return {d.d1, d.d2};
}

SymMat2 ExactSolution::C(Vec2 x, double t) const {
    return {kC11.eval(x, t).v, kC12.eval(x, t).v, kC22.eval(x, t).v};
}

SymMat2 ExactSolution::dC_dt(Vec2 x, double t) const {
    return {kC11.eval(x, t).dt, kC12.eval(x, t).dt, kC22.eval(x, t).dt};
}

std::array<SymMat2, 2> ExactSolution::grad_C(Vec2 x, double t) const {
    const auto c11 = kC11.eval(x, t), c12 = kC12.eval(x, t), c22 = kC22.eval(x, t);
    return {SymMat2{c11.d1, c12.d1, c22.d1}, SymMat2{c11.d2, c12.d2, c22.d2}};
}

SymMat2 ExactSolution::laplace_C(Vec2 x, double t) const {
    const auto c11 = kC11.eval(x, t), c12 = kC12.eval(x, t), c22 = kC22.eval(x, t);
    return {c11.d11 + c11.d22, c12.d11 + c12.d22, c22.d11 + c22.d22};
}

ForcingValue manufactured_forcing(const ExactSolution& ex, Vec2 x, double t, double nu, double eps) {
    const Vec2 uv = ex.u(x, t);
    const Mat2 gu = ex.grad_u(x, t);
    const Vec2 ut = ex.du_dt(x, t);
    const Vec2 lap_u = ex.laplace_u(x, t);
    const Vec2 gp = ex.grad_p(x, t);
    const SymMat2 c = ex.C(x, t);
    const SymMat2 ct = ex.dC_dt(x, t);
    const auto gc = ex.grad_C(x, t);
    const SymMat2 lap_c = ex.laplace_C(x, t);

    // div[(tr C) C]_i = sum_j (d_j tr C) C_ij + (tr C) d_j C_ij
    const double trc = c.trace();
    const Vec2 grad_trc{gc[0].t11 + gc[0].t22, gc[1].t11 + gc[1].t22};
    const Vec2 div_trcc{grad_trc.x * c.t11 + grad_trc.y * c.t12 + trc * (gc[0].t11 + gc[1].t12),
                        grad_trc.x * c.t12 + grad_trc.y * c.t22 + trc * (gc[0].t12 + gc[1].t22)};

    ForcingValue out;
    // u is divergence-free, so div(2 nu D(u)) = nu Laplace u
    out.f = ut + gu.apply(uv) - lap_u * nu + gp - div_trcc;

    // (grad u) C + C (grad u)^T
    const Mat2 guc = mul(gu, c);
    const SymMat2 stretch{2.0 * guc.a11, guc.a12 + guc.a21, 2.0 * guc.a22};
    const SymMat2 conv = gc[0] * uv.x + gc[1] * uv.y;
    out.F = ct + conv - lap_c * eps - stretch + c * (trc * trc) - identity_sym() * trc;
    return out;
}

ErrorAccumulator::ErrorAccumulator(const TriMesh& mesh, const ExactSolution& ex, double dt)
    : mesh_(&mesh), ex_(&ex), dt_(dt) {}

void ErrorAccumulator::add_state(const FeFunction& u, const FeFunction& p, const FeFunction& c, double t,
                                 int step) {
    const ExactSolution& ex = *ex_;
    const FeFunction iu = FeFunction::interpolate(*mesh_, [&](Vec2 x) { return ex.u(x, t); });
    const FeFunction ip = FeFunction::interpolate(*mesh_, [&](Vec2 x) { return ex.p(x, t); });
    const FeFunction ic = FeFunction::interpolate(*mesh_, [&](Vec2 x) { return ex.C(x, t); });

    const FeNorms du = norms(u - iu), nu = norms(iu);
    const FeNorms dc = norms(c - ic), nc = norms(ic);

    max_diff_u_l2_ = std::max(max_diff_u_l2_, du.l2);
    max_exact_u_l2_ = std::max(max_exact_u_l2_, nu.l2);
    max_diff_c_l2_ = std::max(max_diff_c_l2_, dc.l2);
    max_exact_c_l2_ = std::max(max_exact_c_l2_, nc.l2);

    if (step >= 1) {
        const FeFunction dp = p - ip;
        const FeNorms np = norms(ip);
        const double dpl2 = norms(dp).l2;
        sum_diff_u_h1_ += du.h1() * du.h1();
        sum_exact_u_h1_ += nu.h1() * nu.h1();
        sum_diff_p_l2_ += dpl2 * dpl2;
        sum_exact_p_l2_ += np.l2 * np.l2;
        const double ph = pressure_h_seminorm(dp);
        sum_diff_p_h_ += ph * ph;
        sum_diff_c_h1_ += dc.h1() * dc.h1();
        sum_exact_c_h1_ += nc.h1() * nc.h1();
    }
}

ErrorAccumulator::Errors ErrorAccumulator::finalize() const {
    Errors e{};
    e.er[0] = max_diff_u_l2_ / max_exact_u_l2_;
    e.er[1] = std::sqrt(sum_diff_u_h1_ / sum_exact_u_h1_);
    e.er[2] = std::sqrt(sum_diff_p_l2_ / sum_exact_p_l2_);
    e.er[3] = std::sqrt(dt_ * sum_diff_p_h_) / std::sqrt(dt_ * sum_exact_p_l2_);
    e.er[4] = max_diff_c_l2_ / max_exact_c_l2_;
    e.er[5] = std::sqrt(sum_diff_c_h1_ / sum_exact_c_h1_);
    return e;
}

ErrorAccumulator::Errors relative_errors(const std::vector<StateView>& trajectory, const ExactSolution& ex,
                                         const TriMesh& mesh, double dt) {
    ErrorAccumulator acc(mesh, ex, dt);
    for (std::size_t n = 0; n < trajectory.size(); ++n)
        acc.add_state(*trajectory[n].u, *trajectory[n].p, *trajectory[n].c, trajectory[n].t, static_cast<int>(n));
    return acc.finalize();
}

}  // namespace peterlin

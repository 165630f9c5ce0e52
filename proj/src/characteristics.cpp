#include "peterlin/characteristics.hpp"

#include <cmath>
#include <memory>

namespace peterlin {

namespace {
constexpr double kSnapTol = 1e-10;
}

VelocityField VelocityField::discrete(const FeFunction& u) {
    if (u.kind() != FeKind::vector2) throw std::invalid_argument("VelocityField: vector2 field expected");
    auto holder = std::make_shared<const FeFunction>(u);
    return analytic([holder](Vec2 x, double) {
        const auto loc = holder->mesh().locate(x);
        return holder->eval_vector(loc.tri, loc.bary);
    });
}

bool VelocityField::boundary_compatible(double t) const {
    const int per_side = 25;
    for (int k = 0; k < per_side; ++k) {
        const double s = static_cast<double>(k) / (per_side - 1);
        for (Vec2 p : {Vec2{s, 0.0}, Vec2{s, 1.0}, Vec2{0.0, s}, Vec2{1.0, s}}) {
            if ((*this)(p, t).norm() > 1e-12) return false;
        }
    }
    return true;
}

Vec2 upwind_point(const VelocityField& w, Vec2 x, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("upwind_point: dt must be positive");
    Vec2 y = x - w(x, t) * dt;
    if (y.x < -kSnapTol || y.x > 1.0 + kSnapTol || y.y < -kSnapTol || y.y > 1.0 + kSnapTol)
        throw UpwindEscapeError(y);
    y.x = std::min(1.0, std::max(0.0, y.x));
    y.y = std::min(1.0, std::max(0.0, y.y));
    return y;
}

StepCondition check_step_condition(double w_sup_w1inf, double dt) {
    if (w_sup_w1inf < 0.0) throw std::invalid_argument("check_step_condition: norm must be nonnegative");
    const double p = dt * w_sup_w1inf;
    return {p < 1.0, p <= 0.25};
}

std::vector<double> transported_load(const FeFunction& g_prev, const VelocityField& w, double t, double dt,
                                     const QuadratureRule& quad, std::span<const int> elements) {
    const TriMesh& mesh = g_prev.mesh();
    const int nc = g_prev.components();
    std::vector<double> load(static_cast<std::size_t>(mesh.n_vertices()) * nc, 0.0);

    std::vector<int> all;
    if (elements.empty()) {
        all.resize(mesh.n_triangles());
        for (int i = 0; i < mesh.n_triangles(); ++i) all[i] = i;
        elements = all;
    }

    int hint = -1;
    for (int e : elements) {
        const auto g = element_geom(mesh, e);
        for (const auto& qp : quad.points) {
            const Vec2 xq = mesh.point_from_bary(e, qp.bary);
            const Vec2 foot = upwind_point(w, xq, t, dt);
            const auto loc = mesh.locate(foot, hint);
            hint = loc.tri;
            const double scale = qp.weight * g.area;
            switch (g_prev.kind()) {
                case FeKind::scalar: {
                    const double val = g_prev.eval_scalar(loc.tri, loc.bary);
                    for (int k = 0; k < 3; ++k) load[g.verts[k]] += scale * val * qp.bary[k];
                    break;
                }
                case FeKind::vector2: {
                    const Vec2 val = g_prev.eval_vector(loc.tri, loc.bary);
                    for (int k = 0; k < 3; ++k) {
                        load[g.verts[k] * 2 + 0] += scale * val.x * qp.bary[k];
                        load[g.verts[k] * 2 + 1] += scale * val.y * qp.bary[k];
                    }
                    break;
                }
                case FeKind::symtensor2: {
                    const auto pair = sym_pairing(g_prev.eval_tensor(loc.tri, loc.bary));
                    for (int k = 0; k < 3; ++k)
                        for (int c = 0; c < 3; ++c) load[g.verts[k] * 3 + c] += scale * pair[c] * qp.bary[k];
                    break;
                }
            }
        }
    }
    return load;
}

}  // namespace peterlin

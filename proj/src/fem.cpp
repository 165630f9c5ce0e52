#include "peterlin/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace peterlin {

ElementGeom element_geom(const TriMesh& mesh, int t) {
    ElementGeom g;
    g.verts = mesh.tri(t);
    g.coords = mesh.tri_vertices(t);
    g.area = mesh.area(t);
    const auto [a, b, c] = g.coords;
    const double inv2a = 1.0 / (2.0 * g.area);
    // grad lambda_k is the inward normal of the opposite edge over twice the area
    g.grad[0] = Vec2{b.y - c.y, c.x - b.x} * inv2a;
    g.grad[1] = Vec2{c.y - a.y, a.x - c.x} * inv2a;
    g.grad[2] = Vec2{a.y - b.y, b.x - a.x} * inv2a;
    return g;
}

const QuadratureRule& QuadratureRule::degree2() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.exact_degree = 2;
        const double w = 1.0 / 3.0;
        r.points = {{{0.5, 0.5, 0.0}, w}, {{0.0, 0.5, 0.5}, w}, {{0.5, 0.0, 0.5}, w}};
        return r;
    }();
    return rule;
}

const QuadratureRule& QuadratureRule::degree5() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.exact_degree = 5;
        const double a1 = 0.059715871789769820;
        const double b1 = 0.470142064105115090;
        const double w1 = 0.132394152788506181;
        const double a2 = 0.797426985353087322;
        const double b2 = 0.101286507323456339;
        const double w2 = 0.125939180544827153;
        r.points = {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
                    {{a1, b1, b1}, w1},
                    {{b1, a1, b1}, w1},
                    {{b1, b1, a1}, w1},
                    {{a2, b2, b2}, w2},
                    {{b2, a2, b2}, w2},
                    {{b2, b2, a2}, w2}};
        return r;
    }();
    return rule;
}

double FeFunction::eval_scalar(int tri, const std::array<double, 3>& bary) const {
    const auto& tv = mesh_->tri(tri);
    return bary[0] * at(tv[0], 0) + bary[1] * at(tv[1], 0) + bary[2] * at(tv[2], 0);
}

Vec2 FeFunction::eval_vector(int tri, const std::array<double, 3>& bary) const {
    const auto& tv = mesh_->tri(tri);
    Vec2 v;
    for (int k = 0; k < 3; ++k) v += Vec2{at(tv[k], 0), at(tv[k], 1)} * bary[k];
    return v;
}

SymMat2 FeFunction::eval_tensor(int tri, const std::array<double, 3>& bary) const {
    const auto& tv = mesh_->tri(tri);
    SymMat2 s;
    for (int k = 0; k < 3; ++k) s = s + SymMat2{at(tv[k], 0), at(tv[k], 1), at(tv[k], 2)} * bary[k];
    return s;
}

Vec2 FeFunction::grad_scalar(int tri) const {
    const auto g = element_geom(*mesh_, tri);
    Vec2 r;
    for (int k = 0; k < 3; ++k) r += g.grad[k] * at(g.verts[k], 0);
    return r;
}

Mat2 FeFunction::grad_vector(int tri) const {
    const auto g = element_geom(*mesh_, tri);
    Mat2 m;
    for (int k = 0; k < 3; ++k) {
        m.a11 += at(g.verts[k], 0) * g.grad[k].x;
        m.a12 += at(g.verts[k], 0) * g.grad[k].y;
        m.a21 += at(g.verts[k], 1) * g.grad[k].x;
        m.a22 += at(g.verts[k], 1) * g.grad[k].y;
    }
    return m;
}

std::array<Vec2, 3> FeFunction::grad_tensor(int tri) const {
    const auto g = element_geom(*mesh_, tri);
    std::array<Vec2, 3> r{};
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k) r[c] += g.grad[k] * at(g.verts[k], c);
    return r;
}

FeFunction FeFunction::interpolate(const TriMesh& mesh, const std::function<double(Vec2)>& f) {
    FeFunction r(mesh, FeKind::scalar);
    for (int v = 0; v < mesh.n_vertices(); ++v) r.at(v, 0) = f(mesh.vertex(v));
    return r;
}

FeFunction FeFunction::interpolate(const TriMesh& mesh, const std::function<Vec2(Vec2)>& f) {
    FeFunction r(mesh, FeKind::vector2);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec2 val = f(mesh.vertex(v));
        r.at(v, 0) = val.x;
        r.at(v, 1) = val.y;
    }
    return r;
}

FeFunction FeFunction::interpolate(const TriMesh& mesh, const std::function<SymMat2(Vec2)>& f) {
    FeFunction r(mesh, FeKind::symtensor2);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const SymMat2 val = f(mesh.vertex(v));
        r.at(v, 0) = val.t11;
        r.at(v, 1) = val.t12;
        r.at(v, 2) = val.t22;
    }
    return r;
}

FeFunction FeFunction::operator-(const FeFunction& o) const {
    if (kind_ != o.kind_ || mesh_ != o.mesh_) throw std::invalid_argument("FeFunction mismatch");
    FeFunction r = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] -= o.coeffs_[i];
    return r;
}

FeFunction FeFunction::operator+(const FeFunction& o) const {
    if (kind_ != o.kind_ || mesh_ != o.mesh_) throw std::invalid_argument("FeFunction mismatch");
    FeFunction r = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += o.coeffs_[i];
    return r;
}

FeFunction FeFunction::operator*(double s) const {
    FeFunction r = *this;
    for (double& c : r.coeffs_) c *= s;
    return r;
}

namespace {

// weight of each component in the L2 pairing: symmetric tensors count the
// off-diagonal twice (Frobenius), scalars and vectors once
double component_weight(int components, int c) {
    return (components == 3 && c == 1) ? 2.0 : 1.0;
}

constexpr double kMassCoef[3][3] = {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};

}  // namespace

SparseMatrix assemble_mass(const TriMesh& mesh, int components) {
    if (components < 1 || components > 3) throw std::invalid_argument("assemble_mass: components in {1,2,3}");
    const int n = mesh.n_vertices() * components;
    CooBuilder coo(n, n);
    coo.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 9 * components);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        const double s = g.area / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int c = 0; c < components; ++c)
                    coo.add(g.verts[i] * components + c, g.verts[j] * components + c,
                            component_weight(components, c) * s * kMassCoef[i][j]);
    }
    return coo.finalize();
}

SparseMatrix assemble_au(const TriMesh& mesh) {
    const int n = mesh.n_vertices() * 2;
    CooBuilder coo(n, n);
    coo.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 36);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        for (int i = 0; i < 3; ++i) {
            for (int a = 0; a < 2; ++a) {
                // D(e_a lambda_i) = sym(e_a grad_i^T)
                const Mat2 gi = a == 0 ? Mat2{g.grad[i].x, g.grad[i].y, 0, 0} : Mat2{0, 0, g.grad[i].x, g.grad[i].y};
                const SymMat2 di = sym_part(gi);
                for (int j = 0; j < 3; ++j) {
                    for (int b = 0; b < 2; ++b) {
                        const Mat2 gj =
                            b == 0 ? Mat2{g.grad[j].x, g.grad[j].y, 0, 0} : Mat2{0, 0, g.grad[j].x, g.grad[j].y};
                        const SymMat2 dj = sym_part(gj);
                        coo.add(g.verts[i] * 2 + a, g.verts[j] * 2 + b, 2.0 * g.area * ddot(di, dj));
                    }
                }
            }
        }
    }
    return coo.finalize();
}

SparseMatrix assemble_b(const TriMesh& mesh) {
    const int nv = mesh.n_vertices();
    CooBuilder coo(nv, nv * 2);
    coo.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 18);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        for (int j = 0; j < 3; ++j) {
            for (int b = 0; b < 2; ++b) {
                const double div = b == 0 ? g.grad[j].x : g.grad[j].y;  // div of e_b lambda_j
                for (int i = 0; i < 3; ++i) coo.add(g.verts[i], g.verts[j] * 2 + b, -div * g.area / 3.0);
            }
        }
    }
    return coo.finalize();
}

SparseMatrix assemble_sh(const TriMesh& mesh, double delta0) {
    if (!(delta0 > 0.0)) throw std::invalid_argument("assemble_sh: delta0 must be positive");
    const int nv = mesh.n_vertices();
    CooBuilder coo(nv, nv);
    coo.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        const double hk2 = mesh.diameter(t) * mesh.diameter(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                coo.add(g.verts[i], g.verts[j], delta0 * hk2 * g.area * g.grad[i].dot(g.grad[j]));
    }
    return coo.finalize();
}

SparseMatrix assemble_ac(const TriMesh& mesh) {
    const int n = mesh.n_vertices() * 3;
    CooBuilder coo(n, n);
    coo.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 27);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double k = g.area * g.grad[i].dot(g.grad[j]);
                for (int c = 0; c < 3; ++c)
                    coo.add(g.verts[i] * 3 + c, g.verts[j] * 3 + c, component_weight(3, c) * k);
            }
    }
    return coo.finalize();
}

double FeNorms::h1() const { return std::sqrt(l2 * l2 + h1_semi * h1_semi); }

FeNorms norms(const FeFunction& f) {
    const TriMesh& mesh = f.mesh();
    const int nc = f.components();
    double l2sq = 0.0, h1sq = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        for (int c = 0; c < nc; ++c) {
            const double w = component_weight(nc, c);
            const double v0 = f.at(g.verts[0], c), v1 = f.at(g.verts[1], c), v2 = f.at(g.verts[2], c);
            // exact element mass: area/12 * [[2,1,1],[1,2,1],[1,1,2]]
            l2sq += w * g.area / 12.0 *
                    (2.0 * (v0 * v0 + v1 * v1 + v2 * v2) + 2.0 * (v0 * v1 + v1 * v2 + v0 * v2));
            Vec2 gr = g.grad[0] * v0 + g.grad[1] * v1 + g.grad[2] * v2;
            h1sq += w * g.area * gr.dot(gr);
        }
    }
    return {std::sqrt(l2sq), std::sqrt(h1sq)};
}

double pressure_h_seminorm(const FeFunction& p) {
    if (p.kind() != FeKind::scalar) throw std::invalid_argument("pressure_h_seminorm: scalar field expected");
    const TriMesh& mesh = p.mesh();
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 gr = p.grad_scalar(t);
        const double hk = mesh.diameter(t);
        acc += hk * hk * mesh.area(t) * gr.dot(gr);
    }
    return std::sqrt(acc);
}

double integral(const FeFunction& p) {
    if (p.kind() != FeKind::scalar) throw std::invalid_argument("integral: scalar field expected");
    const TriMesh& mesh = p.mesh();
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tv = mesh.tri(t);
        acc += mesh.area(t) / 3.0 * (p.at(tv[0], 0) + p.at(tv[1], 0) + p.at(tv[2], 0));
    }
    return acc;
}

}  // namespace peterlin

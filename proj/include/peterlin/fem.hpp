#pragma once

#include <array>
#include <functional>
#include <vector>

#include "peterlin/linalg.hpp"
#include "peterlin/mesh.hpp"
#include "peterlin/tensor.hpp"

namespace peterlin {

enum class FeKind { scalar, vector2, symtensor2 };

constexpr int fe_components(FeKind k) {
    return k == FeKind::scalar ? 1 : (k == FeKind::vector2 ? 2 : 3);
}

/// Per-triangle geometry used by every assembly loop: P1 basis gradients are
/// constant on the element.
struct ElementGeom {
    std::array<int, 3> verts;
    std::array<Vec2, 3> coords;
    std::array<Vec2, 3> grad;  // gradient of the barycentric basis function of each vertex
    double area;
};

ElementGeom element_geom(const TriMesh& mesh, int t);

/// Symmetric quadrature rule on the reference triangle; weights are
/// normalized to sum to 1 (multiply by the element area).
struct QuadratureRule {
    struct Point {
        std::array<double, 3> bary;
        double weight;
    };
    std::vector<Point> points;
    int exact_degree = 0;

    /// 3-point midpoint rule, exact through degree 2.
    static const QuadratureRule& degree2();
    /// 7-point rule, exact through degree 5; used for the trilinear terms
    /// (degree up to 4) and for analytic forcing data.
    static const QuadratureRule& degree5();
};

/// Continuous piecewise-linear function over a mesh. Components are stored
/// interleaved per node; symmetric tensors as (T11, T12, T22) with T21 == T12
/// by construction.
class FeFunction {
public:
    FeFunction(const TriMesh& mesh, FeKind kind)
        : mesh_(&mesh), kind_(kind), coeffs_(static_cast<std::size_t>(mesh.n_vertices()) * fe_components(kind), 0.0) {}

    FeKind kind() const { return kind_; }
    const TriMesh& mesh() const { return *mesh_; }
    int components() const { return fe_components(kind_); }
    int n_dofs() const { return static_cast<int>(coeffs_.size()); }

    double& at(int node, int comp) { return coeffs_[static_cast<std::size_t>(node) * components() + comp]; }
    double at(int node, int comp) const { return coeffs_[static_cast<std::size_t>(node) * components() + comp]; }
    std::vector<double>& coeffs() { return coeffs_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double eval_scalar(int tri, const std::array<double, 3>& bary) const;
    Vec2 eval_vector(int tri, const std::array<double, 3>& bary) const;
    SymMat2 eval_tensor(int tri, const std::array<double, 3>& bary) const;

    /// Piecewise-constant gradients. For vector2 the (i,j) entry is
    /// du_i/dx_j; for symtensor2 one gradient per stored component.
    Vec2 grad_scalar(int tri) const;
    Mat2 grad_vector(int tri) const;
    std::array<Vec2, 3> grad_tensor(int tri) const;

    static FeFunction interpolate(const TriMesh& mesh, const std::function<double(Vec2)>& f);
    static FeFunction interpolate(const TriMesh& mesh, const std::function<Vec2(Vec2)>& f);
    static FeFunction interpolate(const TriMesh& mesh, const std::function<SymMat2(Vec2)>& f);

    FeFunction operator-(const FeFunction& o) const;
    FeFunction operator+(const FeFunction& o) const;
    FeFunction operator*(double s) const;

private:
    const TriMesh* mesh_;
    FeKind kind_;
    std::vector<double> coeffs_;
};

/// Symmetric part of a velocity gradient, D(u) = (grad u + grad u^T) / 2.
inline SymMat2 sym_part(const Mat2& g) {
    return {g.a11, 0.5 * (g.a12 + g.a21), g.a22};
}

/// Mass matrix, block-decoupled by component, from the exact P1 element mass.
/// With components == 3 it realizes the symmetric-tensor inner product
/// (C, D) = int C : D, so the off-diagonal component carries weight 2.
SparseMatrix assemble_mass(const TriMesh& mesh, int components);

/// 2 (D(u), D(v)) on vector2 dofs; symmetric positive semidefinite.
SparseMatrix assemble_au(const TriMesh& mesh);

/// b(u, q) = -(div u, q); rows are scalar (pressure) dofs, columns vector2.
SparseMatrix assemble_b(const TriMesh& mesh);

/// Pressure stabilization delta0 * sum_K h_K^2 (grad p, grad q)_K.
SparseMatrix assemble_sh(const TriMesh& mesh, double delta0);

/// (grad C, grad D) on symtensor2 dofs; the T12 block carries weight 2.
SparseMatrix assemble_ac(const TriMesh& mesh);

struct FeNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1() const;
};

/// Exact L2 / H1-seminorm of a P1 function (matrix components weighted by
/// Frobenius multiplicity).
FeNorms norms(const FeFunction& f);

/// { sum_K h_K^2 (grad p, grad p)_K }^(1/2)
double pressure_h_seminorm(const FeFunction& p);

/// int_Omega p
double integral(const FeFunction& p);

}  // namespace peterlin

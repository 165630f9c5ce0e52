#pragma once

#include <array>

#include "peterlin/fem.hpp"
#include "peterlin/tensor.hpp"

namespace peterlin {

/// Closed-form benchmark solution on the unit square:
///   psi = sqrt(3)/(2 pi) sin^2(pi x1) sin^2(pi x2) sin(pi (x1 + x2 + t))
///   u   = (d psi / d x2, -d psi / d x1)              (divergence-free)
///   p   = sin(pi (x1 + 2 x2 + t))
///   C   = 1/2 sin^2(pi x1) sin^2(pi x2) *
///         [sin(pi(x1+t)), sin(pi(x1+x2+t)); ., sin(pi(x2+t))] + I
/// u vanishes on the boundary and C has vanishing normal derivative there.
/// All derivatives up to what the forcing needs are available analytically.
class ExactSolution {
public:
    double psi(Vec2 x, double t) const;

    Vec2 u(Vec2 x, double t) const;
    Vec2 du_dt(Vec2 x, double t) const;
    Mat2 grad_u(Vec2 x, double t) const;  // (i,j) = d u_i / d x_j
    Vec2 laplace_u(Vec2 x, double t) const;

    double p(Vec2 x, double t) const;
    Vec2 grad_p(Vec2 x, double t) const;

    SymMat2 C(Vec2 x, double t) const;
    SymMat2 dC_dt(Vec2 x, double t) const;
    std::array<SymMat2, 2> grad_C(Vec2 x, double t) const;  // d C / d x1, d C / d x2
    SymMat2 laplace_C(Vec2 x, double t) const;
};

struct ForcingValue {
    Vec2 f;
    SymMat2 F;
};

/// Momentum and conformation forcing obtained by substituting the exact
/// solution into the strong equations, with the transport velocity equal to
/// the exact velocity.
ForcingValue manufactured_forcing(const ExactSolution& ex, Vec2 x, double t, double nu, double eps);

/// Relative space-time error norms of a discrete trajectory against the
/// nodal interpolant of the exact solution, accumulated one state at a time:
///   Er1/Er2 velocity in linf(L2) / l2(H1), Er3/Er4 pressure in l2(L2) and
///   the mesh-weighted l2(|.|_h), Er5/Er6 conformation in linf(L2) / l2(H1).
/// The max norms run over n = 0..N_T; the l2 sums start at n = 1.
class ErrorAccumulator {
public:
    ErrorAccumulator(const TriMesh& mesh, const ExactSolution& ex, double dt);

    /// Feed states in time order, starting with the initial one (step 0).
    void add_state(const FeFunction& u, const FeFunction& p, const FeFunction& c, double t, int step);

    struct Errors {
        double er[6];
    };
    Errors finalize() const;

private:
    const TriMesh* mesh_;
    const ExactSolution* ex_;
    double dt_;
    double max_diff_u_l2_ = 0.0, max_exact_u_l2_ = 0.0;
    double sum_diff_u_h1_ = 0.0, sum_exact_u_h1_ = 0.0;
    double sum_diff_p_l2_ = 0.0, sum_exact_p_l2_ = 0.0;
    double sum_diff_p_h_ = 0.0;
    double max_diff_c_l2_ = 0.0, max_exact_c_l2_ = 0.0;
    double sum_diff_c_h1_ = 0.0, sum_exact_c_h1_ = 0.0;
};

struct StateView {
    const FeFunction* u;
    const FeFunction* p;
    const FeFunction* c;
    double t;
};

/// Whole-trajectory convenience over ErrorAccumulator.
ErrorAccumulator::Errors relative_errors(const std::vector<StateView>& trajectory, const ExactSolution& ex,
                                         const TriMesh& mesh, double dt);

}  // namespace peterlin

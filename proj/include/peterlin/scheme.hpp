#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peterlin/characteristics.hpp"
#include "peterlin/fem.hpp"
#include "peterlin/linalg.hpp"
#include "peterlin/mesh.hpp"

namespace peterlin {

struct SchemeParams {
    double nu = 0.1;            // fluid viscosity
    double eps = 0.1;           // elastic stress viscosity (0 allowed: no tensor diffusion)
    double delta0 = 1.0;        // pressure stabilization constant
    double dt = 1.0 / 64.0;
    double t_end = 0.5;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double damping_min = 1.0 / 1024.0;

    void validate() const;
    int n_steps() const;  // floor(t_end / dt), robust to roundoff
};

/// One time level (u, p, C). Velocity is zero on the boundary, pressure has
/// zero mean, C is symmetric by storage.
struct StateTriple {
    FeFunction u;
    FeFunction p;
    FeFunction c;
    double t = 0.0;

    static StateTriple zero(const TriMesh& mesh);
};

/// Adjugate of a symmetric 2x2 matrix: D D^# = det(D) I.
inline SymMat2 adjugate(const SymMat2& d) { return {d.t22, -d.t12, d.t11}; }

/// (tr D) D : E - E D : D - 1/2 (tr E) D^# : D; identically zero, kept as a
/// test oracle for the role of the adjugate term.
double lemma5_residual(const Mat2& e, const SymMat2& d);

/// Pointwise data of the target flow for the Stokes projection right side.
struct FlowSample {
    Mat2 grad_u;
    double p = 0.0;
};
using FlowSampler = std::function<FlowSample(int tri, const std::array<double, 3>& bary, Vec2 x)>;

/// Discrete pair matching the continuous Stokes operator against all
/// discrete test pairs; the returned pressure has zero mean.
std::pair<FeFunction, FeFunction> stokes_project(const TriMesh& mesh, double nu, double delta0,
                                                 const FlowSampler& flow);

struct ForcingSample {
    Vec2 f;
    SymMat2 F;
};

struct ForcingFields {
    std::function<ForcingSample(Vec2, double)> eval;  // null means homogeneous

    static ForcingFields none() { return {nullptr}; }
};

struct NewtonError : std::runtime_error {
    NewtonError(const std::string& what, double res, int iters)
        : std::runtime_error(what), residual(res), iterations(iters) {}
    double residual;
    int iterations;
};

/// Monolithic solver for the nonlinear stabilized characteristics scheme:
/// per step one Newton iteration on the coupled (u, p, C) system with an
/// analytic Jacobian, backtracking damping and the previous state as initial
/// guess. The transporting velocity w is given (Oseen type).
class Solver {
public:
    struct Options {
        /// Constrain u = 0 and p = 0: the conformation equation decouples and
        /// is stepped alone (reaction/diffusion oracle runs).
        bool freeze_flow = false;
    };

    struct StepStats {
        int newton_iters = 0;
        double residual_norm = 0.0;
    };

    Solver(const TriMesh& mesh, const SchemeParams& params, VelocityField w, ForcingFields forcing,
           Options options);
    Solver(const TriMesh& mesh, const SchemeParams& params, VelocityField w, ForcingFields forcing);

    const TriMesh& mesh() const { return *mesh_; }
    const SchemeParams& params() const { return params_; }

    /// Initial data: velocity from the Stokes projection of (u0, 0), pressure
    /// the projected one, conformation the nodal interpolant of c0.
    StateTriple initial_state(const FlowSampler& u0_flow, const std::function<SymMat2(Vec2)>& c0) const;

    StateTriple advance(const StateTriple& prev, StepStats* stats = nullptr);

    using StepCallback = std::function<void(const StateTriple&, int step, const StepStats&)>;

    /// Full time loop over n_steps() steps; returns all states including the
    /// initial one. Step failures are rethrown with the step index attached.
    std::vector<StateTriple> run(const StateTriple& initial, const StepCallback& on_step = {});

    /// Scheme residual of `candidate` given the previous state; equations are
    /// moved to one side and boundary velocity rows carry the velocity value
    /// itself. Exposed for consistency and Jacobian tests.
    std::vector<double> residual_vector(const StateTriple& prev, const StateTriple& candidate) const;

    /// Residual of a packed coefficient vector [u p c lambda].
    std::vector<double> residual_raw(const StateTriple& prev, std::span<const double> x) const;

    /// Analytic Jacobian action at the packed point x on a direction.
    std::vector<double> jacobian_apply_raw(std::span<const double> x, std::span<const double> direction) const;

    std::vector<double> pack(const StateTriple& s) const;  // [u p c lambda]
    StateTriple unpack(std::span<const double> x, double t) const;

    int n_dofs() const { return n_total_; }

private:
    struct StepContext {
        double t_new = 0.0;
        std::vector<double> rhs;  // transported loads / dt + forcing, fixed rows zero
        double rhs_norm = 0.0;
    };

    StepContext prepare_step(const StateTriple& prev) const;
    std::vector<double> residual_at(const StepContext& ctx, std::span<const double> x) const;
    void fill_jacobian(std::span<const double> x);
    void build_pattern();

    const TriMesh* mesh_;
    SchemeParams params_;
    VelocityField w_;
    ForcingFields forcing_;
    Options options_;

    int n_u_, n_p_, n_c_, n_total_;
    std::vector<bool> fixed_;  // Dirichlet velocity dofs (+ flow dofs when frozen)

    SparseMatrix mass_u_, au_, b_, bt_, sh_, mass_c_, ac_, ktr_;
    std::vector<double> pmean_;  // integral of each pressure basis function

    // fixed-pattern Jacobian storage
    std::vector<int> joff_, jcol_;
    std::vector<double> jval_;
    SparseLu lu_;
};

/// Step-size diagnostics: characteristics conditions and the uniqueness
/// step bounds with all non-computable constants taken as 1. Advisory only.
struct AdvisoryReport {
    double w_w1inf_estimate = 0.0;
    bool bijective = true;
    bool jacobian_bounded = true;
    bool uniqueness_bound_ok = true;
    std::string message;
};

AdvisoryReport advisory_check(const TriMesh& mesh, const SchemeParams& params, const VelocityField& w);

}  // namespace peterlin

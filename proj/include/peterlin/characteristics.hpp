#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "peterlin/fem.hpp"

namespace peterlin {

/// Thrown when an upwind point leaves the domain by more than the snap
/// tolerance; signals a violated step condition rather than roundoff.
struct UpwindEscapeError : std::runtime_error {
    explicit UpwindEscapeError(Vec2 p)
        : std::runtime_error("upwind point escaped domain"), point(p) {}
    Vec2 point;
};

/// Transporting velocity: analytic closure or a snapshot of a discrete
/// velocity field. Pure; safe for concurrent evaluation.
class VelocityField {
public:
    using Fn = std::function<Vec2(Vec2, double)>;

    static VelocityField analytic(Fn f) {
        VelocityField w;
        w.fn_ = std::move(f);
        return w;
    }

    /// Evaluates an FE vector field (time argument ignored).
    static VelocityField discrete(const FeFunction& u);

    static VelocityField zero() {
        return analytic([](Vec2, double) { return Vec2{}; });
    }

    Vec2 operator()(Vec2 x, double t) const { return fn_(x, t); }

    /// Samples 100 boundary points; true when |w| <= 1e-12 on all of them.
    bool boundary_compatible(double t) const;

private:
    Fn fn_;
};

/// First-order upwind point x - w(x, t) dt, snapped to the boundary within
/// 1e-10; farther escapes throw UpwindEscapeError.
Vec2 upwind_point(const VelocityField& w, Vec2 x, double t, double dt);

struct StepCondition {
    bool bijective;         // dt |w|_{C(W^{1,inf})} < 1
    bool jacobian_bounded;  // dt |w|_{C(W^{1,inf})} <= 1/4
};

StepCondition check_step_condition(double w_sup_w1inf, double dt);

/// Load vector (g_prev o X1, phi) for every test basis function of g_prev's
/// own space. Quadrature points are pulled back along the characteristics and
/// g_prev is evaluated at the located foot. Symmetric-tensor rows use the
/// C : D pairing (off-diagonal weight 2). When `elements` is nonempty only
/// those elements are integrated.
std::vector<double> transported_load(const FeFunction& g_prev, const VelocityField& w, double t, double dt,
                                     const QuadratureRule& quad, std::span<const int> elements = {});

}  // namespace peterlin

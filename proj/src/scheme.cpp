#include "peterlin/scheme.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>


namespace peterlin {



namespace {

// symmetric component basis T_0 = e11, T_1 = e12 + e21, T_2 = e22
const SymMat2 kSymBasis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
constexpr double kTraceT[3] = {1.0, 0.0, 1.0};

std::array<double, 3> pairing_row(int a, Vec2 w) {
    // sym pairing of e_a (x) w^T (row a equals w)
    return a == 0 ? std::array<double, 3>{w.x, w.y, 0.0} : std::array<double, 3>{0.0, w.x, w.y};
}

}  // namespace

void SchemeParams::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("params: nu must be positive");
    if (!(eps >= 0.0)) throw std::invalid_argument("params: eps must be nonnegative");
    if (!(delta0 > 0.0)) throw std::invalid_argument("params: delta0 must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("params: dt must be positive");
    if (!(t_end >= dt)) throw std::invalid_argument("params: t_end must be at least dt");
    if (!(newton_tol > 0.0) || newton_max_iter < 1 || !(damping_min > 0.0) || damping_min > 1.0)
        throw std::invalid_argument("params: bad newton controls");
}

int SchemeParams::n_steps() const { return static_cast<int>(std::floor(t_end / dt + 1e-10)); }

StateTriple StateTriple::zero(const TriMesh& mesh) {
    return {FeFunction(mesh, FeKind::vector2), FeFunction(mesh, FeKind::scalar),
            FeFunction(mesh, FeKind::symtensor2), 0.0};
}

double lemma5_residual(const Mat2& e, const SymMat2& d) {
    const Mat2 df = d.full();
    const Mat2 ed = mul(e, d);
    return d.trace() * ddot(df, e) - ddot(ed, df) - 0.5 * e.trace() * ddot(adjugate(d), d);
}

// ---------------------------------------------------------------------------
// Stokes projection

std::pair<FeFunction, FeFunction> stokes_project(const TriMesh& mesh, double nu, double delta0,
                                                 const FlowSampler& flow) {
    const int nv = mesh.n_vertices();
    const int nu_dofs = 2 * nv;
    const int n = nu_dofs + nv + 1;  // velocity, pressure, mean multiplier

    std::vector<bool> fixed(n, false);
    for (int v = 0; v < nv; ++v)
        if (mesh.boundary_vertex(v)) fixed[2 * v] = fixed[2 * v + 1] = true;

    const SparseMatrix au = assemble_au(mesh);
    const SparseMatrix b = assemble_b(mesh);
    const SparseMatrix sh = assemble_sh(mesh, delta0);

    CooBuilder coo(n, n);
    auto add = [&](int r, int c, double v) {
        if (fixed[r] || fixed[c]) return;
        coo.add(r, c, v);
    };
    for (int r = 0; r < au.rows(); ++r)
        for (int k = au.row_offsets()[r]; k < au.row_offsets()[r + 1]; ++k)
            add(r, au.col_indices()[k], nu * au.values()[k]);
    for (int r = 0; r < b.rows(); ++r)
        for (int k = b.row_offsets()[r]; k < b.row_offsets()[r + 1]; ++k) {
            add(nu_dofs + r, b.col_indices()[k], b.values()[k]);      // B
            add(b.col_indices()[k], nu_dofs + r, b.values()[k]);      // B^T
        }
    for (int r = 0; r < sh.rows(); ++r)
        for (int k = sh.row_offsets()[r]; k < sh.row_offsets()[r + 1]; ++k)
            add(nu_dofs + r, nu_dofs + sh.col_indices()[k], -sh.values()[k]);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tv = mesh.tri(t);
        for (int k = 0; k < 3; ++k) {
            add(nu_dofs + tv[k], n - 1, mesh.area(t) / 3.0);
            add(n - 1, nu_dofs + tv[k], mesh.area(t) / 3.0);
        }
    }
    for (int d = 0; d < n; ++d)
        if (fixed[d]) coo.add(d, d, 1.0);

    // right side: nu a_u(u, v) + b(v, p) against velocity tests, b(u, q)
    // against pressure tests, assembled with the degree-5 rule
    std::vector<double> rhs(n, 0.0);
    const auto& quad = QuadratureRule::degree5();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geom(mesh, t);
        for (const auto& qp : quad.points) {
            const Vec2 x = mesh.point_from_bary(t, qp.bary);
            const FlowSample s = flow(t, qp.bary, x);
            const SymMat2 du = sym_part(s.grad_u);
            const double divu = s.grad_u.trace();
            const double scale = qp.weight * g.area;
            for (int i = 0; i < 3; ++i) {
                for (int a = 0; a < 2; ++a) {
                    const Mat2 gv = a == 0 ? Mat2{g.grad[i].x, g.grad[i].y, 0, 0}
                                           : Mat2{0, 0, g.grad[i].x, g.grad[i].y};
                    const SymMat2 dv = sym_part(gv);
                    const double divv = a == 0 ? g.grad[i].x : g.grad[i].y;
                    rhs[g.verts[i] * 2 + a] += scale * (2.0 * nu * ddot(du, dv) - divv * s.p);
                }
                rhs[nu_dofs + g.verts[i]] += scale * (-divu * qp.bary[i]);
            }
        }
    }
    for (int d = 0; d < n; ++d)
        if (fixed[d]) rhs[d] = 0.0;

    const std::vector<double> x = solve(coo.finalize(), rhs);

    FeFunction uh(mesh, FeKind::vector2), ph(mesh, FeKind::scalar);
    for (int v = 0; v < nv; ++v) {
        uh.at(v, 0) = x[2 * v];
        uh.at(v, 1) = x[2 * v + 1];
        ph.at(v, 0) = x[nu_dofs + v];
    }
    return {std::move(uh), std::move(ph)};
}

// ---------------------------------------------------------------------------
// Solver

Solver::Solver(const TriMesh& mesh, const SchemeParams& params, VelocityField w, ForcingFields forcing)
    : Solver(mesh, params, std::move(w), std::move(forcing), Options{}) {}

Solver::Solver(const TriMesh& mesh, const SchemeParams& params, VelocityField w, ForcingFields forcing,
               Options options)
    : mesh_(&mesh), params_(params), w_(std::move(w)), forcing_(std::move(forcing)), options_(options) {
    params_.validate();
    const int nv = mesh.n_vertices();
    n_u_ = 2 * nv;
    n_p_ = nv;
    n_c_ = 3 * nv;
    n_total_ = n_u_ + n_p_ + n_c_ + 1;

    fixed_.assign(n_total_, false);
    for (int v = 0; v < nv; ++v)
        if (mesh.boundary_vertex(v)) fixed_[2 * v] = fixed_[2 * v + 1] = true;
    if (options_.freeze_flow) {
        for (int d = 0; d < n_u_ + n_p_; ++d) fixed_[d] = true;
        fixed_[n_total_ - 1] = true;
    }

    mass_u_ = assemble_mass(mesh, 2);
    au_ = assemble_au(mesh);
    b_ = assemble_b(mesh);
    sh_ = assemble_sh(mesh, params_.delta0);
    mass_c_ = assemble_mass(mesh, 3);
    ac_ = assemble_ac(mesh);

    {
        CooBuilder bt(n_u_, n_p_);
        for (int r = 0; r < b_.rows(); ++r)
            for (int k = b_.row_offsets()[r]; k < b_.row_offsets()[r + 1]; ++k)
                bt.add(b_.col_indices()[k], r, b_.values()[k]);
        bt_ = bt.finalize();
    }
    {
        // ((tr C) I, D): couples the diagonal tensor components through the
        // scalar mass matrix
        const SparseMatrix m1 = assemble_mass(mesh, 1);
        CooBuilder kt(n_c_, n_c_);
        for (int r = 0; r < m1.rows(); ++r)
            for (int k = m1.row_offsets()[r]; k < m1.row_offsets()[r + 1]; ++k) {
                const int c = m1.col_indices()[k];
                const double v = m1.values()[k];
                for (int kr : {0, 2})
                    for (int kc : {0, 2}) kt.add(3 * r + kr, 3 * c + kc, v);
            }
        ktr_ = kt.finalize();
    }

    pmean_.assign(nv, 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tv = mesh.tri(t);
        for (int k = 0; k < 3; ++k) pmean_[tv[k]] += mesh.area(t) / 3.0;
    }

    build_pattern();
}

std::vector<double> Solver::pack(const StateTriple& s) const {
    std::vector<double> x(n_total_, 0.0);
    std::copy(s.u.coeffs().begin(), s.u.coeffs().end(), x.begin());
    std::copy(s.p.coeffs().begin(), s.p.coeffs().end(), x.begin() + n_u_);
    std::copy(s.c.coeffs().begin(), s.c.coeffs().end(), x.begin() + n_u_ + n_p_);
    return x;
}

StateTriple Solver::unpack(std::span<const double> x, double t) const {
    StateTriple s = StateTriple::zero(*mesh_);
    std::copy(x.begin(), x.begin() + n_u_, s.u.coeffs().begin());
    std::copy(x.begin() + n_u_, x.begin() + n_u_ + n_p_, s.p.coeffs().begin());
    std::copy(x.begin() + n_u_ + n_p_, x.begin() + n_u_ + n_p_ + n_c_, s.c.coeffs().begin());
    s.t = t;
    return s;
}

Solver::StepContext Solver::prepare_step(const StateTriple& prev) const {
    StepContext ctx;
    ctx.t_new = prev.t + params_.dt;
    ctx.rhs.assign(n_total_, 0.0);

    const auto& quad = QuadratureRule::degree5();
    const double inv_dt = 1.0 / params_.dt;

    const std::vector<double> lu = transported_load(prev.u, w_, ctx.t_new, params_.dt, quad);
    for (int d = 0; d < n_u_; ++d) ctx.rhs[d] += inv_dt * lu[d];
    const std::vector<double> lc = transported_load(prev.c, w_, ctx.t_new, params_.dt, quad);
    for (int d = 0; d < n_c_; ++d) ctx.rhs[n_u_ + n_p_ + d] += inv_dt * lc[d];

    if (forcing_.eval) {
        for (int t = 0; t < mesh_->n_triangles(); ++t) {
            const auto g = element_geom(*mesh_, t);
            for (const auto& qp : quad.points) {
                const Vec2 x = mesh_->point_from_bary(t, qp.bary);
                const double scale = qp.weight * g.area;
                const ForcingSample fs = forcing_.eval(x, ctx.t_new);
                const auto pf = sym_pairing(fs.F);
                for (int k = 0; k < 3; ++k) {
                    ctx.rhs[g.verts[k] * 2 + 0] += scale * fs.f.x * qp.bary[k];
                    ctx.rhs[g.verts[k] * 2 + 1] += scale * fs.f.y * qp.bary[k];
                    for (int c = 0; c < 3; ++c)
                        ctx.rhs[n_u_ + n_p_ + g.verts[k] * 3 + c] += scale * pf[c] * qp.bary[k];
                }
            }
        }
    }

    for (int d = 0; d < n_total_; ++d)
        if (fixed_[d]) ctx.rhs[d] = 0.0;
    ctx.rhs_norm = norm2(ctx.rhs);
    return ctx;
}

std::vector<double> Solver::residual_at(const StepContext& ctx, std::span<const double> x) const {
    std::vector<double> r(n_total_, 0.0);
    const double inv_dt = 1.0 / params_.dt;
    const int cb = n_u_ + n_p_;  // conformation block offset

    const std::span<const double> xu = x.subspan(0, n_u_);
    const std::span<const double> xp = x.subspan(n_u_, n_p_);
    const std::span<const double> xc = x.subspan(cb, n_c_);
    const double lambda = x[n_total_ - 1];

    std::span<double> ru(r.data(), n_u_);
    std::span<double> rp(r.data() + n_u_, n_p_);
    std::span<double> rc(r.data() + cb, n_c_);

    mass_u_.multiply_add(xu, inv_dt, ru);
    au_.multiply_add(xu, params_.nu, ru);
    bt_.multiply_add(xp, 1.0, ru);
    b_.multiply_add(xu, 1.0, rp);
    sh_.multiply_add(xp, -1.0, rp);
    mass_c_.multiply_add(xc, inv_dt, rc);
    if (params_.eps != 0.0) ac_.multiply_add(xc, params_.eps, rc);
    ktr_.multiply_add(xc, -1.0, rc);
    for (int v = 0; v < n_p_; ++v) {
        rp[v] += pmean_[v] * lambda;
        r[n_total_ - 1] += pmean_[v] * xp[v];
    }

    // nonlinear terms, degree-5 quadrature
    const auto& quad = QuadratureRule::degree5();
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto g = element_geom(*mesh_, t);
        Mat2 gu;
        SymMat2 cn[3];
        for (int k = 0; k < 3; ++k) {
            const Vec2 uk{xu[g.verts[k] * 2], xu[g.verts[k] * 2 + 1]};
            gu.a11 += uk.x * g.grad[k].x;
            gu.a12 += uk.x * g.grad[k].y;
            gu.a21 += uk.y * g.grad[k].x;
            gu.a22 += uk.y * g.grad[k].y;
            cn[k] = {xc[g.verts[k] * 3], xc[g.verts[k] * 3 + 1], xc[g.verts[k] * 3 + 2]};
        }
        const double divu = gu.trace();

        double lru[6] = {};
        double lrc[9] = {};
        for (const auto& qp : quad.points) {
            const SymMat2 c = cn[0] * qp.bary[0] + cn[1] * qp.bary[1] + cn[2] * qp.bary[2];
            const double trc = c.trace();
            const double s = qp.weight * g.area;

            // ((tr C) C, grad v)
            const SymMat2 tcc = c * trc;
            for (int i = 0; i < 3; ++i) {
                lru[i * 2 + 0] += s * (tcc.t11 * g.grad[i].x + tcc.t12 * g.grad[i].y);
                lru[i * 2 + 1] += s * (tcc.t12 * g.grad[i].x + tcc.t22 * g.grad[i].y);
            }

            // -2((grad u) C, D) - ((div u) C^#, D) + ((tr C)^2 C, D)
            const auto p_guc = sym_pairing(mul(gu, c));
            const auto p_adj = sym_pairing(adjugate(c));
            const auto p_c = sym_pairing(c);
            for (int k = 0; k < 3; ++k) {
                const double val = -2.0 * p_guc[k] - divu * p_adj[k] + trc * trc * p_c[k];
                for (int i = 0; i < 3; ++i) lrc[i * 3 + k] += s * val * qp.bary[i];
            }
        }
        for (int i = 0; i < 3; ++i) {
            ru[g.verts[i] * 2 + 0] += lru[i * 2 + 0];
            ru[g.verts[i] * 2 + 1] += lru[i * 2 + 1];
            for (int k = 0; k < 3; ++k) rc[g.verts[i] * 3 + k] += lrc[i * 3 + k];
        }
    }

    for (int d = 0; d < n_total_; ++d) r[d] -= ctx.rhs[d];
    for (int d = 0; d < n_total_; ++d)
        if (fixed_[d]) r[d] = x[d];
    return r;
}

void Solver::build_pattern() {
    CooBuilder coo(n_total_, n_total_);
    const int cb = n_u_ + n_p_;
    auto touch = [&](int r, int c) {
        if ((fixed_[r] || fixed_[c]) && r != c) return;
        coo.add(r, c, 0.0);
    };
    auto touch_matrix = [&](const SparseMatrix& m, int roff, int coff) {
        for (int r = 0; r < m.rows(); ++r)
            for (int k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k)
                touch(roff + r, coff + m.col_indices()[k]);
    };
    touch_matrix(mass_u_, 0, 0);
    touch_matrix(au_, 0, 0);
    touch_matrix(bt_, 0, n_u_);
    touch_matrix(b_, n_u_, 0);
    touch_matrix(sh_, n_u_, n_u_);
    touch_matrix(mass_c_, cb, cb);
    touch_matrix(ac_, cb, cb);
    touch_matrix(ktr_, cb, cb);
    for (int v = 0; v < n_p_; ++v) {
        touch(n_u_ + v, n_total_ - 1);
        touch(n_total_ - 1, n_u_ + v);
    }
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto& tv = mesh_->tri(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                for (int a = 0; a < 2; ++a)
                    for (int k = 0; k < 3; ++k) {
                        touch(tv[i] * 2 + a, cb + tv[j] * 3 + k);  // u-C coupling
                        touch(cb + tv[i] * 3 + k, tv[j] * 2 + a);  // C-u coupling
                    }
                // the trace terms couple every pair of tensor components
                for (int k = 0; k < 3; ++k)
                    for (int m = 0; m < 3; ++m) touch(cb + tv[i] * 3 + k, cb + tv[j] * 3 + m);
            }
    }
    for (int d = 0; d < n_total_; ++d) coo.add(d, d, 0.0);

    const SparseMatrix pattern = coo.finalize();
    joff_.assign(pattern.row_offsets().begin(), pattern.row_offsets().end());
    jcol_.assign(pattern.col_indices().begin(), pattern.col_indices().end());
    jval_.assign(jcol_.size(), 0.0);
}

void Solver::fill_jacobian(std::span<const double> x) {
    std::fill(jval_.begin(), jval_.end(), 0.0);
    const int cb = n_u_ + n_p_;
    const double inv_dt = 1.0 / params_.dt;

    auto add = [&](int r, int c, double v) {
        if (fixed_[r] || fixed_[c]) return;
        const int lo = joff_[r], hi = joff_[r + 1];
        const int* first = jcol_.data() + lo;
        const int* last = jcol_.data() + hi;
        const int* it = std::lower_bound(first, last, c);
        if (it == last || *it != c) throw std::logic_error("jacobian entry outside the symbolic pattern");
        jval_[lo + (it - first)] += v;
    };
    auto add_matrix = [&](const SparseMatrix& m, int roff, int coff, double scale) {
        for (int r = 0; r < m.rows(); ++r)
            for (int k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k)
                add(roff + r, coff + m.col_indices()[k], scale * m.values()[k]);
    };

    add_matrix(mass_u_, 0, 0, inv_dt);
    add_matrix(au_, 0, 0, params_.nu);
    add_matrix(bt_, 0, n_u_, 1.0);
    add_matrix(b_, n_u_, 0, 1.0);
    add_matrix(sh_, n_u_, n_u_, -1.0);
    add_matrix(mass_c_, cb, cb, inv_dt);
    if (params_.eps != 0.0) add_matrix(ac_, cb, cb, params_.eps);
    add_matrix(ktr_, cb, cb, -1.0);
    for (int v = 0; v < n_p_; ++v) {
        add(n_u_ + v, n_total_ - 1, pmean_[v]);
        add(n_total_ - 1, n_u_ + v, pmean_[v]);
    }
    for (int d = 0; d < n_total_; ++d)
        if (fixed_[d]) {
            const int lo = joff_[d], hi = joff_[d + 1];
            const int* it = std::lower_bound(jcol_.data() + lo, jcol_.data() + hi, d);
            jval_[lo + (it - (jcol_.data() + lo))] = 1.0;
        }

    const std::span<const double> xu = x.subspan(0, n_u_);
    const std::span<const double> xc = x.subspan(cb, n_c_);
    const auto& quad = QuadratureRule::degree5();

    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto g = element_geom(*mesh_, t);
        Mat2 gu;
        SymMat2 cn[3];
        for (int k = 0; k < 3; ++k) {
            const Vec2 uk{xu[g.verts[k] * 2], xu[g.verts[k] * 2 + 1]};
            gu.a11 += uk.x * g.grad[k].x;
            gu.a12 += uk.x * g.grad[k].y;
            gu.a21 += uk.y * g.grad[k].x;
            gu.a22 += uk.y * g.grad[k].y;
            cn[k] = {xc[g.verts[k] * 3], xc[g.verts[k] * 3 + 1], xc[g.verts[k] * 3 + 2]};
        }
        const double divu = gu.trace();

        // element-constant pieces
        double p_gut[3][3];  // sym pairing of (grad u) T_m
        double p_adjt[3][3];
        double trow_g[3][2][3];  // T_m row a of grad_i
        for (int m = 0; m < 3; ++m) {
            const auto pg = sym_pairing(mul(gu, kSymBasis[m]));
            const auto pa = sym_pairing(adjugate(kSymBasis[m]));
            for (int k = 0; k < 3; ++k) {
                p_gut[m][k] = pg[k];
                p_adjt[m][k] = pa[k];
            }
            for (int i = 0; i < 3; ++i) {
                trow_g[m][0][i] = kSymBasis[m].t11 * g.grad[i].x + kSymBasis[m].t12 * g.grad[i].y;
                trow_g[m][1][i] = kSymBasis[m].t12 * g.grad[i].x + kSymBasis[m].t22 * g.grad[i].y;
            }
        }
        const double p_t[3][3] = {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}};

        double luc[6][9] = {};
        double lcu[9][6] = {};
        double lcc[9][9] = {};

        for (const auto& qp : quad.points) {
            const SymMat2 c = cn[0] * qp.bary[0] + cn[1] * qp.bary[1] + cn[2] * qp.bary[2];
            const double trc = c.trace();
            const double s = qp.weight * g.area;
            const auto p_c = sym_pairing(c);
            const auto p_adjc = sym_pairing(adjugate(c));

            // d/dC of ((tr C) C, grad v): ((tr dC) C + (tr C) dC, grad v)
            double crow_g[2][3];
            for (int i = 0; i < 3; ++i) {
                crow_g[0][i] = c.t11 * g.grad[i].x + c.t12 * g.grad[i].y;
                crow_g[1][i] = c.t12 * g.grad[i].x + c.t22 * g.grad[i].y;
            }
            for (int i = 0; i < 3; ++i)
                for (int a = 0; a < 2; ++a)
                    for (int j = 0; j < 3; ++j)
                        for (int m = 0; m < 3; ++m)
                            luc[i * 2 + a][j * 3 + m] +=
                                s * qp.bary[j] * (kTraceT[m] * crow_g[a][i] + trc * trow_g[m][a][i]);

            // d/du of -2((grad u) C, D) - ((div u) C^#, D)
            for (int j = 0; j < 3; ++j) {
                const Vec2 cg{c.t11 * g.grad[j].x + c.t12 * g.grad[j].y,
                              c.t12 * g.grad[j].x + c.t22 * g.grad[j].y};
                for (int a = 0; a < 2; ++a) {
                    const auto pr = pairing_row(a, cg);
                    const double dj = a == 0 ? g.grad[j].x : g.grad[j].y;
                    for (int k = 0; k < 3; ++k) {
                        const double val = -2.0 * pr[k] - dj * p_adjc[k];
                        for (int i = 0; i < 3; ++i) lcu[i * 3 + k][j * 2 + a] += s * val * qp.bary[i];
                    }
                }
            }

            // d/dC of -2((grad u) C, D) - ((div u) C^#, D) + ((tr C)^2 C, D)
            double bracket[3][3];
            for (int m = 0; m < 3; ++m)
                for (int k = 0; k < 3; ++k)
                    bracket[m][k] = -2.0 * p_gut[m][k] - divu * p_adjt[m][k] +
                                    2.0 * trc * kTraceT[m] * p_c[k] + trc * trc * p_t[m][k];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double sij = s * qp.bary[i] * qp.bary[j];
                    for (int k = 0; k < 3; ++k)
                        for (int m = 0; m < 3; ++m) lcc[i * 3 + k][j * 3 + m] += sij * bracket[m][k];
                }
        }

        for (int i = 0; i < 3; ++i) {
            for (int a = 0; a < 2; ++a) {
                const int row = g.verts[i] * 2 + a;
                for (int j = 0; j < 3; ++j)
                    for (int m = 0; m < 3; ++m) add(row, cb + g.verts[j] * 3 + m, luc[i * 2 + a][j * 3 + m]);
            }
            for (int k = 0; k < 3; ++k) {
                const int row = cb + g.verts[i] * 3 + k;
                for (int j = 0; j < 3; ++j) {
                    for (int a = 0; a < 2; ++a) add(row, g.verts[j] * 2 + a, lcu[i * 3 + k][j * 2 + a]);
                    for (int m = 0; m < 3; ++m) add(row, cb + g.verts[j] * 3 + m, lcc[i * 3 + k][j * 3 + m]);
                }
            }
        }
    }
}

std::vector<double> Solver::residual_vector(const StateTriple& prev, const StateTriple& candidate) const {
    const StepContext ctx = prepare_step(prev);
    return residual_at(ctx, pack(candidate));
}

std::vector<double> Solver::residual_raw(const StateTriple& prev, std::span<const double> x) const {
    const StepContext ctx = prepare_step(prev);
    return residual_at(ctx, x);
}

std::vector<double> Solver::jacobian_apply_raw(std::span<const double> x,
                                               std::span<const double> direction) const {
    // the Jacobian does not involve the transported terms, so no previous
    // state enters here
    auto* self = const_cast<Solver*>(this);
    self->fill_jacobian(x);
    std::vector<double> y(n_total_, 0.0);
    for (int r = 0; r < n_total_; ++r) {
        double acc = 0.0;
        for (int k = joff_[r]; k < joff_[r + 1]; ++k) acc += jval_[k] * direction[jcol_[k]];
        y[r] = acc;
    }
    return y;
}

StateTriple Solver::advance(const StateTriple& prev, StepStats* stats) {
    const StepContext ctx = prepare_step(prev);
    std::vector<double> x = pack(prev);

    std::vector<double> r = residual_at(ctx, x);
    double rnorm = norm2(r);
    const double tol = params_.newton_tol * (1.0 + ctx.rhs_norm);

    int iters = 0;
    while (rnorm > tol) {
        if (iters >= params_.newton_max_iter)
            throw NewtonError("newton diverged (residual " + std::to_string(rnorm) + ")", rnorm, iters);

        fill_jacobian(x);
        SparseMatrix jac = SparseMatrix::from_csr(n_total_, n_total_, joff_, jcol_, jval_);
        lu_.factorize(jac);
        std::vector<double> neg_r(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) neg_r[i] = -r[i];
        const std::vector<double> delta = lu_.solve(jac, neg_r);

        // backtracking: halve the step while the residual norm increases
        double alpha = 1.0;
        std::vector<double> x_try(x.size());
        std::vector<double> r_try;
        double rn_try = 0.0;
        while (true) {
            for (std::size_t i = 0; i < x.size(); ++i) x_try[i] = x[i] + alpha * delta[i];
            r_try = residual_at(ctx, x_try);
            rn_try = norm2(r_try);
            if (rn_try <= rnorm || alpha <= params_.damping_min) break;
            alpha *= 0.5;
        }
        x.swap(x_try);
        r.swap(r_try);
        rnorm = rn_try;
        ++iters;
    }

    if (stats) {
        stats->newton_iters = iters;
        stats->residual_norm = rnorm;
    }
    return unpack(x, ctx.t_new);
}

std::vector<StateTriple> Solver::run(const StateTriple& initial, const StepCallback& on_step) {
    const int n_steps = params_.n_steps();
    if (n_steps < 1) throw std::invalid_argument("run: t_end shorter than one step");
    std::vector<StateTriple> traj;
    traj.reserve(n_steps + 1);
    traj.push_back(initial);
    for (int n = 1; n <= n_steps; ++n) {
        StepStats stats;
        try {
            traj.push_back(advance(traj.back(), &stats));
        } catch (const NewtonError& e) {
            throw NewtonError("time step " + std::to_string(n) + ": " + e.what(), e.residual, e.iterations);
        } catch (const UpwindEscapeError& e) {
            throw std::runtime_error("time step " + std::to_string(n) + ": " + e.what());
        }
        if (on_step) on_step(traj.back(), n, stats);
    }
    return traj;
}

StateTriple Solver::initial_state(const FlowSampler& u0_flow, const std::function<SymMat2(Vec2)>& c0) const {
    auto [uh, ph] = stokes_project(*mesh_, params_.nu, params_.delta0, u0_flow);
    StateTriple s = StateTriple::zero(*mesh_);
    s.u = std::move(uh);
    s.p = std::move(ph);
    s.c = FeFunction::interpolate(*mesh_, c0);
    s.t = 0.0;
    return s;
}

AdvisoryReport advisory_check(const TriMesh& mesh, const SchemeParams& params, const VelocityField& w) {
    AdvisoryReport rep;
    // sample |w| and |grad w| on a grid over space-time
    const int ng = 33, nt = 9;
    const double fd = 1e-5;
    double sup = 0.0;
    for (int it = 0; it <= nt; ++it) {
        const double t = params.t_end * it / nt;
        for (int j = 1; j < ng; ++j)
            for (int i = 1; i < ng; ++i) {
                const Vec2 x{static_cast<double>(i) / ng, static_cast<double>(j) / ng};
                sup = std::max(sup, w(x, t).norm());
                const Vec2 dx = (w({x.x + fd, x.y}, t) - w({x.x - fd, x.y}, t)) * (0.5 / fd);
                const Vec2 dy = (w({x.x, x.y + fd}, t) - w({x.x, x.y - fd}, t)) * (0.5 / fd);
                sup = std::max({sup, std::abs(dx.x), std::abs(dx.y), std::abs(dy.x), std::abs(dy.y)});
            }
    }
    rep.w_w1inf_estimate = sup;
    const StepCondition cond = check_step_condition(sup, params.dt);
    rep.bijective = cond.bijective;
    rep.jacobian_bounded = cond.jacobian_bounded;

    const double h = mesh.max_diameter();
    const double dh2 = 1.0 + std::abs(std::log(h));  // D(h)^2
    rep.uniqueness_bound_ok = params.eps > 0.0 ? params.dt <= 1.0 / dh2 : params.dt <= h;

    std::ostringstream msg;
    if (!rep.bijective) msg << "step map may not be bijective (dt*|w|_W1inf >= 1); ";
    if (!rep.jacobian_bounded) msg << "dt*|w|_W1inf > 1/4, Jacobian bound not guaranteed; ";
    if (!rep.uniqueness_bound_ok)
        msg << (params.eps > 0.0 ? "dt exceeds 1/(1+|log h|), uniqueness bound (constants taken as 1) not met; "
                                 : "dt exceeds h, uniqueness bound (constants taken as 1) not met; ");
    rep.message = msg.str();
    return rep;
}

}  // namespace peterlin

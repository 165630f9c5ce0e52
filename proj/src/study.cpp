#include "peterlin/study.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace peterlin {

LevelResult run_manufactured_level(int n, const StudyConfig& cfg) {
    LevelResult res;
    res.n = n;
    res.h = 1.0 / n;
    res.dt = cfg.dt_ratio / n;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const TriMesh mesh = TriMesh::structured(n);
        const ExactSolution ex;

        SchemeParams params;
        params.nu = cfg.nu;
        params.eps = cfg.eps;
        params.delta0 = cfg.delta0;
        params.dt = res.dt;
        params.t_end = cfg.t_end;
        params.newton_tol = cfg.newton_tol;
        params.newton_max_iter = cfg.newton_max_iter;

        VelocityField w = VelocityField::analytic([&ex](Vec2 x, double t) { return ex.u(x, t); });
        ForcingFields forcing{[&ex, &cfg](Vec2 x, double t) {
            const ForcingValue v = manufactured_forcing(ex, x, t, cfg.nu, cfg.eps);
            return ForcingSample{v.f, v.F};
        }};

        res.advisory = advisory_check(mesh, params, w).message;

        Solver solver(mesh, params, std::move(w), std::move(forcing));
        const StateTriple init = solver.initial_state(
            [&ex](int, const std::array<double, 3>&, Vec2 x) {
                return FlowSample{ex.grad_u(x, 0.0), 0.0};
            },
            [&ex](Vec2 x) { return ex.C(x, 0.0); });

        ErrorAccumulator acc(mesh, ex, params.dt);
        acc.add_state(init.u, init.p, init.c, 0.0, 0);
        long iter_sum = 0;
        int steps = 0;
        solver.run(init, [&](const StateTriple& s, int step, const Solver::StepStats& st) {
            acc.add_state(s.u, s.p, s.c, s.t, step);
            iter_sum += st.newton_iters;
            res.newton_max_iters = std::max(res.newton_max_iters, st.newton_iters);
            ++steps;
        });
        const auto errs = acc.finalize();
        for (int i = 0; i < 6; ++i) res.er[i] = errs.er[i];
        res.newton_avg_iters = steps > 0 ? static_cast<double>(iter_sum) / steps : 0.0;
    } catch (const std::exception& e) {
        res.failed = true;
        res.error = e.what();
        for (double& v : res.er) v = std::numeric_limits<double>::quiet_NaN();
        res.newton_avg_iters = std::numeric_limits<double>::quiet_NaN();
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

double convergence_slope(double er_coarse, double er_fine, int n_coarse, int n_fine) {
    return std::log(er_coarse / er_fine) / std::log(static_cast<double>(n_fine) / n_coarse);
}

namespace {

bool close_to(double a, double b, double tol) { return std::abs(a - b) <= tol; }

const LevelResult* find_level(const std::vector<LevelResult>& levels, int n) {
    for (const auto& l : levels)
        if (l.n == n) return &l;
    return nullptr;
}

void check_band(std::vector<std::string>& out, const char* what, double value, double center, double rel) {
    if (std::isnan(value) || std::abs(value - center) > rel * center) {
        std::ostringstream m;
        m << what << " = " << value << " outside +-" << rel * 100 << "% of " << center;
        out.push_back(m.str());
    }
}

}  // namespace

std::vector<std::string> check_acceptance_bands(double nu, double eps, const std::vector<LevelResult>& levels) {
    std::vector<std::string> fails;
    for (const auto& l : levels)
        if (l.failed) fails.push_back("level N=" + std::to_string(l.n) + " failed: " + l.error);
    if (!fails.empty()) return fails;

    auto slope = [&](int pair, int er) {
        return convergence_slope(levels[pair].er[er], levels[pair + 1].er[er], levels[pair].n,
                                 levels[pair + 1].n);
    };
    const int n_pairs = static_cast<int>(levels.size()) - 1;

    if (close_to(nu, 0.1, 1e-12) && close_to(eps, 0.1, 1e-12)) {
        const LevelResult* l32 = find_level(levels, 32);
        if (!l32 || n_pairs < 1) {
            fails.push_back("case (0.1, 0.1) needs levels starting at N=32");
            return fails;
        }
        check_band(fails, "Er1 at N=32", l32->er[0], 2.07e-2, 0.40);
        check_band(fails, "Er5 at N=32", l32->er[4], 1.12e-2, 0.40);
        for (int p = 0; p < n_pairs; ++p)
            for (int er : {0, 1, 4}) {
                const double s = slope(p, er);
                if (!(s >= 1.0 && s <= 1.6)) {
                    std::ostringstream m;
                    m << "Er" << er + 1 << " slope " << s << " (N=" << levels[p].n << "->" << levels[p + 1].n
                      << ") outside [1.0, 1.6]";
                    fails.push_back(m.str());
                }
            }
    } else if (close_to(nu, 0.1, 1e-12) && close_to(eps, 1e-3, 1e-15)) {
        const LevelResult* l32 = find_level(levels, 32);
        if (!l32 || n_pairs < 2) {
            fails.push_back("case (0.1, 0.001) needs levels 32, 64, 128");
            return fails;
        }
        check_band(fails, "Er1 at N=32", l32->er[0], 1.75e-2, 0.40);
        for (int p = 0; p < n_pairs; ++p)
            for (int er = 0; er < 5; ++er) {
                const double s = slope(p, er);
                if (!(s >= 1.0)) {
                    std::ostringstream m;
                    m << "Er" << er + 1 << " slope " << s << " (N=" << levels[p].n << "->" << levels[p + 1].n
                      << ") below 1.0";
                    fails.push_back(m.str());
                }
            }
        for (int p = 0; p + 1 < n_pairs; ++p)
            if (!(slope(p + 1, 5) > slope(p, 5)))
                fails.push_back("Er6 slopes not increasing with refinement");
    } else if (close_to(nu, 1.0, 1e-12) && close_to(eps, 0.0, 1e-15)) {
        if (n_pairs < 1) {
            fails.push_back("case (1, 0) needs at least two levels");
            return fails;
        }
        for (int p = 0; p < n_pairs; ++p) {
            const double s5 = slope(p, 4);
            const double s6 = slope(p, 5);
            if (!(s5 >= 1.0)) {
                std::ostringstream m;
                m << "Er5 slope " << s5 << " (N=" << levels[p].n << "->" << levels[p + 1].n << ") below 1.0";
                fails.push_back(m.str());
            }
            if (!(s6 < 0.8)) {
                std::ostringstream m;
                m << "Er6 slope " << s6 << " (N=" << levels[p].n << "->" << levels[p + 1].n
                  << ") not below 0.8";
                fails.push_back(m.str());
            }
        }
    } else {
        fails.push_back("no acceptance bands defined for this (nu, eps) pair");
    }
    return fails;
}

}  // namespace peterlin

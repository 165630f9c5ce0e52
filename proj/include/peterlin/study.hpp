#pragma once

#include <string>
#include <vector>

#include "peterlin/manufactured.hpp"
#include "peterlin/scheme.hpp"

namespace peterlin {

/// One refinement level of the manufactured-solution benchmark.
struct LevelResult {
    int n = 0;
    double h = 0.0;   // 1/N (table convention; the mesh diameter is sqrt(2)/N)
    double dt = 0.0;
    double er[6] = {};
    double newton_avg_iters = 0.0;
    int newton_max_iters = 0;
    double wall_seconds = 0.0;
    bool failed = false;
    std::string error;
    std::string advisory;  // step-size warnings, empty when everything holds
};

struct StudyConfig {
    double nu = 0.1;
    double eps = 0.1;
    double delta0 = 1.0;
    double dt_ratio = 0.5;  // dt = dt_ratio / N
    double t_end = 0.5;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
};

/// Full solve of one level: structured mesh, transport velocity equal to the
/// exact velocity, forcing from the exact solution, relative errors Er1..Er6.
/// Throws nothing: failures are reported in the result.
LevelResult run_manufactured_level(int n, const StudyConfig& cfg);

/// log(er_coarse / er_fine) / log(n_fine / n_coarse)
double convergence_slope(double er_coarse, double er_fine, int n_coarse, int n_fine);

/// Acceptance bands for the three benchmark parameter pairs; returns one
/// message per violated bound (empty means pass). Unknown (nu, eps) pairs
/// yield a single explanatory failure.
std::vector<std::string> check_acceptance_bands(double nu, double eps, const std::vector<LevelResult>& levels);

}  // namespace peterlin

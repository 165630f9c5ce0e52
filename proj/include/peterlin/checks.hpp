#pragma once

#include <string>
#include <vector>

namespace peterlin {

struct CheckOptions {
    double eps = 0.1;
    unsigned seed = 20240901;
    /// Test fixture: computes the Lemma-5 style identity with a sign-flipped
    /// adjugate; the suite must then fail. Never set outside tests.
    bool flip_adjugate_sign = false;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

/// Property suites wired into `check`: the trace/adjugate identity, the
/// adjugate algebra, Jacobian-versus-finite-differences, the zero-velocity
/// transport reduction, the frozen-flow reaction ODE oracle, the Stokes
/// projection and the diffusion linearity of the forcing (skipped at eps=0).
std::vector<SuiteResult> run_check_suites(const CheckOptions& opts);

}  // namespace peterlin

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "peterlin/checks.hpp"
#include "peterlin/study.hpp"

namespace peterlin {

struct RunConfig {
    double nu = 0.1;
    double eps = 0.1;
    double delta0 = 1.0;
    std::vector<int> levels = {32, 64, 128};
    double dt_ratio = 0.5;
    double t_end = 0.5;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    std::string out = "errors.csv";
    std::string plot_out;
    bool assert_bands = false;
};

/// Convergence study over the configured levels: CSV (flushed per level,
/// failures leave a NaN marker row), an aligned table with slopes on the log
/// stream, an optional SVG, and band checks under --assert. Returns the
/// process exit code.
int cmd_run(const RunConfig& cfg, std::ostream& log);

int cmd_plot(const std::string& csv_path, const std::string& svg_path, std::ostream& log);

int cmd_check(const CheckOptions& opts, std::ostream& log);

}  // namespace peterlin

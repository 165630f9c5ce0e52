#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "peterlin/cli.hpp"

namespace {

using nlohmann::json;

// config-file keys match the long flag names with dashes replaced by
// underscores; command-line flags win over the file
void apply_config_file(const std::string& path, CLI::App* cmd, peterlin::RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--config", std::string("bad JSON: ") + e.what());
    }
    auto fresh = [&](const char* flag) { return cmd->count(flag) == 0; };
    if (j.contains("nu") && fresh("--nu")) cfg.nu = j["nu"].get<double>();
    if (j.contains("eps") && fresh("--eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("delta0") && fresh("--delta0")) cfg.delta0 = j["delta0"].get<double>();
    if (j.contains("levels") && fresh("--levels")) cfg.levels = j["levels"].get<std::vector<int>>();
    if (j.contains("dt_ratio") && fresh("--dt-ratio")) cfg.dt_ratio = j["dt_ratio"].get<double>();
    if (j.contains("t_end") && fresh("--t-end")) cfg.t_end = j["t_end"].get<double>();
    if (j.contains("newton_tol") && fresh("--newton-tol")) cfg.newton_tol = j["newton_tol"].get<double>();
    if (j.contains("newton_max_iter") && fresh("--newton-max-iter"))
        cfg.newton_max_iter = j["newton_max_iter"].get<int>();
    if (j.contains("out") && fresh("--out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("plot_out") && fresh("--plot-out")) cfg.plot_out = j["plot_out"].get<std::string>();
    if (j.contains("assert") && fresh("--assert")) cfg.assert_bands = j["assert"].get<bool>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stabilized characteristics FEM solver for the Oseen-type Peterlin viscoelastic model"};
    app.require_subcommand(1);

    peterlin::RunConfig cfg;
    std::string config_path;

    CLI::App* run = app.add_subcommand("run", "run a manufactured-solution convergence study");
    run->add_option("--nu", cfg.nu, "fluid viscosity");
    run->add_option("--eps", cfg.eps, "elastic stress viscosity (0 disables tensor diffusion)");
    run->add_option("--delta0", cfg.delta0, "pressure stabilization constant");
    run->add_option("--levels", cfg.levels, "comma-separated division numbers N")->delimiter(',');
    run->add_option("--dt-ratio", cfg.dt_ratio, "time increment as a multiple of 1/N");
    run->add_option("--t-end", cfg.t_end, "final time");
    run->add_option("--newton-tol", cfg.newton_tol, "Newton residual tolerance");
    run->add_option("--newton-max-iter", cfg.newton_max_iter, "Newton iteration cap");
    run->add_option("--out", cfg.out, "CSV output path");
    run->add_option("--plot-out", cfg.plot_out, "SVG output path (optional)");
    run->add_flag("--assert", cfg.assert_bands, "enforce the benchmark error bands via exit status");
    run->add_option("--config", config_path, "JSON file mirroring the flags; flags override it");

    std::string plot_csv = "errors.csv";
    std::string plot_svg = "errors.svg";
    CLI::App* plot = app.add_subcommand("plot", "render a log-log error plot from a study CSV");
    plot->add_option("--out", plot_csv, "CSV produced by run");
    plot->add_option("--plot-out", plot_svg, "SVG output path");

    peterlin::CheckOptions check_opts;
    CLI::App* check = app.add_subcommand("check", "run the solver property suites");
    check->add_option("--eps", check_opts.eps, "elastic stress viscosity used by the suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!config_path.empty()) apply_config_file(config_path, run, cfg);
            return peterlin::cmd_run(cfg, std::cout);
        }
        if (plot->parsed()) return peterlin::cmd_plot(plot_csv, plot_svg, std::cout);
        if (check->parsed()) return peterlin::cmd_check(check_opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "peterlin/cli.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

#include "peterlin/report.hpp"

namespace peterlin {

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    if (cfg.levels.empty()) {
        log << "error: no refinement levels given\n";
        return 1;
    }
    for (std::size_t i = 0; i + 1 < cfg.levels.size(); ++i)
        if (cfg.levels[i] >= cfg.levels[i + 1]) {
            log << "error: levels must be ascending\n";
            return 1;
        }

    std::ofstream csv(cfg.out);
    if (!csv) {
        log << "error: cannot open " << cfg.out << " for writing\n";
        return 1;
    }
    csv << "# h column is 1/N (reporting convention); the structured mesh element diameter is sqrt(2)/N\n";
    csv << kCsvHeader << '\n';
    csv.flush();

    StudyConfig study;
    study.nu = cfg.nu;
    study.eps = cfg.eps;
    study.delta0 = cfg.delta0;
    study.dt_ratio = cfg.dt_ratio;
    study.t_end = cfg.t_end;
    study.newton_tol = cfg.newton_tol;
    study.newton_max_iter = cfg.newton_max_iter;

    // levels run in parallel worker slots; rows are still emitted in level
    // order as soon as every earlier level has finished
    const unsigned slots =
        std::min<unsigned>({std::max(1u, std::thread::hardware_concurrency()), 4u,
                            static_cast<unsigned>(cfg.levels.size())});
    std::vector<std::future<LevelResult>> pending;
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        pending.push_back(std::async(slots > 1 ? std::launch::async : std::launch::deferred,
                                     [n = cfg.levels[i], &study] { return run_manufactured_level(n, study); }));

    std::vector<LevelResult> results;
    bool failed = false;
    for (std::size_t i = 0; i < pending.size() && !failed; ++i) {
        LevelResult r = pending[i].get();
        log << "level N=" << r.n << " (dt=" << r.dt << ") done in " << r.wall_seconds << " s\n";
        if (!r.advisory.empty()) log << "  advisory: " << r.advisory << '\n';
        results.push_back(r);
        csv << csv_row(cfg.nu, cfg.eps, r);
        csv.flush();
        if (r.failed) {
            log << "level N=" << r.n << " failed: " << r.error << '\n';
            failed = true;
        }
    }

    log << '\n' << format_table(results);

    if (!cfg.plot_out.empty() && !failed) {
        CsvData data;
        data.levels = results;
        data.nu = cfg.nu;
        data.eps = cfg.eps;
        std::ofstream svg(cfg.plot_out);
        if (!svg) {
            log << "error: cannot open " << cfg.plot_out << " for writing\n";
            return 1;
        }
        svg << render_plot_svg(data);
        log << "plot written to " << cfg.plot_out << '\n';
    }

    if (failed) return 1;

    if (cfg.assert_bands) {
        const auto fails = check_acceptance_bands(cfg.nu, cfg.eps, results);
        for (const auto& f : fails) log << "band violation: " << f << '\n';
        if (!fails.empty()) return 1;
        log << "all acceptance bands satisfied\n";
    }
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& svg_path, std::ostream& log) {
    std::ifstream in(csv_path);
    if (!in) {
        log << "error: cannot open " << csv_path << '\n';
        return 1;
    }
    try {
        const CsvData data = read_csv(in);
        std::ofstream out(svg_path);
        if (!out) {
            log << "error: cannot open " << svg_path << " for writing\n";
            return 1;
        }
        out << render_plot_svg(data);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
    log << "plot written to " << svg_path << '\n';
    return 0;
}

int cmd_check(const CheckOptions& opts, std::ostream& log) {
    const auto suites = run_check_suites(opts);
    bool all_ok = true;
    for (const auto& s : suites) {
        const char* tag = s.skipped ? "SKIP" : (s.passed ? "PASS" : "FAIL");
        log << '[' << tag << "] " << s.name << ": " << s.detail << '\n';
        all_ok = all_ok && s.passed;
    }
    return all_ok ? 0 : 1;
}

}  // namespace peterlin

#include "tlsurf/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace tlsurf;

namespace {

struct Options
{
    std::string config;
    std::optional<int> grid;
    std::optional<double> tol;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Options& opt)
{
    cmd->add_option("--config", opt.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--grid", opt.grid, "override grid points per axis")->check(CLI::Range(5, 1 << 14));
    cmd->add_option("--tol", opt.tol, "absolute tolerance for every residual and verdict")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out, "output directory");
}

int execute(const Options& opt, Mode mode)
{
    try {
        Overrides ov;
        ov.grid_n = opt.grid;
        ov.tol = opt.tol;
        if (opt.out) ov.out_dir = *opt.out;
        const RunConfig cfg = load_config(opt.config, ov);
        const PipelineOutcome outcome = run_pipeline(cfg, mode);
        std::cout << "report: " << (cfg.out_dir / "report.json").string() << '\n';
        if (outcome.pass) {
            std::cout << "PASS\n";
            return kExitPass;
        }
        std::cout << "FAIL:";
        for (const auto& name : outcome.failing) std::cout << ' ' << name;
        std::cout << '\n';
        return kExitFail;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const StageError& e) {
        std::cerr << "pipeline error in stage " << e.what() << '\n';
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPipeline;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zero mean curvature time-like surfaces: build, verify and integrate"};
    app.require_subcommand(1);

    Options opt;
    const std::pair<const char*, Mode> commands[] = {
        {"run", Mode::run}, {"check", Mode::check}, {"classify", Mode::classify}, {"solve", Mode::solve}};
    const char* help[] = {
        "solve, build, check residuals, classify, integrate the frame and export",
        "build and report the integrability residuals only",
        "build and report the classification",
        "solve for the conformal factor (or f1, f2) and write it as CSV",
    };
    std::vector<std::pair<CLI::App*, Mode>> subs;
    for (std::size_t k = 0; k < 4; ++k) {
        CLI::App* cmd = app.add_subcommand(commands[k].first, help[k]);
        add_common(cmd, opt);
        subs.emplace_back(cmd, commands[k].second);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [cmd, mode] : subs)
        if (cmd->parsed()) return execute(opt, mode);
    return kExitConfig;
}

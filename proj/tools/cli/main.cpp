#include "commands.hpp"
#include "log.hpp"
#include "run_config.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace fieldline::cli;

int main(int argc, char** argv)
{
    setLogLevel(logLevelFromEnv());

    CLI::App app{"Charged-particle trajectories in non-uniform magnetic fields and the SUSY analysis "
                 "of the radial Pauli problem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fl_version()));

    struct Options {
        std::string config;
        std::string out;
        std::string method;
        bool plot = false;
    };
    Options opt;

    auto addCommon = [&](CLI::App* sub, bool withMethod) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--out", opt.out, "output directory (overrides output.dir)");
        sub->add_flag("--plot", opt.plot, "also write SVG plots of the trajectories");
        if(withMethod)
            sub->add_option("--method", opt.method, "quadrature, closed-form, ode or all")
                ->check(CLI::IsMember({"quadrature", "closed-form", "closed_form", "ode", "all"}));
    };

    CLI::App* trajectory = app.add_subcommand("trajectory", "compute trajectories and write CSV/JSON/SVG");
    CLI::App* field = app.add_subcommand("field", "tabulate u, f, f', B on a grid");
    CLI::App* susy = app.add_subcommand("susy", "zero mode, normalizability verdict and SWKB levels");
    CLI::App* compare = app.add_subcommand("compare", "cross-validate methods and write a deviation report");
    addCommon(trajectory, true);
    addCommon(field, false);
    addCommon(susy, false);
    addCommon(compare, true);

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : ExitConfig;
    }

    try {
        RunConfig config = loadRunConfig(opt.config);
        Overrides overrides;
        if(!opt.method.empty()) overrides.method = opt.method;
        if(!opt.out.empty()) overrides.outDir = opt.out;
        overrides.plot = opt.plot;
        applyOverrides(config, overrides);

        if(*trajectory) return dispatch(config, cmdTrajectory);
        if(*field) return dispatch(config, cmdField);
        if(*susy) return dispatch(config, cmdSusy);
        return dispatch(config, cmdCompare);
    } catch(const Failure& f) {
        log(LogLevel::Error, f.what());
        return f.exitCode();
    } catch(const std::exception& e) {
        log(LogLevel::Error, std::string("internal error: ") + e.what());
        return ExitInvariant;
    }
}

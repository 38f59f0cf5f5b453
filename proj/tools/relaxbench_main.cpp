#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "relaxbench/config.hpp"
#include "relaxbench/experiment.hpp"
#include "relaxbench/grid.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw relaxbench::ConfigError("config: cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"relaxbench: finite-volume experiments for 2x2/3x3 "
                 "relaxation systems and their scalar limit"};
    app.require_subcommand(1);

    std::string run_config, run_out;
    int jobs = 0;
    auto* run = app.add_subcommand("run",
                                   "run an experiment from a JSON config");
    run->add_option("config", run_config, "JSON config file")->required();
    run->add_option("--out", run_out,
                    "output directory (default: output_dir from the config)");
    run->add_option("--jobs", jobs,
                    "parallel sweep members (fallback: RELAXBENCH_JOBS)");

    std::string val_config;
    auto* val = app.add_subcommand("validate",
                                   "parse a config and echo it resolved");
    val->add_option("config", val_config, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (val->parsed()) {
            relaxbench::ExperimentConfig cfg =
                relaxbench::parse_config(read_file(val_config));
            std::printf("%s\n", relaxbench::resolved_config_json(cfg).c_str());
            return 0;
        }
        relaxbench::ExperimentConfig cfg =
            relaxbench::parse_config(read_file(run_config));
        if (jobs <= 0) {
            const char* env = std::getenv("RELAXBENCH_JOBS");
            jobs = env != nullptr ? std::atoi(env) : 1;
            if (jobs <= 0) jobs = 1;
        }
        std::string out_dir = run_out.empty() ? cfg.output_dir : run_out;
        relaxbench::ExperimentOutcome res =
            relaxbench::run_experiment(cfg, out_dir, jobs);
        return res.exit_code;
    } catch (const relaxbench::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const relaxbench::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

#include <CLI11.hpp>
#include <cstddef>
#include <exception>
#include <iostream>
#include <ostream>
#include <string>

#include "pgkit/config.hpp"
#include "pgkit/errors.hpp"
#include "pgkit/runner.hpp"

namespace {

// Swallows progress output under --quiet.
class NullBuffer final : public std::streambuf {
    int overflow(int c) override { return c; }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pgkit: particle Gibbs samplers for state-space models"};
    app.require_subcommand(1);
    app.fallthrough();  // let subcommands inherit the global flags

    bool quiet = false;
    std::size_t threads = 1;
    std::string config_path, data_path, out_path, out_dir;
    app.add_flag("-q,--quiet", quiet, "suppress progress output");

    CLI::App* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
    sim->add_option("-c,--config", config_path, "run configuration file")->required();
    sim->add_option("-o,--out", out_path, "output data CSV")->required();

    CLI::App* run = app.add_subcommand("run", "run the configured sampler on a dataset");
    run->add_option("-c,--config", config_path, "run configuration file")->required();
    run->add_option("-d,--data", data_path, "input data CSV")->required();
    run->add_option("-o,--out-dir", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker pool size (ipmcmc, blocked_pg)");

    CLI::App* bench = app.add_subcommand("bench", "time a sampler/M/N matrix");
    bench->add_option("-c,--config", config_path, "bench configuration file")->required();
    bench->add_option("-o,--out", out_path, "output report CSV")->required();
    bench->add_option("--threads", threads, "worker pool size (ipmcmc, blocked_pg)");

    CLI::App* oracle = app.add_subcommand("oracle", "exact Kalman filter/smoother");
    oracle->add_option("-c,--config", config_path, "linear_gaussian configuration file")
        ->required();
    oracle->add_option("-d,--data", data_path, "input data CSV")->required();
    oracle->add_option("-o,--out", out_path, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& out = quiet ? null_stream : std::cout;
    pgkit::RunnerOptions opts;
    opts.threads = threads == 0 ? 1 : threads;

    try {
        if (sim->parsed()) {
            pgkit::cmd_simulate(pgkit::load_run_config(config_path), out_path, out);
        } else if (run->parsed()) {
            pgkit::cmd_run(pgkit::load_run_config(config_path), data_path, out_dir, out, opts);
        } else if (bench->parsed()) {
            pgkit::cmd_bench(pgkit::load_bench_config(config_path), out_path, out, opts);
        } else if (oracle->parsed()) {
            pgkit::cmd_oracle(pgkit::load_run_config(config_path), data_path, out_path, out);
        }
    } catch (const pgkit::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

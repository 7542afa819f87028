#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "esqubo/backtest.hpp"

namespace {

using esqubo::backtest::RunConfig;

// Config file first, then flags on top (flags win). CLI11 parses flags before
// this runs, so remember which flags the user actually passed and replay them
// over the file-loaded config.
struct ConfigLayering {
    std::string config_path;
    RunConfig flags;  // values as parsed from the command line
    CLI::App* app = nullptr;

    RunConfig resolve() const {
        RunConfig merged;
        if (!config_path.empty()) {
            std::ifstream file(config_path);
            if (!file) throw std::runtime_error("cannot open config file '" + config_path + "'");
            esqubo::backtest::apply_config_file(merged, file);
        }
        auto passed = [&](const std::string& name) { return app->count(name) > 0; };
        if (passed("--input")) merged.input = flags.input;
        if (passed("--benchmark")) merged.benchmark = flags.benchmark;
        if (passed("--baseline-start")) merged.baseline_start = flags.baseline_start;
        if (passed("--baseline-end")) merged.baseline_end = flags.baseline_end;
        if (passed("--alpha")) merged.alpha = flags.alpha;
        if (passed("--bits")) merged.bits = flags.bits;
        if (passed("--window")) merged.window = flags.window;
        if (passed("--stride")) merged.stride = flags.stride;
        if (passed("--eta")) merged.eta = flags.eta;
        if (passed("--rho-step")) merged.rho_step = flags.rho_step;
        if (passed("--max-iters")) merged.max_iters = flags.max_iters;
        if (passed("--backend")) merged.backend = flags.backend;
        if (passed("--seed")) merged.seed = flags.seed;
        if (passed("--reads")) merged.reads = flags.reads;
        if (passed("--sweeps")) merged.sweeps = flags.sweeps;
        if (passed("--out")) merged.out = flags.out;
        return merged;
    }
};

void add_common_options(CLI::App& cmd, ConfigLayering& layer) {
    layer.app = &cmd;
    cmd.add_option("--config", layer.config_path, "key=value config file (flags override it)");
    cmd.add_option("--input", layer.flags.input, "returns CSV (date column plus one column per asset)");
    cmd.add_option("--benchmark", layer.flags.benchmark, "asset id of the volatility benchmark");
    cmd.add_option("--baseline-start", layer.flags.baseline_start, "first date of the crisis baseline range");
    cmd.add_option("--baseline-end", layer.flags.baseline_end, "last date of the crisis baseline range");
    cmd.add_option("--alpha", layer.flags.alpha, "tail probability level in (0,1)");
    cmd.add_option("--bits", layer.flags.bits, "bits per asset weight");
    cmd.add_option("--window", layer.flags.window, "rolling window length in periods");
    cmd.add_option("--stride", layer.flags.stride, "periods between window starts");
    cmd.add_option("--eta", layer.flags.eta, "convergence band half-width");
    cmd.add_option("--rho-step", layer.flags.rho_step, "multiplicative return-target step");
    cmd.add_option("--max-iters", layer.flags.max_iters, "iteration cap per window");
    cmd.add_option("--backend", layer.flags.backend, "solver backend: exhaustive, annealing or auto");
    cmd.add_option("--seed", layer.flags.seed, "solver seed");
    cmd.add_option("--reads", layer.flags.reads, "annealing restarts per solve");
    cmd.add_option("--sweeps", layer.flags.sweeps, "annealing sweeps per read");
    cmd.add_option("--out", layer.flags.out, "output path prefix (<out>.json and <out>.csv)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expected-Shortfall-targeted QUBO portfolio backtester"};
    app.require_subcommand(1);

    ConfigLayering run_layer;
    bool print_config = false;
    CLI::App* run_cmd = app.add_subcommand("backtest", "run the full backtest and write results");
    add_common_options(*run_cmd, run_layer);
    run_cmd->add_flag("--print-config", print_config,
                      "print the effective configuration and exit without running");

    ConfigLayering dump_layer;
    int window_index = 0;
    double rho_value = 0.0;
    CLI::App* dump_cmd =
        app.add_subcommand("dump-qubo", "print one window's QUBO as JSON on standard output");
    add_common_options(*dump_cmd, dump_layer);
    dump_cmd->add_option("--window-index", window_index, "which rolling window to compile");
    CLI::Option* rho_opt =
        dump_cmd->add_option("--rho", rho_value, "return target (defaults to the window's initial target)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig config = run_layer.resolve();
            if (print_config) {
                std::cout << esqubo::backtest::format_config(config);
                return 0;
            }
            return esqubo::backtest::run_backtest(config);
        }
        RunConfig config = dump_layer.resolve();
        std::optional<double> rho;
        if (rho_opt->count() > 0) rho = rho_value;
        esqubo::backtest::dump_qubo(config, window_index, rho, std::cout);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

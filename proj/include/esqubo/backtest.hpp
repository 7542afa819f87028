#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "esqubo/allocator.hpp"
#include "esqubo/market_data.hpp"

namespace esqubo::backtest {

/// Everything one run needs, assembled from defaults, an optional
/// key=value config file, and command-line overrides (flags win).
struct RunConfig {
    std::string input;           // returns CSV path
    std::string benchmark;       // asset id of the volatility reference
    std::string baseline_start;  // crisis baseline date range, inclusive
    std::string baseline_end;
    double alpha = 0.01;
    int bits = 4;
    int window = 252;
    int stride = 21;
    double eta = 0.05;
    double rho_step = 0.05;
    int max_iters = 60;
    std::string backend = "auto";
    std::uint64_t seed = 42;
    int reads = 20;
    int sweeps = 200;
    std::string out = "backtest";  // writes <out>.json and <out>.csv

    bool operator==(const RunConfig&) const = default;
};

/// Overlay key=value lines (blank lines and # comments ignored) onto config.
/// Throws on unknown keys or unparsable values.
void apply_config_file(RunConfig& config, std::istream& in);

/// The round-trippable key=value form emitted by --print-config.
std::string format_config(const RunConfig& config);

/// Load, validate, allocate every window, then write <out>.json and
/// <out>.csv (all writes happen after computation completes).
/// Returns 0 when every window converged, 2 otherwise; throws on error.
int run_backtest(const RunConfig& config);

/// Emit the QUBO JSON for one window at the given return target (defaults
/// to the window's initial target, mean(mu) floored at 1e-6).
void dump_qubo(const RunConfig& config, int window_index,
               std::optional<double> rho, std::ostream& out);

/// Baseline-window benchmark statistics frozen into a RiskConfig.
/// Errors mention "baseline" along with the offending field.
risk::RiskConfig build_risk_config(const market_data::ReturnsPanel& panel,
                                   const RunConfig& config);

allocator::AllocatorConfig make_allocator_config(const risk::RiskConfig& risk_config,
                                                 const RunConfig& config);

}  // namespace esqubo::backtest

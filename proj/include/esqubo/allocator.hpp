#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "esqubo/encoding.hpp"
#include "esqubo/market_data.hpp"
#include "esqubo/risk.hpp"

namespace esqubo::allocator {

struct AllocatorConfig {
    risk::RiskConfig risk;
    double eta = 0.05;       // convergence band half-width, in (0,1)
    double rho_step = 0.05;  // multiplicative return-target adjustment, in (0,1)
    int max_iters = 60;
    int bits_per_weight = 4;
    std::string backend = "auto";
    std::uint64_t seed = 42;
    int num_reads = 20;
    int sweeps = 200;
    // When unset, penalties are recomputed each iteration from
    // qubo::default_penalties (the return target changes every step).
    std::optional<double> penalty_budget;
    std::optional<double> penalty_return;

    explicit AllocatorConfig(risk::RiskConfig risk_config);
};

struct IterationTrace {
    int iteration;
    double rho;
    Eigen::VectorXd weights;
    encoding::BitVector bits;
    double realized_es;
    double target_es;
    double ratio;  // |realized_es| / |target_es|
    std::string backend;
};

struct AllocationRecord {
    int window_index;
    Eigen::VectorXd weights;  // on the encoding grid, each in [0,1)
    encoding::BitVector bits;
    double cash_weight;  // 1 - sum(weights); slightly negative means borrowed
    double realized_es;
    double target_es;
    bool converged;
    std::vector<IterationTrace> trace;
};

/// One window of the outer loop: repeatedly compile and solve the QUBO,
/// measure the realized ES of the decoded weights on the window's returns,
/// and nudge the return target multiplicatively until the ES lands inside
/// the convergence band (or max_iters is hit and the record says so).
///
/// The return target starts at mean(mu), floored at 1e-6 when that mean is
/// non-positive. When consecutive iterations overshoot from one side of the
/// band to the other, the step is halved for the remaining iterations.
AllocationRecord allocate_window(const market_data::WindowStats& stats,
                                 const Eigen::MatrixXd& window_returns,
                                 const AllocatorConfig& config);

/// allocate_window over every rolling window, in window order. Windows are
/// independent computations; no state is carried between them.
std::vector<AllocationRecord> allocate_series(const market_data::ReturnsPanel& panel,
                                              const market_data::WindowSpec& spec,
                                              const AllocatorConfig& config);

}  // namespace esqubo::allocator

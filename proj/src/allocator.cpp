#include "esqubo/allocator.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "esqubo/qubo.hpp"
#include "esqubo/solver.hpp"

namespace esqubo::allocator {

AllocatorConfig::AllocatorConfig(risk::RiskConfig risk_config) : risk(risk_config) {}

AllocationRecord allocate_window(const market_data::WindowStats& stats,
                                 const Eigen::MatrixXd& window_returns,
                                 const AllocatorConfig& config) {
    const auto n = stats.mu.size();
    if (window_returns.rows() != n)
        throw std::invalid_argument("window returns and statistics disagree on the asset count");
    if (window_returns.cols() < 1) throw std::invalid_argument("window returns are empty");
    if (!(config.eta > 0.0 && config.eta < 1.0))
        throw std::invalid_argument("eta must lie strictly between 0 and 1");
    if (!(config.rho_step > 0.0 && config.rho_step < 1.0))
        throw std::invalid_argument("rho_step must lie strictly between 0 and 1");
    if (config.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");

    // start from the cross-sectional mean return, floored when non-positive
    // so multiplicative updates keep a direction to move in
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) rho += stats.mu(i);
    rho /= static_cast<double>(n);
    if (rho <= 0.0) rho = 1e-6;

    const double est = risk::es_target(config.risk, stats.benchmark_sigma);
    encoding::Encoding enc(static_cast<int>(n), config.bits_per_weight);

    AllocationRecord record;
    record.window_index = stats.window_index;
    record.converged = false;

    double step = config.rho_step;
    int prev_side = 0;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        double lb;
        double lr;
        if (config.penalty_budget && config.penalty_return) {
            lb = *config.penalty_budget;
            lr = *config.penalty_return;
        } else {
            auto [db, dr] = qubo::default_penalties(stats.cov, stats.mu, rho);
            lb = config.penalty_budget ? *config.penalty_budget : db;
            lr = config.penalty_return ? *config.penalty_return : dr;
        }
        qubo::QuboProblem problem = qubo::build(enc, stats.cov, stats.mu, rho, lb, lr);
        solver::BitSolution sol =
            solver::solve(problem, config.backend, config.seed, config.num_reads, config.sweeps);
        Eigen::VectorXd w = encoding::decode(enc, sol.x);

        std::vector<double> portfolio(static_cast<std::size_t>(window_returns.cols()));
        for (Eigen::Index t = 0; t < window_returns.cols(); ++t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) acc += w(i) * window_returns(i, t);
            portfolio[static_cast<std::size_t>(t)] = acc;
        }
        double es = risk::expected_shortfall(portfolio, config.risk.alpha);
        double ratio = std::abs(es) / std::abs(est);

        record.trace.push_back(
            IterationTrace{iter, rho, w, sol.x, es, est, ratio, sol.backend_name});

        int side;
        if (ratio > 1.0 + config.eta) {
            side = 1;  // too much tail risk: lower the return target
        } else if (ratio < 1.0 - config.eta) {
            side = -1;  // risk budget unused: raise the return target
        } else {
            record.converged = true;
            break;
        }
        // crossing the band between consecutive iterations means the step
        // overshoots the band width; halve it for the remaining iterations
        if (prev_side != 0 && side != prev_side) step = 0.5 * step;
        rho = side > 0 ? rho * (1.0 - step) : rho * (1.0 + step);
        prev_side = side;
    }

    const IterationTrace& last = record.trace.back();
    record.weights = last.weights;
    record.bits = last.bits;
    record.realized_es = last.realized_es;
    record.target_es = last.target_es;
    double invested = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) invested += record.weights(i);
    record.cash_weight = 1.0 - invested;
    return record;
}

std::vector<AllocationRecord> allocate_series(const market_data::ReturnsPanel& panel,
                                              const market_data::WindowSpec& spec,
                                              const AllocatorConfig& config) {
    std::vector<AllocationRecord> records;
    for (const market_data::WindowRange& range : market_data::windows(panel, spec)) {
        market_data::WindowStats stats = market_data::window_stats(panel, range);
        Eigen::MatrixXd returns = panel.values.middleCols(
            static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.end - range.begin));
        records.push_back(allocate_window(stats, returns, config));
    }
    return records;
}

}  // namespace esqubo::allocator

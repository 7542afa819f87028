#pragma once

#include <cstddef>
#include <span>

namespace esqubo::risk {

/// Parameters of the dynamically scaled Expected Shortfall target.
///
/// baseline_sigma and baseline_es are the benchmark's volatility and ES over
/// a user-designated crisis baseline window, computed once and then frozen.
struct RiskConfig {
    double alpha;           // tail probability level, in (0,1)
    double baseline_sigma;  // benchmark stddev in the baseline window, > 0
    double baseline_es;     // benchmark ES in the baseline window, < 0

    RiskConfig(double alpha, double baseline_sigma, double baseline_es);
};

/// Mean of the k = ceil(alpha*W) smallest sample values (k >= 1 always,
/// duplicates counted). Reported in return space: negative means loss.
double expected_shortfall(std::span<const double> sample, double alpha);

/// The ceil(alpha*W)-th smallest sample value (empirical lower quantile).
/// Diagnostic only.
double value_at_risk(std::span<const double> sample, double alpha);

/// Dynamic ES target: baseline_sigma / benchmark_sigma * baseline_es.
/// Always negative; shrinks in magnitude as benchmark volatility rises.
double es_target(const RiskConfig& config, double benchmark_sigma);

/// Relative convergence band test: |1 - es_value/es_target| <= eta.
bool converged(double es_value, double es_target, double eta);

/// Tail count shared by expected_shortfall and value_at_risk.
std::size_t tail_count(std::size_t sample_size, double alpha);

}  // namespace esqubo::risk

#include "esqubo/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace esqubo::risk {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie strictly between 0 and 1");
}

}  // namespace

RiskConfig::RiskConfig(double alpha, double baseline_sigma, double baseline_es)
    : alpha(alpha), baseline_sigma(baseline_sigma), baseline_es(baseline_es) {
    check_alpha(alpha);
    if (!(baseline_sigma > 0.0))
        throw std::invalid_argument("baseline_sigma must be positive");
    if (!(baseline_es < 0.0))
        throw std::invalid_argument("baseline_es must be negative (a loss)");
}

std::size_t tail_count(std::size_t sample_size, double alpha) {
    auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(sample_size)));
    return std::clamp<std::size_t>(k, 1, sample_size);
}

double expected_shortfall(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    if (sample.empty()) throw std::invalid_argument("expected_shortfall: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = tail_count(sorted.size(), alpha);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += sorted[i];
    return acc / static_cast<double>(k);
}

double value_at_risk(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    if (sample.empty()) throw std::invalid_argument("value_at_risk: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::size_t k = tail_count(sorted.size(), alpha);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    return sorted[k - 1];
}

double es_target(const RiskConfig& config, double benchmark_sigma) {
    if (!(benchmark_sigma > 0.0))
        throw std::domain_error("degenerate benchmark volatility: sigma must be positive");
    return config.baseline_sigma / benchmark_sigma * config.baseline_es;
}

bool converged(double es_value, double es_target, double eta) {
    if (es_target == 0.0) throw std::domain_error("convergence test requires a nonzero ES target");
    return std::abs(1.0 - es_value / es_target) <= eta;
}

}  // namespace esqubo::risk

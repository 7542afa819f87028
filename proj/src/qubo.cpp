#include "esqubo/qubo.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace esqubo::qubo {

QuboProblem build(const encoding::Encoding& enc,
                  const Eigen::MatrixXd& cov,
                  const Eigen::VectorXd& mu,
                  double target_return,
                  double penalty_budget,
                  double penalty_return) {
    const int n_assets = enc.n_assets;
    const int bits = enc.bits_per_weight;
    if (cov.rows() != n_assets || cov.cols() != n_assets)
        throw std::invalid_argument("covariance matrix shape does not match the encoding");
    if (mu.size() != n_assets)
        throw std::invalid_argument("mean vector length does not match the encoding");
    if (penalty_budget < 0.0 || penalty_return < 0.0)
        throw std::invalid_argument("penalty coefficients must be non-negative");

    // bit (i,a) carries weight 2^-(a+1) of asset i
    std::vector<double> c(static_cast<std::size_t>(bits));
    for (int a = 0; a < bits; ++a) c[static_cast<std::size_t>(a)] = std::ldexp(1.0, -(a + 1));

    const int n = enc.total_bits();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        const int i = u / bits;
        const double ca = c[static_cast<std::size_t>(u % bits)];
        q(u, u) = ca * ca * (0.5 * cov(i, i) + penalty_return * mu(i) * mu(i) + penalty_budget) +
                  ca * (-2.0 * penalty_return * target_return * mu(i) - 2.0 * penalty_budget);
        for (int v = u + 1; v < n; ++v) {
            const int k = v / bits;
            const double cb = c[static_cast<std::size_t>(v % bits)];
            const double coeff =
                ca * cb * (0.5 * cov(i, k) + penalty_return * mu(i) * mu(k) + penalty_budget);
            q(u, v) = coeff;
            q(v, u) = coeff;
        }
    }
    const double offset = penalty_return * target_return * target_return + penalty_budget;
    return QuboProblem{std::move(q), offset, enc, penalty_budget, penalty_return, target_return};
}

double energy(const QuboProblem& problem, const encoding::BitVector& x) {
    const int n = problem.total_bits();
    if (x.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("bit vector length does not match the problem");
    double acc = problem.offset;
    for (int u = 0; u < n; ++u) {
        if (!x[static_cast<std::size_t>(u)]) continue;
        acc += problem.q(u, u);
        for (int v = u + 1; v < n; ++v)
            if (x[static_cast<std::size_t>(v)]) acc += 2.0 * problem.q(u, v);
    }
    return acc;
}

std::pair<double, double> default_penalties(const Eigen::MatrixXd& cov,
                                            const Eigen::VectorXd& mu,
                                            double target_return) {
    double scale = 1.0;
    if (cov.size() > 0) scale = std::max(scale, (0.5 * cov).cwiseAbs().maxCoeff());
    if (mu.size() > 0) scale = std::max(scale, std::abs(target_return) * mu.cwiseAbs().maxCoeff());
    const double lambda = 10.0 * scale;
    return {lambda, lambda};
}

nlohmann::json to_json(const QuboProblem& problem) {
    const int n = problem.total_bits();
    nlohmann::json entries = nlohmann::json::array();
    for (int u = 0; u < n; ++u) {
        if (problem.q(u, u) != 0.0) entries.push_back({u, u, problem.q(u, u)});
        for (int v = u + 1; v < n; ++v) {
            // off-diagonal entries carry the full pairwise coefficient
            const double coeff = 2.0 * problem.q(u, v);
            if (coeff != 0.0) entries.push_back({u, v, coeff});
        }
    }
    return nlohmann::json{{"n", n}, {"offset", problem.offset}, {"entries", entries}};
}

}  // namespace esqubo::qubo

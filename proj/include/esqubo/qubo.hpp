#pragma once

#include <utility>

#include <Eigen/Core>
#include <json.hpp>

#include "esqubo/encoding.hpp"

namespace esqubo::qubo {

/// Explicit unconstrained binary quadratic objective.
///
/// q is symmetric with linear coefficients stored on the diagonal, so for a
/// bit vector x the objective value is
///
///     energy(x) = sum_u q[u][u]*x_u + sum_{u<v} 2*q[u][v]*x_u*x_v + offset
///
/// and with w = decode(encoding, x) this equals
///
///     1/2 w'Cw + penalty_return*(mu'w - target_return)^2
///              + penalty_budget*(sum(w) - 1)^2
///
/// exactly (to floating-point rounding).
struct QuboProblem {
    Eigen::MatrixXd q;      // total_bits x total_bits, symmetric as stored
    double offset;          // energy of the all-zeros state
    encoding::Encoding encoding;
    double penalty_budget;  // lambda for (sum(w) - 1)^2
    double penalty_return;  // lambda for (mu'w - rho)^2
    double target_return;   // rho

    int total_bits() const { return encoding.total_bits(); }
};

/// Compile the penalized mean-variance objective into QUBO coefficients.
QuboProblem build(const encoding::Encoding& enc,
                  const Eigen::MatrixXd& cov,
                  const Eigen::VectorXd& mu,
                  double target_return,
                  double penalty_budget,
                  double penalty_return);

/// Quadratic-form evaluation with the diagonal-as-linear convention.
double energy(const QuboProblem& problem, const encoding::BitVector& x);

/// Penalty scale heuristic: 10 x the dominant objective magnitude,
/// same value for both constraints. Deterministic in its inputs.
std::pair<double, double> default_penalties(const Eigen::MatrixXd& cov,
                                            const Eigen::VectorXd& mu,
                                            double target_return);

/// Interchange form {"n": ..., "offset": ..., "entries": [[u, v, coeff], ...]}
/// with u <= v and diagonal entries meaning linear terms. Entries are sorted
/// by (u, v) and zero coefficients are omitted.
nlohmann::json to_json(const QuboProblem& problem);

}  // namespace esqubo::qubo

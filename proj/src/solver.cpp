#include "esqubo/solver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace esqubo::solver {

namespace {

// canonical [0,1) double from the top 53 bits of one engine draw
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// local field h_u = q(u,u) + 2 * sum_{v != u} q(u,v) * x_v, so the energy
// change of flipping bit u is (1 - 2*x_u) * h_u
std::vector<double> local_fields(const qubo::QuboProblem& p, const encoding::BitVector& x) {
    const int n = p.total_bits();
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        double acc = p.q(u, u);
        for (int v = 0; v < n; ++v)
            if (v != u && x[static_cast<std::size_t>(v)]) acc += 2.0 * p.q(u, v);
        h[static_cast<std::size_t>(u)] = acc;
    }
    return h;
}

void flip_bit(const qubo::QuboProblem& p, encoding::BitVector& x, std::vector<double>& h, int u) {
    const int n = p.total_bits();
    const double delta = x[static_cast<std::size_t>(u)] ? -1.0 : 1.0;
    x[static_cast<std::size_t>(u)] ^= 1u;
    for (int v = 0; v < n; ++v)
        if (v != u) h[static_cast<std::size_t>(v)] += 2.0 * p.q(v, u) * delta;
}

// hottest |dE| seen over a fixed fan of random states; problem-scale adaptive
// and independent of the caller's seed so the schedule is a pure function of
// the problem
double estimate_t_hot(const qubo::QuboProblem& p) {
    const int n = p.total_bits();
    std::mt19937_64 rng(0x243F6A8885A308D3ull);
    double hottest = 0.0;
    for (int s = 0; s < 100; ++s) {
        encoding::BitVector x(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) x[static_cast<std::size_t>(u)] = rng() & 1u;
        std::vector<double> h = local_fields(p, x);
        for (int u = 0; u < n; ++u) hottest = std::max(hottest, std::abs(h[static_cast<std::size_t>(u)]));
    }
    return std::max(hottest, 1e-12);
}

void greedy_descent(const qubo::QuboProblem& p, encoding::BitVector& x) {
    const int n = p.total_bits();
    std::vector<double> h = local_fields(p, x);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < n; ++u) {
            double de = (x[static_cast<std::size_t>(u)] ? -1.0 : 1.0) * h[static_cast<std::size_t>(u)];
            if (de < 0.0) {
                flip_bit(p, x, h, u);
                changed = true;
            }
        }
    }
}

}  // namespace

BitSolution solve_exhaustive(const qubo::QuboProblem& problem) {
    const int n = problem.total_bits();
    if (n > 24)
        throw std::invalid_argument("problem too large for exhaustion: " + std::to_string(n) +
                                    " bits (limit 24)");
    encoding::BitVector x(static_cast<std::size_t>(n));
    encoding::BitVector best_x;
    double best_e = 0.0;
    bool have_best = false;
    const unsigned long states = 1ul << n;
    for (unsigned long m = 0; m < states; ++m) {
        for (int u = 0; u < n; ++u)
            x[static_cast<std::size_t>(u)] = static_cast<std::uint8_t>((m >> (n - 1 - u)) & 1ul);
        double e = qubo::energy(problem, x);
        // strict improvement keeps the first (lexicographically smallest) optimum
        if (!have_best || e < best_e) {
            best_e = e;
            best_x = x;
            have_best = true;
        }
    }
    return BitSolution{std::move(best_x), best_e, 1, "exhaustive"};
}

BitSolution solve_annealing(const SolveRequest& request) {
    const qubo::QuboProblem& p = request.problem;
    const int n = p.total_bits();
    if (request.num_reads < 1) throw std::invalid_argument("num_reads must be at least 1");
    if (request.sweeps < 1) throw std::invalid_argument("sweeps must be at least 1");

    const double t_hot = estimate_t_hot(p);
    const double t_cold = 1e-3 * t_hot;
    const double cool =
        request.sweeps > 1 ? std::pow(t_cold / t_hot, 1.0 / static_cast<double>(request.sweeps - 1))
                           : 1.0;

    encoding::BitVector best_x;
    double best_e = 0.0;
    bool have_best = false;
    for (int read = 0; read < request.num_reads; ++read) {
        std::mt19937_64 rng(request.seed + static_cast<std::uint64_t>(read));
        encoding::BitVector x(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) x[static_cast<std::size_t>(u)] = rng() & 1u;
        std::vector<double> h = local_fields(p, x);

        double t = t_hot;
        for (int sweep = 0; sweep < request.sweeps; ++sweep) {
            for (int u = 0; u < n; ++u) {
                double de = (x[static_cast<std::size_t>(u)] ? -1.0 : 1.0) * h[static_cast<std::size_t>(u)];
                if (de <= 0.0 || uniform01(rng) < std::exp(-de / t)) flip_bit(p, x, h, u);
            }
            t *= cool;
        }
        greedy_descent(p, x);

        double e = qubo::energy(p, x);
        if (!have_best || e < best_e || (e == best_e && x < best_x)) {
            best_e = e;
            best_x = std::move(x);
            have_best = true;
        }
    }
    return BitSolution{std::move(best_x), best_e, request.num_reads, "annealing"};
}

BitSolution solve(const qubo::QuboProblem& problem,
                  const std::string& backend,
                  std::uint64_t seed,
                  int num_reads,
                  int sweeps) {
    if (backend == "exhaustive") return solve_exhaustive(problem);
    if (backend == "annealing") return solve_annealing(SolveRequest{problem, seed, num_reads, sweeps});
    if (backend == "auto") {
        if (problem.total_bits() <= 16) return solve_exhaustive(problem);
        return solve_annealing(SolveRequest{problem, seed, num_reads, sweeps});
    }
    throw std::invalid_argument("unknown solver backend '" + backend + "'");
}

}  // namespace esqubo::solver

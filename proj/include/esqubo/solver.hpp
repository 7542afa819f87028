#pragma once

#include <cstdint>
#include <string>

#include "esqubo/encoding.hpp"
#include "esqubo/qubo.hpp"

namespace esqubo::solver {

struct SolveRequest {
    const qubo::QuboProblem& problem;
    std::uint64_t seed = 42;
    int num_reads = 20;  // independent anneal restarts
    int sweeps = 200;    // full-variable passes per read
};

struct BitSolution {
    encoding::BitVector x;
    double energy;
    int reads_used;
    std::string backend_name;
};

/// Global minimum by enumeration; ties go to the lexicographically smallest
/// bitstring in asset-major order. Guarded to total_bits <= 24.
BitSolution solve_exhaustive(const qubo::QuboProblem& problem);

/// Single-bit-flip Metropolis annealing, deterministic for a fixed seed.
///
/// Each read r (seeded with seed + r) starts from a random state and runs
/// `sweeps` full passes under a geometric temperature schedule from T_hot
/// (the largest single-flip |dE| seen over 100 random states) down to
/// 1e-3 * T_hot, then a zero-temperature greedy pass, so the returned state
/// is single-bit-flip local optimal. Best read wins; energy ties go to the
/// lexicographically smaller bitstring.
BitSolution solve_annealing(const SolveRequest& request);

/// Backend facade. Selector is "exhaustive", "annealing" or "auto"
/// (exhaustive when total_bits <= 16, annealing otherwise).
BitSolution solve(const qubo::QuboProblem& problem,
                  const std::string& backend,
                  std::uint64_t seed,
                  int num_reads,
                  int sweeps);

}  // namespace esqubo::solver

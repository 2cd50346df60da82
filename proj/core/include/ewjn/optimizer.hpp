#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ewjn/fidelity.hpp"

namespace ewjn {

enum class ObjectiveKind {
    lindbladian,  // noisy fidelity through the full master equation
    hamiltonian,  // noiseless fidelity, re-scored under noise afterwards
};

struct OptimizationProblem {
    ObjectiveKind objective = ObjectiveKind::lindbladian;
    SystemModel model;
    NoiseModel noise;  // rates {Gamma_ij, Gamma_phi_i} defining the Lindbladian
    std::vector<double> x0, lower, upper;

    // Interior-point realization: log-barrier over the box, quasi-Newton inner
    // loop with central differences.
    double barrier0 = 1e-3;
    double barrier_reduction = 0.2;
    int outer_iterations = 8;
    double inner_tol = 1e-8;
    int inner_max_iterations = 40;
    double fd_step = 1e-6;  // in units of each variable's range

    int restarts = 8;  // Latin-hypercube restarts on top of x0
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> extra_starts;  // e.g. a Hamiltonian solution

    double dt_factor = 4.0;  // objective evaluations coarsen the default dt by this

    void validate() const;
};

struct OptimizationResult {
    std::vector<double> x_star;
    double F_star = 0.0;
    int iterations = 0;
    bool converged = false;
    long evaluations = 0;
    std::vector<double> best_trace;  // best-so-far objective after each start
};

OptimizationResult optimize(const OptimizationProblem& problem);

// Box-constrained maximization of an arbitrary objective (exposed for tests).
OptimizationResult maximize_box(const std::function<double(const std::vector<double>&)>& f,
                                const OptimizationProblem& settings);

struct ComparisonRow {
    double gamma_relax;    // s^-1
    double gamma_phi;      // s^-1
    double f_baseline;     // noisy F at the Appendix-E starting point
    double f_hamiltonian;  // noiseless-optimized sequence re-scored under noise
    double f_lindbladian;  // noisy-optimized sequence
    std::vector<double> x_hamiltonian;
    std::vector<double> x_lindbladian;
    std::string error;
};

// Figs. 5-6 style sweep over {Gamma_relax, Gamma_phi}. For each grid point the
// Lindbladian optimizer is seeded with both the baseline and the Hamiltonian
// solution, which guarantees the dominance ordering up to optimizer tolerance.
std::vector<ComparisonRow> engineering_comparison_sweep(const std::vector<double>& gamma_relax,
                                                        const std::vector<double>& gamma_phi,
                                                        SystemKind kind,
                                                        const OptimizationProblem& settings,
                                                        int jobs = 1);

}  // namespace ewjn

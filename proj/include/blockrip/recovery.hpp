#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blockrip/group.hpp"
#include "blockrip/matrix.hpp"
#include "blockrip/rip.hpp"
#include "blockrip/rng.hpp"

namespace blockrip {

// Euclidean projection onto the s-group-sparse set: keeps the s groups of
// largest l2 norm, ties to the smallest index.
GroupSparseVector group_hard_threshold(std::span<const double> x,
                                       const GroupPartition& partition, std::size_t s);

struct SolveResult {
    std::vector<double> x_hat;
    std::vector<double> residual_history;  // ||y - A x|| per iteration
};

// Group iterative hard thresholding on A = (1/sqrt m) B Psi. step <= 0
// selects 0.9 / ||A||_{2->2}^2. Throws ConvergenceError (with the residual
// history attached) after ten consecutive residual increases.
SolveResult group_iht(const DenseMatrix& a, std::span<const double> y,
                      const GroupPartition& partition, std::size_t s, std::size_t iters,
                      double step = 0.0);

// Proximal gradient on 0.5 ||y - A x||^2 + lambda ||x||_{S,1}; the prox is
// groupwise soft-thresholding.
SolveResult group_ista(const DenseMatrix& a, std::span<const double> y,
                       const GroupPartition& partition, double lambda, std::size_t iters,
                       double step = 0.0);

double ista_objective(const DenseMatrix& a, std::span<const double> y,
                      const GroupPartition& partition, double lambda,
                      std::span<const double> x);

enum class Solver { iht, ista };

struct RecoveryCell {
    std::size_t m = 0;
    std::size_t s = 0;
    double success_rate = 0.0;
    double ci_halfwidth = 0.0;
    double mean_err = 0.0;
    std::string solver;
    std::size_t failures = 0;  // solver divergences, recorded as misses
};

// Per m: plant unit-norm s-group-sparse signals, measure with fresh random
// blocks, solve, and count relative errors <= 1e-4 as successes.
std::vector<RecoveryCell> recovery_experiment(const DistributionSpec& spec, PsiMode psi_mode,
                                              const GroupPartition& partition, std::size_t s,
                                              std::span<const std::size_t> m_grid,
                                              std::size_t trials, Solver solver, std::size_t L,
                                              std::size_t d, std::size_t iters,
                                              double lambda, RngStream rng);

// Unit-norm s-group-sparse signal: uniform support, Gaussian entries.
std::vector<double> plant_group_sparse_signal(const GroupPartition& partition, std::size_t s,
                                              RngStream rng);

}  // namespace blockrip

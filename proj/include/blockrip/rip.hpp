#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "blockrip/distributions.hpp"
#include "blockrip/group.hpp"
#include "blockrip/matrix.hpp"
#include "blockrip/rng.hpp"

namespace blockrip {

enum class RicMode { exact, monte_carlo_lower };

struct RicEstimate {
    double delta = 0.0;
    RicMode mode = RicMode::exact;
    std::size_t supports_checked = 0;
    std::vector<std::size_t> worst_support;  // group indices
    std::size_t trials = 0;                  // Monte Carlo mode only
    // Extremes of the restricted Gram spectra over everything enumerated;
    // lets tests recompute delta under column scaling.
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    double lambda_max = std::numeric_limits<double>::quiet_NaN();
};

// The scaled measurement matrix (1/sqrt m) B Psi, materialized densely.
DenseMatrix scaled_measurement_matrix(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi);

// Group restricted isometry constant over every support of size <= s:
// extreme eigenvalues of each restricted Gram matrix, maximized. Supports
// come from GroupSupportEnumerator (capacity-guarded); restricted Gram
// sizes are capped at 512 columns. `early_exit_above`, when finite, stops
// the scan once delta is known to exceed it (the result is then only a
// certificate that delta > early_exit_above).
RicEstimate exact_group_ric(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi,
                            const GroupPartition& partition, std::size_t s,
                            double eig_tol = 1e-8,
                            double early_exit_above = std::numeric_limits<double>::infinity());

// Same but from a prebuilt scaled matrix.
RicEstimate exact_group_ric_scaled(const DenseMatrix& a, const GroupPartition& partition,
                                   std::size_t s, double eig_tol = 1e-8,
                                   double early_exit_above =
                                       std::numeric_limits<double>::infinity());

// Monte Carlo lower bound: max |  ||A x||^2 - 1 | over random unit vectors
// with uniform supports of exactly s groups and Gaussian entries.
RicEstimate mc_group_ric_lower(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi,
                               const GroupPartition& partition, std::size_t s,
                               std::size_t trials, RngStream rng);
RicEstimate mc_group_ric_lower_scaled(const DenseMatrix& a, const GroupPartition& partition,
                                      std::size_t s, std::size_t trials, RngStream rng);

// delta_{2s} < sqrt(2) - 1, strictly.
bool recovery_gate(double delta_2s);

enum class PsiMode { identity, haar };

struct PhaseCell {
    std::size_t s = 0;
    std::size_t m = 0;
    double prob = 0.0;        // empirical P{delta_s <= delta_target}
    double mean_delta = 0.0;  // mean of delta_s over draws
    double ci_halfwidth = 0.0;
    bool capacity_exceeded = false;
};

// For each (s, m) cell: trials_per_cell fresh draws of B, delta_s per draw
// (exact, or the Monte Carlo lower bound with mc_trials), success when
// delta_s <= delta_target. Psi is drawn once (haar) or fixed (identity).
std::vector<PhaseCell> phase_transition(const DistributionSpec& spec, PsiMode psi_mode,
                                        const GroupPartition& partition,
                                        std::span<const std::size_t> s_grid,
                                        std::span<const std::size_t> m_grid,
                                        double delta_target, std::size_t trials_per_cell,
                                        RicMode mode, std::size_t mc_trials, std::size_t L,
                                        std::size_t d, RngStream rng);

}  // namespace blockrip

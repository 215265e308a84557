#include "blockrip/rip.hpp"

#include <algorithm>
#include <cmath>

#include "blockrip/errors.hpp"
#include "blockrip/parallel.hpp"
#include "blockrip/stats.hpp"

namespace blockrip {

namespace {
constexpr std::size_t kGramCap = 512;
constexpr std::size_t kChunk = 2048;
}  // namespace

DenseMatrix scaled_measurement_matrix(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi) {
    b.validate();
    const std::size_t D = b.total_cols();
    if (psi.dimension() != D)
        throw ValidationError("measurement matrix: Psi dimension != dL");
    const std::size_t rows = b.total_rows();
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(b.block_rows()));

    DenseMatrix a(rows, D);
    std::vector<double> col(D);
    for (std::size_t j = 0; j < D; ++j) {
        for (std::size_t i = 0; i < D; ++i) col[i] = psi.matrix(i, j);
        std::vector<double> bc = b.apply(col);
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = inv_sqrt_m * bc[i];
    }
    return a;
}

namespace {

// Gram matrix of the columns of `a` restricted to `cols`.
DenseMatrix restricted_gram(const DenseMatrix& a, const std::vector<std::size_t>& cols) {
    const std::size_t k = cols.size();
    DenseMatrix g(k, k);
    for (std::size_t r = 0; r < a.rows; ++r) {
        const double* row = a.data.data() + r * a.cols;
        for (std::size_t i = 0; i < k; ++i) {
            double v = row[cols[i]];
            if (v == 0.0) continue;
            for (std::size_t j = i; j < k; ++j) g(i, j) += v * row[cols[j]];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

}  // namespace

RicEstimate exact_group_ric_scaled(const DenseMatrix& a, const GroupPartition& partition,
                                   std::size_t s, double eig_tol, double early_exit_above) {
    partition.validate();
    if (a.cols != partition.dimension)
        throw ValidationError("exact_group_ric: matrix columns != partition dimension");
    if (s == 0 || s > partition.num_groups())
        throw ValidationError("exact_group_ric: s in [1, G]");

    RicEstimate est;
    est.mode = RicMode::exact;
    est.lambda_min = std::numeric_limits<double>::infinity();
    est.lambda_max = -std::numeric_limits<double>::infinity();

    GroupSupportEnumerator en(partition.num_groups(), s);
    std::vector<std::size_t> support;
    std::vector<std::size_t> cols;
    while (en.next(support)) {
        cols.clear();
        for (std::size_t g : support)
            cols.insert(cols.end(), partition.groups[g].begin(), partition.groups[g].end());
        if (cols.size() > kGramCap)
            throw CapacityError("exact_group_ric: restricted Gram exceeds the 512-column cap");
        std::sort(cols.begin(), cols.end());

        EigenExtremes ev = extreme_eigen_sym(restricted_gram(a, cols), eig_tol);
        ++est.supports_checked;
        est.lambda_min = std::min(est.lambda_min, ev.lambda_min);
        est.lambda_max = std::max(est.lambda_max, ev.lambda_max);
        double local = std::max(ev.lambda_max - 1.0, 1.0 - ev.lambda_min);
        if (local > est.delta) {
            est.delta = local;
            est.worst_support = support;
        }
        if (est.delta > early_exit_above) break;
    }
    return est;
}

RicEstimate exact_group_ric(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi,
                            const GroupPartition& partition, std::size_t s, double eig_tol,
                            double early_exit_above) {
    return exact_group_ric_scaled(scaled_measurement_matrix(b, psi), partition, s, eig_tol,
                                  early_exit_above);
}

RicEstimate mc_group_ric_lower_scaled(const DenseMatrix& a, const GroupPartition& partition,
                                      std::size_t s, std::size_t trials, RngStream rng) {
    partition.validate();
    if (trials == 0) throw ValidationError("mc_group_ric: trials must be >= 1");
    if (s == 0 || s > partition.num_groups())
        throw ValidationError("mc_group_ric: s in [1, G]");
    const std::size_t G = partition.num_groups();
    const std::size_t D = partition.dimension;

    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> chunk_max(num_chunks, 0.0);
    std::vector<std::vector<std::size_t>> chunk_support(num_chunks);

    parallel_chunks(trials, kChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        std::vector<double> x(D);
        std::vector<std::size_t> pool(G);
        for (std::size_t t = begin; t < end; ++t) {
            RngStream r = rng.substream(t);
            for (std::size_t g = 0; g < G; ++g) pool[g] = g;
            for (std::size_t k = 0; k < s; ++k)
                std::swap(pool[k], pool[k + r.below(G - k)]);
            std::fill(x.begin(), x.end(), 0.0);
            double norm2 = 0.0;
            for (std::size_t k = 0; k < s; ++k)
                for (std::size_t idx : partition.groups[pool[k]]) {
                    x[idx] = r.gaussian();
                    norm2 += x[idx] * x[idx];
                }
            double inv = 1.0 / std::sqrt(norm2);
            for (auto& v : x) v *= inv;
            std::vector<double> ax = a.apply(x);
            double sq = 0.0;
            for (double v : ax) sq += v * v;
            double stat = std::fabs(sq - 1.0);
            if (stat > chunk_max[ci]) {
                chunk_max[ci] = stat;
                chunk_support[ci].assign(pool.begin(), pool.begin() + s);
                std::sort(chunk_support[ci].begin(), chunk_support[ci].end());
            }
        }
    });

    RicEstimate est;
    est.mode = RicMode::monte_carlo_lower;
    est.trials = trials;
    for (std::size_t c = 0; c < num_chunks; ++c) {
        if (chunk_max[c] > est.delta) {
            est.delta = chunk_max[c];
            est.worst_support = chunk_support[c];
        }
    }
    return est;
}

RicEstimate mc_group_ric_lower(const BlockDiagonalMatrix& b, const OrthogonalBasis& psi,
                               const GroupPartition& partition, std::size_t s,
                               std::size_t trials, RngStream rng) {
    return mc_group_ric_lower_scaled(scaled_measurement_matrix(b, psi), partition, s, trials,
                                     rng);
}

bool recovery_gate(double delta_2s) {
    if (delta_2s < 0.0) throw ValidationError("recovery_gate: delta must be >= 0");
    return delta_2s < 0.41421356237309514547462185873882845;  // sqrt(2) - 1
}

std::vector<PhaseCell> phase_transition(const DistributionSpec& spec, PsiMode psi_mode,
                                        const GroupPartition& partition,
                                        std::span<const std::size_t> s_grid,
                                        std::span<const std::size_t> m_grid,
                                        double delta_target, std::size_t trials_per_cell,
                                        RicMode mode, std::size_t mc_trials, std::size_t L,
                                        std::size_t d, RngStream rng) {
    partition.validate();
    if (partition.dimension != d * L) throw ValidationError("dims: D must equal d*L");
    if (trials_per_cell == 0) throw ValidationError("phase_transition: trials must be >= 1");

    OrthogonalBasis psi = psi_mode == PsiMode::haar
                              ? haar_orthogonal(partition.dimension, rng.substream(0))
                              : OrthogonalBasis{DenseMatrix::identity(partition.dimension)};

    std::vector<PhaseCell> cells;
    std::size_t cell_index = 0;
    for (std::size_t s : s_grid) {
        for (std::size_t m : m_grid) {
            PhaseCell cell;
            cell.s = s;
            cell.m = m;
            std::size_t successes = 0;
            double delta_sum = 0.0;
            RngStream cell_rng = rng.substream(1 + cell_index);
            ++cell_index;
            try {
                for (std::size_t t = 0; t < trials_per_cell; ++t) {
                    RngStream tr = cell_rng.substream(t);
                    BlockDiagonalMatrix b =
                        random_block_diagonal(spec, L, m, d, tr.substream(0));
                    RicEstimate est =
                        mode == RicMode::exact
                            ? exact_group_ric(b, psi, partition, s)
                            : mc_group_ric_lower(b, psi, partition, s, mc_trials,
                                                 tr.substream(1));
                    delta_sum += est.delta;
                    if (est.delta <= delta_target) ++successes;
                }
            } catch (const CapacityError&) {
                cell.capacity_exceeded = true;
                cell.prob = std::numeric_limits<double>::quiet_NaN();
                cell.mean_delta = std::numeric_limits<double>::quiet_NaN();
                cell.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
                cells.push_back(cell);
                continue;
            }
            cell.prob = static_cast<double>(successes) / static_cast<double>(trials_per_cell);
            cell.mean_delta = delta_sum / static_cast<double>(trials_per_cell);
            cell.ci_halfwidth = wilson_ci(successes, trials_per_cell).halfwidth;
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace blockrip

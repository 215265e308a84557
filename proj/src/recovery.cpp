#include "blockrip/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "blockrip/errors.hpp"
#include "blockrip/stats.hpp"

namespace blockrip {

namespace {

constexpr double kSuccessRelErr = 1e-4;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double default_step(const DenseMatrix& a) {
    double op = opnorm_2_2(a);
    if (op == 0.0) throw ValidationError("solver: zero measurement matrix");
    return 0.9 / (op * op);
}

std::vector<double> residual(const DenseMatrix& a, std::span<const double> y,
                             std::span<const double> x) {
    std::vector<double> r = a.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
    return r;
}

}  // namespace

GroupSparseVector group_hard_threshold(std::span<const double> x,
                                       const GroupPartition& partition, std::size_t s) {
    auto [z, err] = best_group_approx(x, partition, s);
    (void)err;
    return std::move(z);
}

SolveResult group_iht(const DenseMatrix& a, std::span<const double> y,
                      const GroupPartition& partition, std::size_t s, std::size_t iters,
                      double step) {
    if (y.size() != a.rows) throw ValidationError("group_iht: y length != rows");
    if (step <= 0.0) step = default_step(a);

    SolveResult res;
    res.x_hat.assign(a.cols, 0.0);
    std::size_t rising = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<double> r = residual(a, y, res.x_hat);
        double rn = norm2(r);
        res.residual_history.push_back(rn);
        if (rn > prev) {
            if (++rising >= 10)
                throw ConvergenceError("group_iht: residual rose for 10 iterations", rn,
                                       res.residual_history);
        } else {
            rising = 0;
        }
        prev = rn;
        std::vector<double> grad = a.apply_transpose(r);
        for (std::size_t j = 0; j < a.cols; ++j) res.x_hat[j] += step * grad[j];
        res.x_hat = group_hard_threshold(res.x_hat, partition, s).data;
    }
    res.residual_history.push_back(norm2(residual(a, y, res.x_hat)));
    return res;
}

SolveResult group_ista(const DenseMatrix& a, std::span<const double> y,
                       const GroupPartition& partition, double lambda, std::size_t iters,
                       double step) {
    if (y.size() != a.rows) throw ValidationError("group_ista: y length != rows");
    if (lambda < 0.0) throw ValidationError("group_ista: lambda must be >= 0");
    if (step <= 0.0) step = default_step(a);

    SolveResult res;
    res.x_hat.assign(a.cols, 0.0);
    std::size_t rising = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<double> r = residual(a, y, res.x_hat);
        double rn = norm2(r);
        res.residual_history.push_back(rn);
        if (rn > prev + 1e-12 * std::max(1.0, prev)) {
            if (++rising >= 10)
                throw ConvergenceError("group_ista: residual rose for 10 iterations", rn,
                                       res.residual_history);
        } else {
            rising = 0;
        }
        prev = rn;
        std::vector<double> grad = a.apply_transpose(r);
        for (std::size_t j = 0; j < a.cols; ++j) res.x_hat[j] += step * grad[j];
        // groupwise soft threshold at lambda * step
        for (std::size_t g = 0; g < partition.num_groups(); ++g) {
            double gn = group_norm(res.x_hat, partition, g);
            double shrink = gn > 0.0 ? std::max(0.0, 1.0 - lambda * step / gn) : 0.0;
            for (std::size_t idx : partition.groups[g]) res.x_hat[idx] *= shrink;
        }
    }
    res.residual_history.push_back(norm2(residual(a, y, res.x_hat)));
    return res;
}

double ista_objective(const DenseMatrix& a, std::span<const double> y,
                      const GroupPartition& partition, double lambda,
                      std::span<const double> x) {
    std::vector<double> r = residual(a, y, x);
    double rn = norm2(r);
    return 0.5 * rn * rn + lambda * mixed_norm(x, partition, 1.0);
}

std::vector<double> plant_group_sparse_signal(const GroupPartition& partition, std::size_t s,
                                              RngStream rng) {
    const std::size_t G = partition.num_groups();
    std::vector<double> x(partition.dimension, 0.0);
    if (s == 0) return x;
    std::vector<std::size_t> pool(G);
    for (std::size_t g = 0; g < G; ++g) pool[g] = g;
    for (std::size_t k = 0; k < s; ++k) std::swap(pool[k], pool[k + rng.below(G - k)]);
    double norm2v = 0.0;
    for (std::size_t k = 0; k < s; ++k)
        for (std::size_t idx : partition.groups[pool[k]]) {
            x[idx] = rng.gaussian();
            norm2v += x[idx] * x[idx];
        }
    double inv = 1.0 / std::sqrt(norm2v);
    for (auto& v : x) v *= inv;
    return x;
}

std::vector<RecoveryCell> recovery_experiment(const DistributionSpec& spec, PsiMode psi_mode,
                                              const GroupPartition& partition, std::size_t s,
                                              std::span<const std::size_t> m_grid,
                                              std::size_t trials, Solver solver, std::size_t L,
                                              std::size_t d, std::size_t iters,
                                              double lambda, RngStream rng) {
    partition.validate();
    if (partition.dimension != d * L) throw ValidationError("dims: D must equal d*L");
    if (partition.dimension > 256)
        throw CapacityError("recovery_experiment: dL cap 256 exceeded");
    if (trials == 0) throw ValidationError("recovery_experiment: trials must be >= 1");

    OrthogonalBasis psi = psi_mode == PsiMode::haar
                              ? haar_orthogonal(partition.dimension, rng.substream(0))
                              : OrthogonalBasis{DenseMatrix::identity(partition.dimension)};

    std::vector<RecoveryCell> cells;
    std::size_t cell_index = 0;
    for (std::size_t m : m_grid) {
        RecoveryCell cell;
        cell.m = m;
        cell.s = s;
        cell.solver = solver == Solver::iht ? "iht" : "ista";
        RngStream cell_rng = rng.substream(1 + cell_index);
        ++cell_index;
        std::size_t successes = 0;
        double err_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            RngStream tr = cell_rng.substream(t);
            BlockDiagonalMatrix b = random_block_diagonal(spec, L, m, d, tr.substream(0));
            DenseMatrix a = scaled_measurement_matrix(b, psi);
            std::vector<double> x0 = plant_group_sparse_signal(partition, s, tr.substream(1));
            std::vector<double> y = a.apply(x0);
            double err = 1.0;
            try {
                SolveResult sol = solver == Solver::iht
                                      ? group_iht(a, y, partition, s, iters)
                                      : group_ista(a, y, partition, lambda, iters);
                double diff2 = 0.0, ref2 = 0.0;
                for (std::size_t j = 0; j < x0.size(); ++j) {
                    diff2 += (sol.x_hat[j] - x0[j]) * (sol.x_hat[j] - x0[j]);
                    ref2 += x0[j] * x0[j];
                }
                err = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
            } catch (const ConvergenceError&) {
                ++cell.failures;  // recorded as a miss
            }
            err_sum += err;
            if (err <= kSuccessRelErr) ++successes;
        }
        cell.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
        cell.ci_halfwidth = wilson_ci(successes, trials).halfwidth;
        cell.mean_err = err_sum / static_cast<double>(trials);
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace blockrip

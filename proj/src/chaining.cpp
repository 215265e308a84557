#include "blockrip/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockrip/errors.hpp"

namespace blockrip {

namespace {
constexpr std::size_t kMaxPoints = 2048;
}

double MetricPointSet::diameter() const {
    double d = 0.0;
    for (double v : dist) d = std::max(d, v);
    return d;
}

void MetricPointSet::validate(double tri_tol) const {
    if (dist.size() != n * n) throw ValidationError("metric set: distance matrix size");
    for (std::size_t i = 0; i < n; ++i) {
        if (distance(i, i) != 0.0) throw ValidationError("metric set: nonzero diagonal");
        for (std::size_t j = 0; j < i; ++j) {
            if (distance(i, j) < 0.0) throw ValidationError("metric set: negative distance");
            if (distance(i, j) != distance(j, i))
                throw ValidationError("metric set: asymmetric distances");
        }
    }
    // Deterministic triple sample keeps validation cheap for large sets.
    RngStream rng(0x7219AEULL, n);
    std::size_t checks = std::min<std::size_t>(n * n, 2000);
    for (std::size_t c = 0; c < checks; ++c) {
        std::size_t i = rng.below(n), j = rng.below(n), k = rng.below(n);
        if (distance(i, j) > distance(i, k) + distance(k, j) + tri_tol)
            throw ValidationError("metric set: triangle inequality violated");
    }
}

MetricPointSet MetricPointSet::from_distances(std::string name, std::size_t n,
                                              std::vector<double> dist) {
    if (n > kMaxPoints) throw CapacityError("metric set: point cap 2048 exceeded");
    MetricPointSet s;
    s.metric_name = std::move(name);
    s.n = n;
    s.dist = std::move(dist);
    if (s.dist.size() != n * n) throw ValidationError("metric set: distance matrix size");
    return s;
}

MetricPointSet MetricPointSet::from_points_euclidean(
    const std::vector<std::vector<double>>& pts) {
    const std::size_t n = pts.size();
    if (n > kMaxPoints) throw CapacityError("metric set: point cap 2048 exceeded");
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < pts[i].size(); ++k) {
                double diff = pts[i][k] - pts[j][k];
                s += diff * diff;
            }
            dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
        }
    MetricPointSet s;
    s.metric_name = "euclidean";
    s.n = n;
    s.dist = std::move(dist);
    return s;
}

MetricPointSet metric_set_from_family(const MatrixFamily& family, MatrixMetric metric,
                                      double opnorm_tol) {
    const std::size_t n = family.size();
    if (n > kMaxPoints) throw CapacityError("metric set: point cap 2048 exceeded");
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            DenseMatrix diff = family.members[i];
            for (std::size_t k = 0; k < diff.data.size(); ++k)
                diff.data[k] -= family.members[j].data[k];
            double d = 0.0;
            switch (metric) {
                case MatrixMetric::op_2_2:
                    d = opnorm_2_2(diff, opnorm_tol);
                    break;
                case MatrixMetric::op_2_inf:
                    d = opnorm_2_inf(diff);
                    break;
                case MatrixMetric::frobenius:
                    d = frobenius_norm(diff);
                    break;
            }
            dist[i * n + j] = dist[j * n + i] = d;
        }
    MetricPointSet s;
    s.metric_name = metric == MatrixMetric::op_2_2
                        ? "opnorm_2_2"
                        : (metric == MatrixMetric::op_2_inf ? "opnorm_2_inf" : "frobenius");
    s.n = n;
    s.dist = std::move(dist);
    return s;
}

std::vector<double> VOperator::psi_block_image() const {
    return psi->matrix.apply(x);
}

std::vector<double> v_apply(const VOperator& v, std::span<const double> xi) {
    if (xi.size() != v.m * v.d * v.L) throw ValidationError("v_apply: xi length != m*d*L");
    std::vector<double> image = v.psi_block_image();  // Psi x, blocks of length d
    std::vector<double> out(v.m * v.L, 0.0);
    for (std::size_t l = 0; l < v.L; ++l) {
        const double* r = image.data() + l * v.d;
        for (std::size_t i = 0; i < v.m; ++i) {
            const double* chunk = xi.data() + (l * v.m + i) * v.d;
            double s = 0.0;
            for (std::size_t k = 0; k < v.d; ++k) s += r[k] * chunk[k];
            out[l * v.m + i] = s;
        }
    }
    return out;
}

double v_frobenius(const VOperator& v) {
    double s = 0.0;
    for (double xi : v.x) s += xi * xi;
    return std::sqrt(static_cast<double>(v.m) * s);
}

double v_gram_frobenius(const VOperator& v) {
    std::vector<double> image = v.psi_block_image();
    double s = 0.0;
    for (std::size_t l = 0; l < v.L; ++l) {
        double block = 0.0;
        for (std::size_t k = 0; k < v.d; ++k) block += image[l * v.d + k] * image[l * v.d + k];
        s += block * block;
    }
    return std::sqrt(static_cast<double>(v.m) * s);
}

double v_dist_frobenius(const VOperator& a, const VOperator& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        double diff = a.x[i] - b.x[i];
        s += diff * diff;
    }
    return std::sqrt(static_cast<double>(a.m) * s);
}

double v_dist_opnorm(const VOperator& a, const VOperator& b) {
    VOperator diff = a;
    for (std::size_t i = 0; i < diff.x.size(); ++i) diff.x[i] -= b.x[i];
    std::vector<double> image = diff.psi_block_image();
    double best = 0.0;
    for (std::size_t l = 0; l < a.L; ++l) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.d; ++k) s += image[l * a.d + k] * image[l * a.d + k];
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

DenseMatrix v_to_dense(const VOperator& v) {
    std::vector<double> image = v.psi_block_image();
    DenseMatrix out(v.m * v.L, v.m * v.d * v.L);
    for (std::size_t l = 0; l < v.L; ++l)
        for (std::size_t i = 0; i < v.m; ++i)
            for (std::size_t k = 0; k < v.d; ++k)
                out(l * v.m + i, (l * v.m + i) * v.d + k) = image[l * v.d + k];
    return out;
}

CoveringBounds covering_number(const MetricPointSet& set, double radius) {
    if (!(radius > 0.0)) throw ValidationError("covering_number: radius must be > 0");
    const std::size_t n = set.size();
    CoveringBounds b;
    // Greedy covering: first uncovered point becomes a center.
    std::vector<char> covered(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (covered[i]) continue;
        ++b.upper;
        for (std::size_t j = i; j < n; ++j)
            if (!covered[j] && set.distance(i, j) <= radius) covered[j] = 1;
    }
    // Greedy packing at 2r: each kept point excludes a ball, and any
    // r-cover needs one ball per kept point.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i) {
        bool separated = true;
        for (std::size_t k : kept)
            if (set.distance(i, k) <= 2.0 * radius) {
                separated = false;
                break;
            }
        if (separated) kept.push_back(i);
    }
    b.lower = kept.size();
    return b;
}

std::vector<double> geometric_radius_grid(double diameter, double ratio, std::size_t levels) {
    if (!(diameter > 0.0)) return {};
    std::vector<double> grid;
    double u = diameter;
    for (std::size_t k = 0; k <= levels; ++k) {
        grid.push_back(u);
        u /= ratio;
    }
    return grid;
}

namespace {

// Shared Riemann upper-sum machinery; `weight(u)` maps log N(u) to the
// integrand and the below-grid remainder uses N <= n.
template <typename Weight>
double entropy_sum(const MetricPointSet& set, std::span<const double> grid, Weight weight,
                   double* low_piece = nullptr, double* high_piece = nullptr,
                   double lambda = 0.0) {
    if (grid.empty()) throw ValidationError("dudley: empty radius grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] < grid[i - 1]))
            throw ValidationError("dudley: radius grid must be strictly decreasing");
    double total = 0.0, low = 0.0, high = 0.0;
    auto add = [&](double value, double from, double to) {
        // integrand `value` on the radius interval [from, to]
        double width = to - from;
        if (width <= 0.0 || value <= 0.0) return;
        total += value * width;
        double lw = std::clamp(lambda, from, to) - from;
        low += value * lw;
        high += value * (width - lw);
    };
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double u = grid[k];
        double value = weight(static_cast<double>(covering_number(set, u).upper));
        add(value, u, grid[k - 1]);
    }
    double tail_value = weight(static_cast<double>(set.size()));
    add(tail_value, 0.0, grid.back());
    if (low_piece) *low_piece = low;
    if (high_piece) *high_piece = high;
    return total;
}

}  // namespace

double dudley_gamma(const MetricPointSet& set, double alpha,
                    std::span<const double> radius_grid) {
    if (!(alpha == 1.0 || alpha == 2.0)) throw ValidationError("dudley: alpha must be 1 or 2");
    double s = entropy_sum(set, radius_grid, [&](double cover) {
        return std::pow(std::log(std::max(cover, 1.0)), 1.0 / alpha);
    });
    return alpha * s;
}

SplitIntegral gamma_split_estimate(const MetricPointSet& set, double lambda,
                                   std::span<const double> radius_grid) {
    if (lambda < 0.0) throw ValidationError("gamma_split: lambda must be >= 0");
    SplitIntegral out;
    entropy_sum(
        set, radius_grid, [](double cover) { return std::log(std::max(cover, 1.0)); },
        &out.low, &out.high, lambda);
    return out;
}

double gamma_phi_p_upper(const MetricPointSet& set, const PhiFunction& phi, double p,
                         std::span<const double> radius_grid) {
    phi.validate();
    if (!(p >= 1.0)) throw ValidationError("gamma_phi_p: p must be >= 1");
    if (radius_grid.empty()) throw ValidationError("gamma_phi_p: empty radius grid");
    const double delta_min = radius_grid.back();
    const double diam = set.diameter();
    if (diam <= 0.0 || set.size() <= 1) return 0.0;

    const double log2_points = std::log2(static_cast<double>(set.size()));
    const std::size_t k0 = static_cast<std::size_t>(std::floor(std::log(p) / std::log(2.0)));

    double sum = 0.0;
    for (std::size_t n = k0; n < k0 + 64; ++n) {
        // Level n allows 2^{2^n} covering balls, except level 0 which is a
        // single set.
        double budget = n == 0 ? 0.0 : std::pow(2.0, static_cast<double>(n));
        double e_n;
        if (budget >= log2_points) {
            e_n = 0.0;  // the whole set fits in the budget at any radius
        } else {
            std::size_t cap = static_cast<std::size_t>(std::pow(2.0, budget));
            double lo = 0.0, hi = diam;
            for (int step = 0; step < 8; ++step) {
                double mid = 0.5 * (lo + hi);
                if (mid <= 0.0) break;
                if (covering_number(set, mid).upper <= cap)
                    hi = mid;
                else
                    lo = mid;
            }
            e_n = hi;
        }
        if (e_n < delta_min) break;
        sum += phi.conjugate_inverse(std::pow(2.0, static_cast<double>(n))) * e_n;
    }
    return sum;
}

RipSampleSet build_rip_metric_set(const OrthogonalBasis& psi, const GroupPartition& partition,
                                  std::size_t s, std::size_t m, std::size_t d, std::size_t L,
                                  std::size_t sample_count, RngStream rng) {
    if (sample_count == 0 || sample_count > kMaxPoints)
        throw ValidationError("rip metric set: sample_count in [1, 2048]");
    if (partition.dimension != d * L)
        throw ValidationError("dims: D must equal d*L");
    if (s == 0 || s > partition.num_groups())
        throw ValidationError("rip metric set: s in [1, G]");

    const std::size_t G = partition.num_groups();
    RipSampleSet out;
    out.m_f = std::sqrt(static_cast<double>(m));
    out.xs.reserve(sample_count);

    std::vector<VOperator> ops;
    ops.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        RngStream r = rng.substream(i);
        // uniform support of exactly s groups (partial Fisher-Yates)
        std::vector<std::size_t> pool(G);
        for (std::size_t g = 0; g < G; ++g) pool[g] = g;
        for (std::size_t k = 0; k < s; ++k)
            std::swap(pool[k], pool[k + r.below(G - k)]);
        std::vector<double> x(partition.dimension, 0.0);
        double norm2 = 0.0;
        for (std::size_t k = 0; k < s; ++k)
            for (std::size_t idx : partition.groups[pool[k]]) {
                x[idx] = r.gaussian();
                norm2 += x[idx] * x[idx];
            }
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& v : x) v *= inv;
        out.xs.push_back(x);
        ops.push_back(VOperator{std::move(x), &psi, m, d, L});
    }

    std::vector<double> dist(sample_count * sample_count, 0.0);
    for (std::size_t i = 0; i < sample_count; ++i) {
        std::vector<double> image = ops[i].psi_block_image();
        double best = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            double blk = 0.0;
            for (std::size_t k = 0; k < d; ++k) blk += image[l * d + k] * image[l * d + k];
            best = std::max(best, blk);
        }
        out.m_2_2 = std::max(out.m_2_2, std::sqrt(best));
        out.sup_gram_frob = std::max(out.sup_gram_frob, v_gram_frobenius(ops[i]));
        for (std::size_t j = i + 1; j < sample_count; ++j) {
            double dv = v_dist_opnorm(ops[i], ops[j]);
            dist[i * sample_count + j] = dist[j * sample_count + i] = dv;
        }
    }
    out.set = MetricPointSet::from_distances("v_opnorm_2_2", sample_count, std::move(dist));
    return out;
}

GammaUQuantities gamma_u_quantities(const MatrixFamily& family, double alpha,
                                    std::span<const double> radius_grid, double opnorm_tol) {
    if (!(alpha == 2.0 || (alpha > 0.0 && alpha <= 1.0)))
        throw ValidationError(
            "gamma_u_quantities: alpha must be 2 or in (0,1] (general 2->beta norms are out of "
            "scope)");
    GammaUQuantities out;
    out.m_f = family.m_f;
    out.m_2_2 = family.m_2_2;
    out.sup_gram_frob = family.sup_gram_frob;

    MetricPointSet d22 = metric_set_from_family(family, MatrixMetric::op_2_2, opnorm_tol);
    std::vector<double> grid(radius_grid.begin(), radius_grid.end());
    if (grid.empty()) grid = geometric_radius_grid(std::max(d22.diameter(), 1e-300));
    if (family.size() > 1 && d22.diameter() > 0.0) {
        out.gamma2 = dudley_gamma(d22, 2.0, grid);
        if (alpha == 2.0) {
            out.gamma_alpha = out.gamma2;  // alpha* = 2 reuses the 2->2 metric
        } else {
            MetricPointSet d2inf =
                metric_set_from_family(family, MatrixMetric::op_2_inf, opnorm_tol);
            std::vector<double> grid_inf(radius_grid.begin(), radius_grid.end());
            if (grid_inf.empty())
                grid_inf = geometric_radius_grid(std::max(d2inf.diameter(), 1e-300));
            out.gamma_alpha = dudley_gamma(d2inf, 1.0, grid_inf);
        }
    }
    out.gamma_total = out.gamma2 + out.gamma_alpha;
    out.u1 = out.gamma_total * (out.gamma_total + out.m_f);
    out.u2 = out.m_2_2 * out.gamma_total + out.sup_gram_frob;
    return out;
}

}  // namespace blockrip

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blockrip/chaos.hpp"
#include "blockrip/group.hpp"
#include "blockrip/matrix.hpp"

namespace blockrip {

// Finite metric space with the full distance matrix cached.
struct MetricPointSet {
    std::string metric_name;
    std::size_t n = 0;
    std::vector<double> dist;  // n*n, symmetric, zero diagonal

    double distance(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
    double diameter() const;
    std::size_t size() const { return n; }
    // Symmetry, nonnegativity, zero diagonal; triangle inequality checked on
    // a deterministic sample of triples.
    void validate(double tri_tol = 1e-9) const;

    static MetricPointSet from_distances(std::string name, std::size_t n,
                                         std::vector<double> dist);
    static MetricPointSet from_points_euclidean(const std::vector<std::vector<double>>& pts);
};

enum class MatrixMetric { op_2_2, op_2_inf, frobenius };

MetricPointSet metric_set_from_family(const MatrixFamily& family, MatrixMetric metric,
                                      double opnorm_tol = 1e-8);

// diag{V_l(x)} with V_l(x) made of m stacked copies of (Psi_l x)^T. Applied
// blockwise; never materialized except for tiny-size cross-checks.
struct VOperator {
    std::vector<double> x;  // length dL
    const OrthogonalBasis* psi = nullptr;
    std::size_t m = 0, d = 0, L = 0;

    std::vector<double> psi_block_image() const;  // Psi x, length dL
};

std::vector<double> v_apply(const VOperator& v, std::span<const double> xi);
double v_frobenius(const VOperator& v);  // = sqrt(m) ||x||_2 by unitarity
// ||V^T V||_F = sqrt(m * sum_l ||Psi_l x||^4), closed form.
double v_gram_frobenius(const VOperator& v);
double v_dist_frobenius(const VOperator& a, const VOperator& b);
// d_{2->2}(V(x), V(y)) = max_l ||Psi_l (x - y)||_2; for these operators the
// 2->inf metric coincides with it (each row of V_l is (Psi_l x)^T).
double v_dist_opnorm(const VOperator& a, const VOperator& b);
DenseMatrix v_to_dense(const VOperator& v);

struct CoveringBounds {
    std::size_t upper = 0;  // greedy covering
    std::size_t lower = 0;  // greedy packing at radius 2r
};

CoveringBounds covering_number(const MetricPointSet& set, double radius);

// Geometric grid of ratio `ratio` from diameter down to diameter / ratio^levels.
std::vector<double> geometric_radius_grid(double diameter, double ratio = 2.0,
                                          std::size_t levels = 10);

// alpha-scaled Riemann upper sum of (log N(T, d, u))^{1/alpha} du over the
// grid, plus the below-grid remainder bounded through N <= point count.
double dudley_gamma(const MetricPointSet& set, double alpha,
                    std::span<const double> radius_grid);

// Entropy-number upper estimate sum_{n >= k} phi*^{-1}(2^n) e_n with
// k = floor(log p / log 2); e_n found by 8-step bisection on the radius and
// the sum truncated once e_n drops below the smallest grid radius.
double gamma_phi_p_upper(const MetricPointSet& set, const PhiFunction& phi, double p,
                         std::span<const double> radius_grid);

struct RipSampleSet {
    std::vector<std::vector<double>> xs;  // unit s-group-sparse samples
    MetricPointSet set;                   // d_{2->2} V-metric
    double m_f = 0.0;                     // sqrt(m), exact for unit vectors
    double m_2_2 = 0.0;                   // max_l ||Psi_l x|| over samples
    double sup_gram_frob = 0.0;
};

// Finite proxy for the operator set {V(x) : x unit, s-group-sparse}:
// sample_count draws of uniform support + Gaussian direction.
RipSampleSet build_rip_metric_set(const OrthogonalBasis& psi, const GroupPartition& partition,
                                  std::size_t s, std::size_t m, std::size_t d, std::size_t L,
                                  std::size_t sample_count, RngStream rng);

struct SplitIntegral {
    double low = 0.0;   // contribution of radii below lambda
    double high = 0.0;  // contribution of radii at or above lambda
};

// The alpha = 1 Dudley sum split at lambda; the two pieces add up exactly
// to dudley_gamma(set, 1, grid).
SplitIntegral gamma_split_estimate(const MetricPointSet& set, double lambda,
                                   std::span<const double> radius_grid);

struct GammaUQuantities {
    double gamma2 = 0.0;       // Dudley estimate in the 2->2 metric
    double gamma_alpha = 0.0;  // Dudley estimate in the 2->alpha* metric
    double gamma_total = 0.0;  // Gamma = gamma2 + gamma_alpha
    double u1 = 0.0;           // Gamma (Gamma + M_F)
    double u2 = 0.0;           // M_{2->2} Gamma + sup ||A^T A||_F
    double m_f = 0.0;
    double m_2_2 = 0.0;
    double sup_gram_frob = 0.0;
};

// Chaining quantities for a matrix family. Only alpha = 2 (2->2 metric) and
// alpha <= 1 (2->inf metric) are supported; other alpha would need general
// 2->beta operator norms, which are out of scope.
GammaUQuantities gamma_u_quantities(const MatrixFamily& family, double alpha,
                                    std::span<const double> radius_grid,
                                    double opnorm_tol = 1e-8);

}  // namespace blockrip

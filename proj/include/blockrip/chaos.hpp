#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "blockrip/distributions.hpp"
#include "blockrip/matrix.hpp"
#include "blockrip/rng.hpp"

namespace blockrip {

// Finite family of equal-shape matrices with the norms used by the chaos
// and chaining experiments cached at construction.
struct MatrixFamily {
    std::vector<DenseMatrix> members;
    std::vector<double> frob;       // ||A||_F
    std::vector<double> op22;       // ||A||_{2->2}
    std::vector<double> op2inf;     // ||A||_{2->inf}
    std::vector<double> gram_frob;  // ||A^T A||_F
    double m_f = 0.0;
    double m_2_2 = 0.0;
    double m_2_inf = 0.0;
    double sup_gram_frob = 0.0;

    static MatrixFamily build(std::vector<DenseMatrix> members, double opnorm_tol = 1e-8);
    std::size_t size() const { return members.size(); }
    std::size_t member_rows() const { return members.empty() ? 0 : members[0].rows; }
    std::size_t member_cols() const { return members.empty() ? 0 : members[0].cols; }
};

// alpha* as used throughout: alpha/(alpha-1) on (1,2], infinity on (0,1].
double alpha_star(double alpha);

// max over members of | ||A xi||^2 - ||A||_F^2 |. Entries of xi are assumed
// unit-variance so ||A||_F^2 is the exact mean of ||A xi||^2.
double chaos_sup_statistic(const MatrixFamily& family, std::span<const double> xi);

// eta^T (A^T A) eta_tilde, evaluated as <A eta, A eta_tilde>.
double decoupled_chaos(const DenseMatrix& a, std::span<const double> eta,
                       std::span<const double> eta_tilde);

struct MomentRow {
    int p = 0;
    double lp = 0.0;       // empirical L_p of |eta^T A^T A eta_tilde|
    double bound = 0.0;    // C (sqrt(p) ||A^T A||_F + p^{2/alpha} ||A^T A||_{2->2})
    double rel_ci = 0.0;   // 1.96 * se / mean of the p-th power mean
    bool flagged = false;  // rel_ci > 0.5
};

struct MomentCurve {
    std::vector<MomentRow> rows;
    double calibration_c = 0.0;  // fitted at p = 2
    double gram_frob = 0.0;
    double gram_op = 0.0;
};

// Empirical L_p of the decoupled bilinear form against the two-term moment
// bound. The constant is calibrated once at p = 2 with the same draws. The
// comparison exponent alpha comes from the distribution (weibull keeps its
// alpha; gaussian/rademacher map to 2; the power-phi family to 1).
MomentCurve empirical_moment_curve(const DenseMatrix& a, const DistributionSpec& spec,
                                   std::span<const int> p_grid, std::size_t trials,
                                   RngStream rng);

// e^{p0} exp(-min_k (t / C_k)^{1/beta_k}), clipped to [0, 1].
double tails_from_moments_bound(std::span<const std::pair<double, double>> terms, double p0,
                                double t);
// The companion threshold e (m t + C_last) at which the bound applies.
double tails_from_moments_threshold(std::size_t num_terms, double c_last, double t);

// 2 exp(-c min{ t^2 / (L^4 ||A||_F^2), (t / (L^2 ||A||_{2->2}))^{alpha/2} }),
// clipped to 1. c is a calibration parameter.
double hw_bound_alpha(const DenseMatrix& a, double ell, double alpha, double t,
                      double c = 1.0, double opnorm_tol = 1e-8);

struct UniformHwBound {
    double gamma_total = 0.0;  // gamma2 + gamma_alpha
    double u1 = 0.0;           // Gamma (Gamma + M_F)
    double threshold = 0.0;    // C L^2 (U1 + t)
    double bound = 0.0;        // C1 exp(-min{(t/sup||A^T A||_F)^2, (t/M_{2->2}^2)^{alpha/2}})
};

// Uniform deviation bound built from externally supplied chaining
// estimates. The Gaussian branch divides by sup ||A^T A||_F, not by the
// larger M_{2->2} Gamma + sup ||A^T A||_F combination.
UniformHwBound uniform_hw_bound(const MatrixFamily& family, double alpha, double ell, double t,
                                double gamma2, double gamma_alpha, double c = 1.0,
                                double c1 = 1.0);

struct TailCurve {
    std::vector<double> thresholds;
    std::vector<double> probs;
    std::vector<double> ci_halfwidths;
    std::size_t trials = 0;
};

// Empirical tail of the chaos supremum at each threshold, with Wilson CIs.
TailCurve empirical_tail(const MatrixFamily& family, const DistributionSpec& spec,
                         std::span<const double> thresholds, std::size_t trials, RngStream rng);

struct RegimeFit {
    double low_exponent = 0.0;
    double high_exponent = 0.0;
    std::size_t low_points = 0;
    std::size_t high_points = 0;
};

// Least-squares slope of log(-log prob) against log t on each side of the
// split. Only points with prob in (1e-4, 0.5) enter a fit; fewer than 5
// usable points on a side is a fit-domain error.
RegimeFit tail_regime_fit(const TailCurve& curve, double split);

// C1 such that C1 exp(-exponent(t)) equals the empirical tail at the median
// usable threshold; freezing this once per suite is the calibration
// protocol for all absolute constants.
double calibrate_tail_constant(const TailCurve& curve,
                               const std::function<double(double)>& exponent);

struct DecouplingComparison {
    double coupled_lp = 0.0;    // L_p of sup_A | ||A xi||^2 - E ||A xi||^2 |
    double decoupled_lp = 0.0;  // L_p of sup_A | eta^T A^T A eta_tilde |
    double ratio = 0.0;
};

// Compares the coupled chaos supremum (xi from spec, normalized to unit
// variance) against the decoupled bilinear form driven by the comparison
// Weibull model W_s(alpha(spec)).
DecouplingComparison decoupling_comparison(const MatrixFamily& family,
                                           const DistributionSpec& spec, int p,
                                           std::size_t trials, RngStream rng);

// Comparison-model shape parameter: weibull keeps its alpha, gaussian and
// rademacher map to 2, the power-phi family reduces to 1.
double comparison_alpha(const DistributionSpec& spec);

}  // namespace blockrip

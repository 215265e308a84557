#pragma once

#include <span>
#include <string>
#include <vector>

#include "blockrip/rng.hpp"

namespace blockrip {

enum class DistKind {
    gaussian,
    rademacher,
    symmetric_weibull,
    power_phi,
};

// Parametric scalar random model. All variants are symmetric around zero
// with finite variance.
//
//   gaussian          N(0, variance)
//   rademacher        +-1 with equal probability
//   symmetric_weibull |xi| = (-log U)^(1/alpha) with a random sign, so that
//                     -log P{|xi| > x} = x^alpha, alpha in (0, 2]
//   power_phi         scale * (q_conj * E)^(1/q_conj) with a random sign,
//                     E ~ Exp(1); the tail matches exp(-phi_conj(x/scale))
//                     for phi(x) = |x|^q / q, q in (1, 2]
struct DistributionSpec {
    DistKind kind = DistKind::gaussian;
    double variance_param = 1.0;  // gaussian
    double alpha = 1.0;           // symmetric_weibull
    double q = 2.0;               // power_phi
    double scale = 1.0;           // power_phi

    static DistributionSpec gaussian(double variance) {
        DistributionSpec s;
        s.kind = DistKind::gaussian;
        s.variance_param = variance;
        return s;
    }
    static DistributionSpec rademacher() {
        DistributionSpec s;
        s.kind = DistKind::rademacher;
        return s;
    }
    static DistributionSpec symmetric_weibull(double alpha) {
        DistributionSpec s;
        s.kind = DistKind::symmetric_weibull;
        s.alpha = alpha;
        return s;
    }
    static DistributionSpec power_phi(double q, double scale) {
        DistributionSpec s;
        s.kind = DistKind::power_phi;
        s.q = q;
        s.scale = scale;
        return s;
    }

    // Throws ValidationError on out-of-domain parameters.
    void validate() const;
    double variance() const;
    std::string describe() const;
};

// phi(x) = |x|^q / q with q in (1, 2]. Closed forms for the inverse, the
// convex conjugate |y|^{q*}/q* (1/q + 1/q* = 1) and its inverse.
struct PhiFunction {
    double q = 2.0;

    void validate() const;
    double conjugate_exponent() const { return q / (q - 1.0); }
    double value(double x) const;
    double inverse(double y) const;            // y >= 0
    double conjugate(double y) const;
    double conjugate_inverse(double y) const;  // y >= 0
};

double phi_conjugate(const PhiFunction& phi, double y);

// n i.i.d. draws. Two calls with an equal RngStream give bitwise-equal
// vectors.
std::vector<double> sample(const DistributionSpec& spec, std::size_t n, RngStream rng);

// exp(-x^alpha), the exact symmetric-Weibull tail.
double weibull_tail(double alpha, double x);

// Smallest t with mean exp(|x_i|^alpha / t^alpha) <= 2, by bisection to
// 1e-4 relative tolerance. All-zero samples give 0; +inf if the doubling
// search never brings the mean under 2.
double estimate_psi_alpha_norm(std::span<const double> samples, double alpha);

struct TauPhiEstimate {
    double value = 0.0;
    // Grid points where the empirical MGF exceeded the overflow clip and
    // were skipped.
    std::vector<double> skipped_lambdas;
};

// max over the grid of phi^{-1}(log mean exp(lambda x)) / |lambda|.
TauPhiEstimate estimate_tau_phi(std::span<const double> samples, const PhiFunction& phi,
                                std::span<const double> lambda_grid);

struct IncrementRow {
    double u = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
    double std_err = 0.0;
    bool pass = false;
};

struct IncrementReport {
    double tau_phi = 0.0;
    std::vector<IncrementRow> rows;
    bool pass = false;
};

// For each u, compares the empirical P{|X| >= u * tau_phi(X)} against
// 2 exp(-phi_conj(u)); tau_phi is estimated from the same draws on a
// default lambda grid. Passes iff empirical <= bound + 3 binomial standard
// errors at every u.
IncrementReport increment_tail_check(const DistributionSpec& spec, const PhiFunction& phi,
                                     std::span<const double> u_grid, std::size_t trials,
                                     RngStream rng);

}  // namespace blockrip

#include "blockrip/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blockrip/errors.hpp"
#include "blockrip/stats.hpp"

namespace blockrip {

namespace {

constexpr double kMgfClip = 1e30;

double weibull_abs_moment(double alpha, double k) {
    // E |xi|^k for -log P{|xi| > x} = x^alpha.
    return std::tgamma(1.0 + k / alpha);
}

}  // namespace

void DistributionSpec::validate() const {
    switch (kind) {
        case DistKind::gaussian:
            if (!(variance_param > 0.0))
                throw ValidationError("dist: variance must be positive");
            break;
        case DistKind::rademacher:
            break;
        case DistKind::symmetric_weibull:
            if (!(alpha > 0.0 && alpha <= 2.0))
                throw ValidationError("dist: alpha in (0,2]");
            break;
        case DistKind::power_phi:
            if (!(q > 1.0 && q <= 2.0)) throw ValidationError("dist: q in (1,2]");
            if (!(scale > 0.0)) throw ValidationError("dist: scale must be positive");
            break;
    }
}

double DistributionSpec::variance() const {
    switch (kind) {
        case DistKind::gaussian:
            return variance_param;
        case DistKind::rademacher:
            return 1.0;
        case DistKind::symmetric_weibull:
            return weibull_abs_moment(alpha, 2.0);
        case DistKind::power_phi: {
            double qc = q / (q - 1.0);
            // |xi| = scale * (qc E)^{1/qc}: E|xi|^2 = scale^2 qc^{2/qc} Gamma(1 + 2/qc).
            return scale * scale * std::pow(qc, 2.0 / qc) * std::tgamma(1.0 + 2.0 / qc);
        }
    }
    return 0.0;
}

std::string DistributionSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case DistKind::gaussian:
            os << "gaussian(variance=" << variance_param << ")";
            break;
        case DistKind::rademacher:
            os << "rademacher";
            break;
        case DistKind::symmetric_weibull:
            os << "weibull(alpha=" << alpha << ")";
            break;
        case DistKind::power_phi:
            os << "power_phi(q=" << q << ",scale=" << scale << ")";
            break;
    }
    return os.str();
}

void PhiFunction::validate() const {
    if (!(q > 1.0 && q <= 2.0)) throw ValidationError("phi: q in (1,2]");
}

double PhiFunction::value(double x) const { return std::pow(std::fabs(x), q) / q; }

double PhiFunction::inverse(double y) const {
    if (y <= 0.0) return 0.0;
    return std::pow(q * y, 1.0 / q);
}

double PhiFunction::conjugate(double y) const {
    double qc = conjugate_exponent();
    return std::pow(std::fabs(y), qc) / qc;
}

double PhiFunction::conjugate_inverse(double y) const {
    if (y <= 0.0) return 0.0;
    double qc = conjugate_exponent();
    return std::pow(qc * y, 1.0 / qc);
}

double phi_conjugate(const PhiFunction& phi, double y) { return phi.conjugate(y); }

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, RngStream rng) {
    spec.validate();
    if (n == 0) throw ValidationError("sample: n must be >= 1");
    std::vector<double> out(n);
    switch (spec.kind) {
        case DistKind::gaussian: {
            double sd = std::sqrt(spec.variance_param);
            for (auto& x : out) x = sd * rng.gaussian();
            break;
        }
        case DistKind::rademacher:
            for (auto& x : out) x = rng.sign();
            break;
        case DistKind::symmetric_weibull: {
            double inv_alpha = 1.0 / spec.alpha;
            for (auto& x : out) {
                double e = -std::log(rng.uniform01());
                x = rng.sign() * std::pow(e, inv_alpha);
            }
            break;
        }
        case DistKind::power_phi: {
            double qc = spec.q / (spec.q - 1.0);
            double inv_qc = 1.0 / qc;
            for (auto& x : out) {
                double e = -std::log(rng.uniform01());
                x = rng.sign() * spec.scale * std::pow(qc * e, inv_qc);
            }
            break;
        }
    }
    return out;
}

double weibull_tail(double alpha, double x) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("weibull_tail: alpha in (0,2]");
    if (x < 0.0) throw ValidationError("weibull_tail: x must be >= 0");
    return std::exp(-std::pow(x, alpha));
}

double estimate_psi_alpha_norm(std::span<const double> samples, double alpha) {
    if (samples.empty()) throw ValidationError("psi_alpha: empty sample vector");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("psi_alpha: alpha in (0,2]");

    double max_abs = 0.0;
    for (double x : samples) max_abs = std::max(max_abs, std::fabs(x));
    if (max_abs == 0.0) return 0.0;  // every t works; infimum is 0

    const double inv_n = 1.0 / static_cast<double>(samples.size());
    auto crit = [&](double t) {
        double s = 0.0;
        double ta = std::pow(t, alpha);
        for (double x : samples) s += std::exp(std::pow(std::fabs(x), alpha) / ta);
        return s * inv_n;
    };

    // Bracket: the criterion is decreasing in t with limit 1, so double up
    // from max|x| until it drops under 2, then halve down for the other end.
    double hi = max_abs;
    int guard = 0;
    while (crit(hi) > 2.0) {
        hi *= 2.0;
        if (++guard > 200) return std::numeric_limits<double>::infinity();
    }
    double lo = hi / 2.0;
    guard = 0;
    while (crit(lo) <= 2.0) {
        hi = lo;
        lo /= 2.0;
        if (++guard > 200) return hi;  // criterion holds arbitrarily far down
    }
    while ((hi - lo) / hi > 1e-4) {
        double mid = 0.5 * (lo + hi);
        if (crit(mid) <= 2.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

TauPhiEstimate estimate_tau_phi(std::span<const double> samples, const PhiFunction& phi,
                                std::span<const double> lambda_grid) {
    phi.validate();
    if (samples.empty()) throw ValidationError("tau_phi: empty sample vector");
    for (double l : lambda_grid)
        if (l == 0.0) throw ValidationError("tau_phi: lambda grid must exclude 0");

    TauPhiEstimate est;
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (double lambda : lambda_grid) {
        double s = 0.0;
        for (double x : samples) s += std::exp(lambda * x);
        double mgf = s * inv_n;
        if (!(mgf < kMgfClip)) {
            est.skipped_lambdas.push_back(lambda);
            continue;
        }
        double lg = std::log(mgf);
        if (lg <= 0.0) continue;  // centered samples can dip below 1
        est.value = std::max(est.value, phi.inverse(lg) / std::fabs(lambda));
    }
    return est;
}

IncrementReport increment_tail_check(const DistributionSpec& spec, const PhiFunction& phi,
                                     std::span<const double> u_grid, std::size_t trials,
                                     RngStream rng) {
    phi.validate();
    std::vector<double> xs = sample(spec, trials, rng);

    // tau_phi from the same draws; the grid stays small enough that the
    // empirical MGF is stable at these trial counts.
    static const double kLambdas[] = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    std::vector<double> lambdas(std::begin(kLambdas), std::end(kLambdas));
    double sd = std::sqrt(spec.variance());
    if (sd > 0) {
        for (auto& l : lambdas) l /= sd;
    }
    IncrementReport report;
    report.tau_phi = estimate_tau_phi(xs, phi, lambdas).value;

    report.pass = true;
    for (double u : u_grid) {
        IncrementRow row;
        row.u = u;
        double threshold = u * report.tau_phi;
        std::size_t count = 0;
        for (double x : xs)
            if (std::fabs(x) >= threshold) ++count;
        row.empirical = static_cast<double>(count) / static_cast<double>(trials);
        row.bound = 2.0 * std::exp(-phi.conjugate(u));
        row.std_err = binomial_se(row.empirical, trials);
        row.pass = row.empirical <= row.bound + 3.0 * row.std_err;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace blockrip

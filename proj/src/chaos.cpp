#include "blockrip/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockrip/errors.hpp"
#include "blockrip/parallel.hpp"
#include "blockrip/stats.hpp"

namespace blockrip {

namespace {
constexpr std::size_t kChunk = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

MatrixFamily MatrixFamily::build(std::vector<DenseMatrix> members, double opnorm_tol) {
    if (members.empty()) throw ValidationError("matrix family: empty");
    MatrixFamily f;
    f.members = std::move(members);
    const std::size_t r = f.members[0].rows;
    const std::size_t c = f.members[0].cols;
    for (const auto& a : f.members) {
        if (a.rows != r || a.cols != c)
            throw ValidationError("matrix family: members must share a shape");
        f.frob.push_back(frobenius_norm(a));
        f.op22.push_back(opnorm_2_2(a, opnorm_tol));
        f.op2inf.push_back(opnorm_2_inf(a));
        f.gram_frob.push_back(frobenius_norm(a.gram()));
    }
    f.m_f = *std::max_element(f.frob.begin(), f.frob.end());
    f.m_2_2 = *std::max_element(f.op22.begin(), f.op22.end());
    f.m_2_inf = *std::max_element(f.op2inf.begin(), f.op2inf.end());
    f.sup_gram_frob = *std::max_element(f.gram_frob.begin(), f.gram_frob.end());
    return f;
}

double alpha_star(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("alpha_star: alpha in (0,2]");
    if (alpha <= 1.0) return kInf;
    return alpha / (alpha - 1.0);
}

double chaos_sup_statistic(const MatrixFamily& family, std::span<const double> xi) {
    if (xi.size() != family.member_cols())
        throw ValidationError("chaos_sup_statistic: xi length != member columns");
    double best = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
        std::vector<double> ax = family.members[k].apply(xi);
        double sq = 0.0;
        for (double v : ax) sq += v * v;
        best = std::max(best, std::fabs(sq - family.frob[k] * family.frob[k]));
    }
    return best;
}

double decoupled_chaos(const DenseMatrix& a, std::span<const double> eta,
                       std::span<const double> eta_tilde) {
    if (eta.size() != a.cols || eta_tilde.size() != a.cols)
        throw ValidationError("decoupled_chaos: vector length != columns");
    std::vector<double> u = a.apply(eta);
    std::vector<double> v = a.apply(eta_tilde);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double comparison_alpha(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::symmetric_weibull:
            return spec.alpha;
        case DistKind::power_phi:
            return 1.0;
        default:
            return 2.0;
    }
}

MomentCurve empirical_moment_curve(const DenseMatrix& a, const DistributionSpec& spec,
                                   std::span<const int> p_grid, std::size_t trials,
                                   RngStream rng) {
    spec.validate();
    if (trials == 0) throw ValidationError("moment curve: trials must be >= 1");
    for (int p : p_grid)
        if (p < 2 || p > 20) throw ValidationError("moment curve: p grid must lie in [2, 20]");

    // p = 2 always computed; it anchors the calibration constant.
    std::vector<int> ps(p_grid.begin(), p_grid.end());
    if (std::find(ps.begin(), ps.end(), 2) == ps.end()) ps.insert(ps.begin(), 2);

    const std::size_t n = a.cols;
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> sums(num_chunks, std::vector<double>(ps.size(), 0.0));
    std::vector<std::vector<double>> sqsums(num_chunks, std::vector<double>(ps.size(), 0.0));

    parallel_chunks(trials, kChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        auto& sum = sums[ci];
        auto& sq = sqsums[ci];
        for (std::size_t t = begin; t < end; ++t) {
            RngStream tr = rng.substream(t);
            std::vector<double> eta = sample(spec, n, tr.substream(0));
            std::vector<double> eta_tilde = sample(spec, n, tr.substream(1));
            double v = std::fabs(decoupled_chaos(a, eta, eta_tilde));
            for (std::size_t k = 0; k < ps.size(); ++k) {
                double vp = std::pow(v, ps[k]);
                sum[k] += vp;
                sq[k] += vp * vp;
            }
        }
    });

    std::vector<double> total(ps.size(), 0.0), total_sq(ps.size(), 0.0);
    for (std::size_t c = 0; c < num_chunks; ++c)
        for (std::size_t k = 0; k < ps.size(); ++k) {
            total[k] += sums[c][k];
            total_sq[k] += sqsums[c][k];
        }

    const double alpha = comparison_alpha(spec);
    DenseMatrix gram = a.gram();
    MomentCurve curve;
    curve.gram_frob = frobenius_norm(gram);
    curve.gram_op = opnorm_2_2(gram);

    auto bound_raw = [&](double p) {
        return std::sqrt(p) * curve.gram_frob + std::pow(p, 2.0 / alpha) * curve.gram_op;
    };

    const double nt = static_cast<double>(trials);
    std::vector<double> lp(ps.size()), rel_ci(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        double m = total[k] / nt;
        lp[k] = m > 0.0 ? std::pow(m, 1.0 / ps[k]) : 0.0;
        double var = std::max(0.0, total_sq[k] / nt - m * m);
        rel_ci[k] = m > 0.0 ? 1.96 * std::sqrt(var / nt) / m : 0.0;
    }
    double denom = bound_raw(2.0);
    curve.calibration_c = denom > 0.0 ? lp[0] / denom : 0.0;

    for (std::size_t k = 0; k < ps.size(); ++k) {
        bool requested = std::find(p_grid.begin(), p_grid.end(), ps[k]) != p_grid.end();
        if (!requested) continue;
        MomentRow row;
        row.p = ps[k];
        row.lp = lp[k];
        row.bound = curve.calibration_c * bound_raw(ps[k]);
        row.rel_ci = rel_ci[k];
        row.flagged = rel_ci[k] > 0.5;
        curve.rows.push_back(row);
    }
    return curve;
}

double tails_from_moments_bound(std::span<const std::pair<double, double>> terms, double p0,
                                double t) {
    if (terms.empty()) throw ValidationError("tails_from_moments: no terms");
    double best = kInf;
    for (auto [ck, bk] : terms) {
        if (!(ck > 0.0 && bk > 0.0))
            throw ValidationError("tails_from_moments: constants must be positive");
        best = std::min(best, std::pow(t / ck, 1.0 / bk));
    }
    double v = std::exp(p0) * std::exp(-best);
    return std::clamp(v, 0.0, 1.0);
}

double tails_from_moments_threshold(std::size_t num_terms, double c_last, double t) {
    return std::exp(1.0) * (static_cast<double>(num_terms) * t + c_last);
}

double hw_bound_alpha(const DenseMatrix& a, double ell, double alpha, double t, double c,
                      double opnorm_tol) {
    if (a.rows != a.cols) throw ValidationError("hw_bound_alpha: matrix must be symmetric");
    if (ell < 0.0 || t < 0.0) throw ValidationError("hw_bound_alpha: L and t must be >= 0");
    double fro = frobenius_norm(a);
    double op = opnorm_2_2(a, opnorm_tol);
    double l2 = ell * ell;
    double g = fro > 0.0 ? (t * t) / (l2 * l2 * fro * fro) : kInf;
    double e = op > 0.0 ? std::pow(t / (l2 * op), alpha / 2.0) : kInf;
    double expo = std::min(g, e);
    if (std::isinf(expo)) return t == 0.0 ? 1.0 : 0.0;
    return std::min(1.0, 2.0 * std::exp(-c * expo));
}

UniformHwBound uniform_hw_bound(const MatrixFamily& family, double alpha, double ell, double t,
                                double gamma2, double gamma_alpha, double c, double c1) {
    UniformHwBound out;
    out.gamma_total = gamma2 + gamma_alpha;
    out.u1 = out.gamma_total * (out.gamma_total + family.m_f);
    out.threshold = c * ell * ell * (out.u1 + t);
    double g = family.sup_gram_frob > 0.0 ? std::pow(t / family.sup_gram_frob, 2.0) : kInf;
    double m22sq = family.m_2_2 * family.m_2_2;
    double e = m22sq > 0.0 ? std::pow(t / m22sq, alpha / 2.0) : kInf;
    double expo = std::min(g, e);
    out.bound = std::isinf(expo) ? (t == 0.0 ? std::min(1.0, c1) : 0.0)
                                 : std::min(1.0, c1 * std::exp(-expo));
    return out;
}

TailCurve empirical_tail(const MatrixFamily& family, const DistributionSpec& spec,
                         std::span<const double> thresholds, std::size_t trials,
                         RngStream rng) {
    spec.validate();
    if (trials == 0) throw ValidationError("empirical_tail: trials must be >= 1");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw ValidationError("empirical_tail: thresholds must increase");

    const std::size_t n = family.member_cols();
    const double inv_sd = 1.0 / std::sqrt(spec.variance());
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::vector<std::size_t>> counts(num_chunks,
                                                 std::vector<std::size_t>(thresholds.size(), 0));

    parallel_chunks(trials, kChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        auto& cnt = counts[ci];
        for (std::size_t t = begin; t < end; ++t) {
            std::vector<double> xi = sample(spec, n, rng.substream(t));
            for (auto& x : xi) x *= inv_sd;
            double s = chaos_sup_statistic(family, xi);
            for (std::size_t k = 0; k < thresholds.size(); ++k)
                if (s > thresholds[k]) ++cnt[k];
        }
    });

    TailCurve curve;
    curve.trials = trials;
    curve.thresholds.assign(thresholds.begin(), thresholds.end());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        std::size_t total = 0;
        for (std::size_t c = 0; c < num_chunks; ++c) total += counts[c][k];
        curve.probs.push_back(static_cast<double>(total) / static_cast<double>(trials));
        curve.ci_halfwidths.push_back(wilson_ci(total, trials).halfwidth);
    }
    return curve;
}

RegimeFit tail_regime_fit(const TailCurve& curve, double split) {
    std::vector<double> lx, ly, hx, hy;
    for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
        double t = curve.thresholds[k];
        double p = curve.probs[k];
        if (!(p > 1e-4 && p < 0.5) || t <= 0.0) continue;
        double y = std::log(-std::log(p));
        if (t < split) {
            lx.push_back(std::log(t));
            ly.push_back(y);
        } else {
            hx.push_back(std::log(t));
            hy.push_back(y);
        }
    }
    if (lx.size() < 5 || hx.size() < 5)
        throw ValidationError("tail_regime_fit: need >= 5 usable points on each side of split");
    RegimeFit fit;
    fit.low_exponent = ls_slope(lx, ly);
    fit.high_exponent = ls_slope(hx, hy);
    fit.low_points = lx.size();
    fit.high_points = hx.size();
    return fit;
}

double calibrate_tail_constant(const TailCurve& curve,
                               const std::function<double(double)>& exponent) {
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < curve.probs.size(); ++k)
        if (curve.probs[k] > 0.0 && curve.probs[k] < 1.0) usable.push_back(k);
    if (usable.empty()) throw ValidationError("calibrate_tail_constant: no usable points");
    std::size_t mid = usable[usable.size() / 2];
    return curve.probs[mid] * std::exp(exponent(curve.thresholds[mid]));
}

DecouplingComparison decoupling_comparison(const MatrixFamily& family,
                                           const DistributionSpec& spec, int p,
                                           std::size_t trials, RngStream rng) {
    if (p < 1 || p > 8) throw ValidationError("decoupling_comparison: p in [1, 8]");
    if (trials == 0) throw ValidationError("decoupling_comparison: trials must be >= 1");
    const std::size_t n = family.member_cols();
    const double inv_sd = 1.0 / std::sqrt(spec.variance());
    const DistributionSpec comparison =
        DistributionSpec::symmetric_weibull(comparison_alpha(spec));

    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> coupled_sum(num_chunks, 0.0), decoupled_sum(num_chunks, 0.0);

    parallel_chunks(trials, kChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            RngStream tr = rng.substream(t);
            std::vector<double> xi = sample(spec, n, tr.substream(0));
            for (auto& x : xi) x *= inv_sd;
            coupled_sum[ci] += std::pow(chaos_sup_statistic(family, xi), p);

            std::vector<double> eta = sample(comparison, n, tr.substream(1));
            std::vector<double> eta_tilde = sample(comparison, n, tr.substream(2));
            double best = 0.0;
            for (const auto& a : family.members)
                best = std::max(best, std::fabs(decoupled_chaos(a, eta, eta_tilde)));
            decoupled_sum[ci] += std::pow(best, p);
        }
    });

    double cs = 0.0, ds = 0.0;
    for (std::size_t c = 0; c < num_chunks; ++c) {
        cs += coupled_sum[c];
        ds += decoupled_sum[c];
    }
    DecouplingComparison out;
    const double nt = static_cast<double>(trials);
    out.coupled_lp = std::pow(cs / nt, 1.0 / p);
    out.decoupled_lp = std::pow(ds / nt, 1.0 / p);
    out.ratio = out.decoupled_lp > 0.0 ? out.coupled_lp / out.decoupled_lp : 0.0;
    return out;
}

}  // namespace blockrip

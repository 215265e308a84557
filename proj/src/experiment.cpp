#include "blockrip/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "blockrip/chaining.hpp"
#include "blockrip/chaos.hpp"
#include "blockrip/distributions.hpp"
#include "blockrip/errors.hpp"
#include "blockrip/group.hpp"
#include "blockrip/matrix.hpp"
#include "blockrip/recovery.hpp"
#include "blockrip/rip.hpp"
#include "blockrip/stats.hpp"
#include "blockrip/version.hpp"

namespace blockrip {

const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> cmds = {
        "sample",       "psi-norm", "ric-exact",        "ric-mc",  "chaos-tail",
        "moment-check", "chaining", "phase-transition", "recover", "increment-check"};
    return cmds;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

// Typed config reader that records violations instead of throwing.
struct Reader {
    const ConfigMap& cfg;
    std::vector<std::string>* violations = nullptr;

    void fail(const std::string& msg) const {
        if (violations) violations->push_back(msg);
    }
    const ConfigValue* find(const std::string& key) const {
        auto it = cfg.find(key);
        return it == cfg.end() ? nullptr : &it->second;
    }
    bool has(const std::string& key) const { return find(key) != nullptr; }

    std::int64_t get_int(const std::string& key, std::int64_t dflt, bool required = false) const {
        const ConfigValue* v = find(key);
        if (!v) {
            if (required) fail(key + ": required");
            return dflt;
        }
        if (v->kind != ConfigValue::Kind::integer) {
            fail(key + ": must be an integer");
            return dflt;
        }
        return v->i;
    }
    std::size_t get_count(const std::string& key, std::int64_t dflt,
                          bool required = false) const {
        std::int64_t v = get_int(key, dflt, required);
        if (v < 0) {
            fail(key + ": must be >= 0");
            return 0;
        }
        return static_cast<std::size_t>(v);
    }
    double get_real(const std::string& key, double dflt, bool required = false) const {
        const ConfigValue* v = find(key);
        if (!v) {
            if (required) fail(key + ": required");
            return dflt;
        }
        if (!v->is_number()) {
            fail(key + ": must be a number");
            return dflt;
        }
        return v->as_real();
    }
    std::string get_text(const std::string& key, const std::string& dflt,
                         bool required = false) const {
        const ConfigValue* v = find(key);
        if (!v) {
            if (required) fail(key + ": required");
            return dflt;
        }
        if (v->kind != ConfigValue::Kind::text) {
            fail(key + ": must be a string");
            return dflt;
        }
        return v->s;
    }
    std::vector<double> get_reals(const std::string& key, bool required = false) const {
        const ConfigValue* v = find(key);
        if (!v) {
            if (required) fail(key + ": required");
            return {};
        }
        if (v->kind != ConfigValue::Kind::array) {
            fail(key + ": must be an array");
            return {};
        }
        std::vector<double> out;
        for (const auto& item : v->items) {
            if (!item.is_number()) {
                fail(key + ": must contain numbers");
                return {};
            }
            out.push_back(item.as_real());
        }
        return out;
    }
    std::vector<std::size_t> get_counts(const std::string& key, bool required = false) const {
        std::vector<double> reals = get_reals(key, required);
        std::vector<std::size_t> out;
        for (double r : reals) {
            if (r < 0 || r != std::floor(r)) {
                fail(key + ": must contain nonnegative integers");
                return {};
            }
            out.push_back(static_cast<std::size_t>(r));
        }
        return out;
    }
    std::vector<int> get_ints_list(const std::string& key, bool required = false) const {
        std::vector<double> reals = get_reals(key, required);
        std::vector<int> out;
        for (double r : reals) out.push_back(static_cast<int>(r));
        return out;
    }
};

DistributionSpec read_dist(const Reader& r) {
    std::string kind = r.get_text("dist.kind", "", true);
    DistributionSpec spec;
    if (kind == "gaussian") {
        spec = DistributionSpec::gaussian(r.get_real("dist.variance", 1.0));
    } else if (kind == "rademacher") {
        spec = DistributionSpec::rademacher();
    } else if (kind == "weibull") {
        spec = DistributionSpec::symmetric_weibull(r.get_real("dist.alpha", 1.0, true));
    } else if (kind == "power_phi") {
        spec = DistributionSpec::power_phi(r.get_real("dist.q", 2.0, true),
                                           r.get_real("dist.scale", 1.0));
    } else if (!kind.empty()) {
        r.fail("dist.kind: unknown kind '" + kind + "'");
        return spec;
    }
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        r.fail(e.what());
    }
    return spec;
}

GroupPartition read_partition(const Reader& r, std::size_t D) {
    GroupPartition p;
    p.dimension = D;
    if (const ConfigValue* v = r.find("partition")) {
        if (v->kind != ConfigValue::Kind::array) {
            r.fail("partition: must be an array of integer arrays");
            return p;
        }
        for (const auto& grp : v->items) {
            if (grp.kind != ConfigValue::Kind::array) {
                r.fail("partition: must be an array of integer arrays");
                return p;
            }
            std::vector<std::size_t> indices;
            for (const auto& idx : grp.items) {
                if (idx.kind != ConfigValue::Kind::integer || idx.i < 1) {
                    r.fail("partition: indices are 1-based integers");
                    return p;
                }
                indices.push_back(static_cast<std::size_t>(idx.i - 1));
            }
            p.groups.push_back(std::move(indices));
        }
    } else {
        std::string mode = r.get_text("partition.mode", "singletons");
        if (mode == "singletons") {
            p = GroupPartition::singletons(D);
        } else if (mode == "contiguous") {
            std::size_t gs = r.get_count("partition.group_size", 1);
            try {
                p = GroupPartition::contiguous(D, gs);
            } catch (const ValidationError& e) {
                r.fail(e.what());
                return p;
            }
        } else {
            r.fail("partition.mode: must be 'singletons' or 'contiguous'");
            return p;
        }
    }
    try {
        p.validate();
    } catch (const ValidationError& e) {
        r.fail(e.what());
    }
    return p;
}

struct Dims {
    std::size_t L = 0, m = 0, d = 0;
};

Dims read_dims(const Reader& r) {
    Dims dims;
    dims.L = r.get_count("dims.L", 0, true);
    dims.m = r.get_count("dims.m", 0, true);
    dims.d = r.get_count("dims.d", 0, true);
    if (dims.L == 0 || dims.m == 0 || dims.d == 0) r.fail("dims: L, m, d must be >= 1");
    if (r.has("dims.D") &&
        r.get_count("dims.D", 0) != dims.d * dims.L)
        r.fail("dims: D must equal d*L");
    return dims;
}

PsiMode read_psi_mode(const Reader& r, bool* from_file) {
    std::string mode = r.get_text("psi_mode", "identity");
    if (from_file) *from_file = false;
    if (mode == "identity") return PsiMode::identity;
    if (mode == "haar") return PsiMode::haar;
    if (mode == "file") {
        if (from_file)
            *from_file = true;
        else
            r.fail("psi_mode: file not supported for this command");
        if (!r.has("psi_file")) r.fail("psi_file: required when psi_mode is 'file'");
        return PsiMode::identity;
    }
    r.fail("psi_mode: must be 'identity', 'haar' or 'file'");
    return PsiMode::identity;
}

OrthogonalBasis build_psi(const Reader& r, std::size_t D, RngStream rng) {
    bool from_file = false;
    PsiMode mode = read_psi_mode(r, &from_file);
    if (from_file) {
        OrthogonalBasis psi{load_matrix(r.get_text("psi_file", "", true))};
        psi.validate();
        return psi;
    }
    if (mode == PsiMode::haar) return haar_orthogonal(D, rng);
    return OrthogonalBasis{DenseMatrix::identity(D)};
}

BlockDiagonalMatrix build_b(const Reader& r, const DistributionSpec& spec, const Dims& dims,
                            RngStream rng) {
    if (r.has("b_file")) {
        DenseMatrix stacked = load_matrix(r.get_text("b_file", "", true));
        if (stacked.rows != dims.L * dims.m || stacked.cols != dims.d)
            throw ValidationError("b_file: expected (L*m) x d stacked blocks");
        BlockDiagonalMatrix b;
        for (std::size_t l = 0; l < dims.L; ++l) {
            DenseMatrix blk(dims.m, dims.d);
            for (std::size_t i = 0; i < dims.m; ++i)
                for (std::size_t j = 0; j < dims.d; ++j) blk(i, j) = stacked(l * dims.m + i, j);
            b.blocks.push_back(std::move(blk));
        }
        return b;
    }
    return random_block_diagonal(spec, dims.L, dims.m, dims.d, rng);
}

DenseMatrix read_single_matrix(const Reader& r) {
    std::string kind = r.get_text("matrix.kind", "", true);
    if (kind == "identity") {
        std::size_t n = r.get_count("matrix.n", 0, true);
        if (n == 0) {
            r.fail("matrix.n: must be >= 1");
            return {};
        }
        double scale = r.get_real("matrix.scale", 1.0);
        DenseMatrix a = DenseMatrix::identity(n);
        return scale == 1.0 ? a : a.scaled(scale);
    }
    if (kind == "rank_one") {
        std::size_t n = r.get_count("matrix.n", 0, true);
        if (n == 0) {
            r.fail("matrix.n: must be >= 1");
            return {};
        }
        DenseMatrix a(n, n);
        a(0, 0) = 1.0;  // e1 e1^T
        return a;
    }
    if (kind == "file") return load_matrix(r.get_text("matrix.path", "", true));
    r.fail("matrix.kind: must be 'identity', 'rank_one' or 'file'");
    return {};
}

MatrixFamily read_family(const Reader& r, RngStream rng) {
    std::string kind = r.get_text("family.kind", "", true);
    std::vector<DenseMatrix> members;
    if (kind == "scaled_identity") {
        std::size_t n = r.get_count("family.n", 0, true);
        if (n == 0) {
            r.fail("family.n: must be >= 1");
            return {};
        }
        double scale = r.get_real("family.scale", 1.0);
        members.push_back(DenseMatrix::identity(n).scaled(scale));
    } else if (kind == "rank_one_basis") {
        std::size_t n = r.get_count("family.n", 0, true);
        std::size_t count = r.get_count("family.count", static_cast<std::int64_t>(n));
        if (n == 0 || count == 0 || count > n) {
            r.fail("family: need 1 <= count <= n");
            return {};
        }
        for (std::size_t k = 0; k < count; ++k) {
            DenseMatrix a(n, n);
            a(k, k) = 1.0;
            members.push_back(std::move(a));
        }
    } else if (kind == "random_gaussian") {
        std::size_t count = r.get_count("family.count", 0, true);
        std::size_t rows = r.get_count("family.m", 0, true);
        std::size_t cols = r.get_count("family.n", 0, true);
        if (count == 0 || rows == 0 || cols == 0) {
            r.fail("family: count, m, n must be >= 1");
            return {};
        }
        for (std::size_t k = 0; k < count; ++k) {
            DenseMatrix a(rows, cols);
            RngStream mr = rng.substream(k);
            for (auto& v : a.data) v = mr.gaussian();
            members.push_back(std::move(a));
        }
    } else {
        r.fail("family.kind: must be 'scaled_identity', 'rank_one_basis' or 'random_gaussian'");
        return {};
    }
    return MatrixFamily::build(std::move(members));
}

// CSV with the config hash on the first line.
struct Csv {
    std::string text;
    explicit Csv(const std::string& hash, const std::string& header) {
        text = "# config_hash=" + hash + "\n" + header + "\n";
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text += ",";
            text += fields[i];
        }
        text += "\n";
    }
    void comment(const std::string& line) { text += "# " + line + "\n"; }
};

std::string fmt_support(const std::vector<std::size_t>& groups) {
    if (groups.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i) out += "+";
        out += std::to_string(groups[i] + 1);
    }
    return out;
}

using Summary = std::map<std::string, double>;

struct CommandOutput {
    std::string csv;
    Summary summary;
};

CommandOutput cmd_sample(const Reader& r, const std::string& hash, RngStream rng) {
    DistributionSpec spec = read_dist(r);
    std::size_t n = r.get_count("n", 0, true);
    std::vector<double> xs = sample(spec, n, rng);
    Csv csv(hash, "i,value");
    for (std::size_t i = 0; i < xs.size(); ++i)
        csv.row({std::to_string(i), format_double(xs[i])});
    Summary s;
    s["n"] = static_cast<double>(n);
    s["mean"] = mean(xs);
    s["variance"] = variance(xs);
    return {csv.text, s};
}

CommandOutput cmd_psi_norm(const Reader& r, const std::string& hash, RngStream rng) {
    DistributionSpec spec = read_dist(r);
    std::size_t n = r.get_count("n", 1000000);
    double alpha = r.get_real("alpha", 0.0, true);
    std::vector<double> xs = sample(spec, n, rng);
    double est = estimate_psi_alpha_norm(xs, alpha);
    Csv csv(hash, "alpha,n,estimate");
    csv.row({format_double(alpha), std::to_string(n), format_double(est)});
    Summary s;
    s["estimate"] = est;
    return {csv.text, s};
}

CommandOutput cmd_ric(const Reader& r, const std::string& hash, RngStream rng, bool exact) {
    DistributionSpec spec = r.has("b_file") ? DistributionSpec::gaussian(1.0) : read_dist(r);
    Dims dims = read_dims(r);
    GroupPartition partition = read_partition(r, dims.d * dims.L);
    std::size_t s = r.get_count("s", 0, true);
    OrthogonalBasis psi = build_psi(r, dims.d * dims.L, rng.substream(0));
    BlockDiagonalMatrix b = build_b(r, spec, dims, rng.substream(1));
    RicEstimate est;
    if (exact) {
        est = exact_group_ric(b, psi, partition, s);
    } else {
        std::size_t trials = r.get_count("trials", 0, true);
        est = mc_group_ric_lower(b, psi, partition, s, trials, rng.substream(2));
    }
    Csv csv(hash, "s,m,delta,mode,checked,worst_support");
    csv.row({std::to_string(s), std::to_string(dims.m), format_double(est.delta),
             est.mode == RicMode::exact ? "exact" : "mc_lower",
             std::to_string(exact ? est.supports_checked : est.trials),
             fmt_support(est.worst_support)});
    Summary sm;
    sm["delta"] = est.delta;
    // the sqrt(2)-1 gate applied to this delta; meaningful when s was
    // chosen as twice the recovery sparsity
    sm["gate"] = recovery_gate(est.delta) ? 1.0 : 0.0;
    return {csv.text, sm};
}

CommandOutput cmd_chaos_tail(const Reader& r, const std::string& hash, RngStream rng,
                             std::uint64_t seed) {
    DistributionSpec spec = read_dist(r);
    MatrixFamily family = read_family(r, rng.substream(0));
    std::vector<double> thresholds = r.get_reals("thresholds", true);
    std::size_t trials = r.get_count("trials", 0, true);
    TailCurve curve = empirical_tail(family, spec, thresholds, trials, rng.substream(1));
    Csv csv(hash, "t_or_p,value,ci,trials,seed");
    for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
        csv.row({format_double(curve.thresholds[k]), format_double(curve.probs[k]),
                 format_double(curve.ci_halfwidths[k]), std::to_string(trials),
                 std::to_string(seed)});
    Summary s;
    if (r.has("split")) {
        RegimeFit fit = tail_regime_fit(curve, r.get_real("split", 0.0));
        s["low_exponent"] = fit.low_exponent;
        s["high_exponent"] = fit.high_exponent;
    }
    s["max_prob"] = curve.probs.empty() ? 0.0 : curve.probs.front();
    return {csv.text, s};
}

CommandOutput cmd_moment_check(const Reader& r, const std::string& hash, RngStream rng,
                               std::uint64_t seed) {
    DistributionSpec spec = read_dist(r);
    DenseMatrix a = read_single_matrix(r);
    std::vector<int> p_grid = r.get_ints_list("p_grid", true);
    std::size_t trials = r.get_count("trials", 0, true);
    MomentCurve curve = empirical_moment_curve(a, spec, p_grid, trials, rng);
    Csv csv(hash, "t_or_p,value,ci,trials,seed");
    for (const auto& row : curve.rows)
        csv.row({std::to_string(row.p), format_double(row.lp), format_double(row.rel_ci),
                 std::to_string(trials), std::to_string(seed)});
    Summary s;
    s["calibration_c"] = curve.calibration_c;
    s["gram_frob"] = curve.gram_frob;
    s["gram_op"] = curve.gram_op;
    std::vector<double> lx, ly;
    for (const auto& row : curve.rows)
        if (row.lp > 0.0) {
            lx.push_back(std::log(row.p));
            ly.push_back(std::log(row.lp));
        }
    if (lx.size() >= 2) s["loglog_slope"] = ls_slope(lx, ly);
    return {csv.text, s};
}

CommandOutput cmd_chaining(const Reader& r, const std::string& hash, RngStream rng) {
    Dims dims = read_dims(r);
    GroupPartition partition = read_partition(r, dims.d * dims.L);
    std::size_t s = r.get_count("s", 0, true);
    std::size_t samples = r.get_count("samples", 256);
    OrthogonalBasis psi = build_psi(r, dims.d * dims.L, rng.substream(0));
    RipSampleSet rip_set = build_rip_metric_set(psi, partition, s, dims.m, dims.d, dims.L,
                                                samples, rng.substream(1));
    std::size_t levels = r.get_count("levels", 10);
    double diam = rip_set.set.diameter();
    std::vector<double> grid = geometric_radius_grid(std::max(diam, 1e-12), 2.0, levels);

    Csv csv(hash, "radius,cover_upper,cover_lower");
    for (double u : grid) {
        CoveringBounds cb = covering_number(rip_set.set, u);
        csv.row({format_double(u), std::to_string(cb.upper), std::to_string(cb.lower)});
    }
    double gamma2 = dudley_gamma(rip_set.set, 2.0, grid);
    double gamma1 = dudley_gamma(rip_set.set, 1.0, grid);
    double gamma_total = gamma2 + gamma1;
    double u1 = gamma_total * (gamma_total + rip_set.m_f);
    double mu = coherence_mu(psi, partition, dims.d);
    SplitIntegral split = gamma_split_estimate(rip_set.set, mu, grid);
    Summary sm;
    sm["gamma2"] = gamma2;
    sm["gamma1"] = gamma1;
    sm["Gamma"] = gamma_total;
    sm["U1"] = u1;
    sm["M_F"] = rip_set.m_f;
    sm["M_2_2"] = rip_set.m_2_2;
    sm["sup_gram_F"] = rip_set.sup_gram_frob;
    sm["mu_S"] = mu;
    sm["split_low"] = split.low;
    sm["split_high"] = split.high;
    std::ostringstream summary_line;
    summary_line << "summary";
    for (const auto& [k, v] : sm) summary_line << " " << k << "=" << format_double(v);
    csv.comment(summary_line.str());
    return {csv.text, sm};
}

CommandOutput cmd_phase_transition(const Reader& r, const std::string& hash, RngStream rng,
                                   std::uint64_t seed) {
    DistributionSpec spec = read_dist(r);
    Dims dims = read_dims(r);
    GroupPartition partition = read_partition(r, dims.d * dims.L);
    std::vector<std::size_t> s_grid = r.get_counts("s_grid", true);
    std::vector<std::size_t> m_grid = r.get_counts("m_grid", true);
    double delta_target = r.get_real("delta_target", 0.0, true);
    std::size_t trials = r.get_count("trials", 0, true);
    std::string ric_mode = r.get_text("ric_mode", "exact");
    std::size_t mc_trials = r.get_count("mc_trials", 10000);
    bool from_file = false;
    PsiMode psi_mode = read_psi_mode(r, &from_file);
    if (from_file) throw ValidationError("psi_mode: file not supported for phase-transition");

    std::vector<PhaseCell> cells = phase_transition(
        spec, psi_mode, partition, s_grid, m_grid, delta_target, trials,
        ric_mode == "mc" ? RicMode::monte_carlo_lower : RicMode::exact, mc_trials, dims.L,
        dims.d, rng);
    Csv csv(hash, "s,m,prob,mean_delta,ci,seed");
    for (const auto& c : cells)
        csv.row({std::to_string(c.s), std::to_string(c.m), format_double(c.prob),
                 format_double(c.mean_delta), format_double(c.ci_halfwidth),
                 std::to_string(seed)});
    Summary s;
    s["cells"] = static_cast<double>(cells.size());
    return {csv.text, s};
}

CommandOutput cmd_recover(const Reader& r, const std::string& hash, RngStream rng,
                          std::uint64_t seed) {
    (void)seed;
    DistributionSpec spec = read_dist(r);
    Dims dims = read_dims(r);
    GroupPartition partition = read_partition(r, dims.d * dims.L);
    std::size_t s = r.get_count("s", 0, true);
    std::vector<std::size_t> m_grid = r.get_counts("m_grid", true);
    std::size_t trials = r.get_count("trials", 0, true);
    std::string solver_name = r.get_text("solver", "iht");
    if (solver_name != "iht" && solver_name != "ista")
        throw ValidationError("solver: must be 'iht' or 'ista'");
    Solver solver = solver_name == "iht" ? Solver::iht : Solver::ista;
    std::size_t iters = r.get_count("iters", 300);
    double lambda = r.get_real("lambda", 0.0);
    bool from_file = false;
    PsiMode psi_mode = read_psi_mode(r, &from_file);
    if (from_file) throw ValidationError("psi_mode: file not supported for recover");

    std::vector<RecoveryCell> cells = recovery_experiment(
        spec, psi_mode, partition, s, m_grid, trials, solver, dims.L, dims.d, iters, lambda,
        rng);
    Csv csv(hash, "m,s,success_rate,ci,mean_err,solver,seed");
    for (const auto& c : cells)
        csv.row({std::to_string(c.m), std::to_string(c.s), format_double(c.success_rate),
                 format_double(c.ci_halfwidth), format_double(c.mean_err), c.solver,
                 std::to_string(seed)});
    Summary sm;
    sm["cells"] = static_cast<double>(cells.size());
    if (!cells.empty()) sm["final_success_rate"] = cells.back().success_rate;
    return {csv.text, sm};
}

CommandOutput cmd_increment_check(const Reader& r, const std::string& hash, RngStream rng) {
    DistributionSpec spec = read_dist(r);
    PhiFunction phi{r.get_real("phi.q", 2.0)};
    std::vector<double> u_grid = r.get_reals("u_grid", true);
    std::size_t trials = r.get_count("trials", 0, true);
    IncrementReport report = increment_tail_check(spec, phi, u_grid, trials, rng);
    Csv csv(hash, "u,empirical,bound,se,pass");
    for (const auto& row : report.rows)
        csv.row({format_double(row.u), format_double(row.empirical), format_double(row.bound),
                 format_double(row.std_err), row.pass ? "1" : "0"});
    Summary s;
    s["tau_phi"] = report.tau_phi;
    s["pass"] = report.pass ? 1.0 : 0.0;
    return {csv.text, s};
}

void check_command(const std::string& command) {
    const auto& cmds = experiment_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
        throw ValidationError("command: unknown command '" + command + "'");
}

}  // namespace

std::vector<std::string> validate_config(const ConfigMap& cfg, const std::string& command) {
    check_command(command);
    std::vector<std::string> violations;
    Reader r{cfg, &violations};

    std::int64_t seed = r.get_int("seed", 1);
    if (seed < 0) violations.push_back("seed: must be >= 0");

    bool needs_dist = command != "chaining";
    if (needs_dist && !(command == "ric-exact" && r.has("b_file")) &&
        !(command == "ric-mc" && r.has("b_file")))
        read_dist(r);

    if (command == "sample" || command == "psi-norm") {
        if (r.get_count("n", 0, command == "sample") == 0 && command == "sample")
            violations.push_back("n: must be >= 1");
        if (command == "psi-norm") {
            double alpha = r.get_real("alpha", 0.0, true);
            if (!(alpha > 0.0 && alpha <= 2.0)) violations.push_back("alpha: in (0,2]");
        }
    }

    bool needs_dims = command == "ric-exact" || command == "ric-mc" || command == "chaining" ||
                      command == "phase-transition" || command == "recover";
    if (needs_dims) {
        Dims dims = read_dims(r);
        if (dims.L && dims.m && dims.d) {
            GroupPartition partition = read_partition(r, dims.d * dims.L);
            std::size_t G = partition.num_groups();
            if (command == "ric-exact" || command == "ric-mc" || command == "chaining" ||
                command == "recover") {
                std::size_t s = r.get_count("s", 0, true);
                if (G > 0 && (s == 0 || s > G))
                    violations.push_back("s: must be in [1, number of groups]");
            }
        }
    }

    if (command == "ric-mc" || command == "chaos-tail" || command == "moment-check" ||
        command == "phase-transition" || command == "recover" || command == "increment-check") {
        if (r.get_count("trials", 0, true) == 0) violations.push_back("trials: must be >= 1");
    }

    if (command == "chaos-tail") {
        r.get_text("family.kind", "", true);
        std::vector<double> th = r.get_reals("thresholds", true);
        for (std::size_t i = 1; i < th.size(); ++i)
            if (!(th[i] > th[i - 1]))
                violations.push_back("thresholds: must be strictly increasing");
    }
    if (command == "moment-check") {
        r.get_text("matrix.kind", "", true);
        std::vector<int> ps = r.get_ints_list("p_grid", true);
        for (int p : ps)
            if (p < 2 || p > 20) violations.push_back("p_grid: entries in [2, 20]");
    }
    if (command == "phase-transition") {
        r.get_counts("s_grid", true);
        r.get_counts("m_grid", true);
        r.get_real("delta_target", 0.0, true);
    }
    if (command == "recover") r.get_counts("m_grid", true);
    if (command == "increment-check") {
        double q = r.get_real("phi.q", 2.0);
        if (!(q > 1.0 && q <= 2.0)) violations.push_back("phi.q: in (1,2]");
        r.get_reals("u_grid", true);
    }

    // Deduplicate while preserving order.
    std::vector<std::string> unique;
    for (auto& v : violations)
        if (std::find(unique.begin(), unique.end(), v) == unique.end())
            unique.push_back(v);
    return unique;
}

ExperimentResult run_experiment(const ConfigMap& cfg, const std::string& command) {
    check_command(command);
    std::vector<std::string> violations = validate_config(cfg, command);
    if (!violations.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < violations.size(); ++i) {
            if (i) joined += "; ";
            joined += violations[i];
        }
        throw ValidationError(joined);
    }

    Reader r{cfg, nullptr};
    const std::uint64_t seed = static_cast<std::uint64_t>(r.get_int("seed", 1));
    const std::string hash = config_hash(cfg);
    RngStream rng(seed, 0);

    auto start = std::chrono::steady_clock::now();
    CommandOutput out;
    if (command == "sample")
        out = cmd_sample(r, hash, rng);
    else if (command == "psi-norm")
        out = cmd_psi_norm(r, hash, rng);
    else if (command == "ric-exact")
        out = cmd_ric(r, hash, rng, true);
    else if (command == "ric-mc")
        out = cmd_ric(r, hash, rng, false);
    else if (command == "chaos-tail")
        out = cmd_chaos_tail(r, hash, rng, seed);
    else if (command == "moment-check")
        out = cmd_moment_check(r, hash, rng, seed);
    else if (command == "chaining")
        out = cmd_chaining(r, hash, rng);
    else if (command == "phase-transition")
        out = cmd_phase_transition(r, hash, rng, seed);
    else if (command == "recover")
        out = cmd_recover(r, hash, rng, seed);
    else
        out = cmd_increment_check(r, hash, rng);
    auto end = std::chrono::steady_clock::now();
    double wall_ms =
        std::chrono::duration_cast<std::chrono::microseconds>(end - start).count() / 1000.0;

    ExperimentResult result;
    result.command = command;
    result.csv = out.csv;
    result.summary = out.summary;

    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["seed"] = seed;
    meta["config_hash"] = hash;
    meta["config"] = canonical_config_text(cfg);
    nlohmann::ordered_json summary_json;
    for (const auto& [k, v] : out.summary) summary_json[k] = v;
    meta["summary"] = summary_json;
    meta["wall_ms"] = wall_ms;
    result.meta_json = meta.dump(2) + "\n";

    std::string out_path = r.get_text("out", "");
    if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + out_path);
        os << result.csv;
        if (!os.good()) throw IoError("write failed: " + out_path);
        os.close();
        std::ofstream ms(out_path + ".meta.json", std::ios::binary);
        if (!ms) throw IoError("cannot open for writing: " + out_path + ".meta.json");
        ms << result.meta_json;
        if (!ms.good()) throw IoError("write failed: " + out_path + ".meta.json");
    }
    return result;
}

std::string load_result_csv(const std::string& path, const std::string& expected_hash) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    std::string text = buf.str();
    const std::string prefix = "# config_hash=";
    if (text.rfind(prefix, 0) != 0)
        throw ValidationError("result csv: missing config hash line");
    std::string embedded = text.substr(prefix.size(), text.find('\n') - prefix.size());
    if (embedded != expected_hash)
        throw ValidationError("result csv: config hash mismatch (expected " + expected_hash +
                              ", found " + embedded + ")");
    return text;
}

}  // namespace blockrip

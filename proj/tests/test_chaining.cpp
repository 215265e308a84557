#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockrip/chaining.hpp"
#include "blockrip/errors.hpp"
#include "blockrip/stats.hpp"
#include "oracles.hpp"

using namespace blockrip;

namespace {

MetricPointSet two_points(double rho) {
    return MetricPointSet::from_distances("pair", 2, {0.0, rho, rho, 0.0});
}

VOperator make_v(const OrthogonalBasis& psi, std::vector<double> x, std::size_t m,
                 std::size_t d, std::size_t L) {
    return VOperator{std::move(x), &psi, m, d, L};
}

}  // namespace

TEST_CASE("v_apply single inner product and zero") {
    OrthogonalBasis id{DenseMatrix::identity(2)};
    VOperator v = make_v(id, {1.0, 2.0}, 1, 2, 1);
    std::vector<double> xi = {3.0, 4.0};
    CHECK(v_apply(v, xi) == std::vector<double>{11.0});

    VOperator z = make_v(id, {0.0, 0.0}, 1, 2, 1);
    CHECK(v_apply(z, xi) == std::vector<double>{0.0});

    std::vector<double> wrong = {1.0};
    CHECK_THROWS_AS(v_apply(v, wrong), ValidationError);
}

TEST_CASE("v operator closed forms match dense materialization at (3,2,2)") {
    OrthogonalBasis psi = haar_orthogonal(4, RngStream(3, 0));
    RngStream rng(4, 0);
    std::vector<double> x(4), y(4);
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian();
    VOperator vx = make_v(psi, x, 3, 2, 2);
    VOperator vy = make_v(psi, y, 3, 2, 2);

    DenseMatrix dense = v_to_dense(vx);
    CHECK(dense.rows == 6);
    CHECK(dense.cols == 12);
    CHECK(v_frobenius(vx) == doctest::Approx(frobenius_norm(dense)).epsilon(1e-12));

    double xnorm = 0.0;
    for (double v : x) xnorm += v * v;
    CHECK(v_frobenius(vx) == doctest::Approx(std::sqrt(3.0 * xnorm)).epsilon(1e-12));

    VOperator zero = make_v(psi, {0, 0, 0, 0}, 3, 2, 2);
    CHECK(v_frobenius(zero) == 0.0);

    // unit x gives exactly sqrt(m)
    std::vector<double> xu = x;
    for (auto& v : xu) v /= std::sqrt(xnorm);
    CHECK(v_frobenius(make_v(psi, xu, 3, 2, 2)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    // metric closed forms vs dense differences
    DenseMatrix diff = v_to_dense(vx);
    DenseMatrix dy = v_to_dense(vy);
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= dy.data[i];
    CHECK(v_dist_frobenius(vx, vy) == doctest::Approx(frobenius_norm(diff)).epsilon(1e-12));
    CHECK(v_dist_opnorm(vx, vy) == doctest::Approx(opnorm_2_2(diff, 1e-10)).epsilon(1e-8));
    CHECK(v_dist_opnorm(vx, vx) == 0.0);

    // gram frobenius closed form
    CHECK(v_gram_frobenius(vx) ==
          doctest::Approx(frobenius_norm(v_to_dense(vx).gram())).epsilon(1e-10));
}

TEST_CASE("V(x) xi matches B Psi x in first and second moments") {
    const std::size_t m = 4, d = 3, L = 2, D = d * L, trials = 100000;
    OrthogonalBasis psi = haar_orthogonal(D, RngStream(5, 0));
    RngStream rng(6, 0);
    std::vector<double> x(D);
    for (auto& v : x) v = rng.gaussian();
    VOperator vx = make_v(psi, x, m, d, L);

    double sum_v = 0.0, sq_v = 0.0, sum_b = 0.0, sq_b = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream tr = rng.substream(t);
        std::vector<double> xi(m * d * L);
        for (auto& v : xi) v = tr.gaussian();
        std::vector<double> out = v_apply(vx, xi);
        double s = 0.0;
        for (double v : out) s += v * v;
        sum_v += s;
        sq_v += s * s;

        BlockDiagonalMatrix b =
            random_block_diagonal(DistributionSpec::gaussian(1.0), L, m, d, tr.substream(1));
        std::vector<double> bx = b.apply(psi.matrix.apply(x));
        double sb = 0.0;
        for (double v : bx) sb += v * v;
        sum_b += sb;
        sq_b += sb * sb;
    }
    double n = static_cast<double>(trials);
    double mean_v = sum_v / n, mean_b = sum_b / n;
    double var_v = sq_v / n - mean_v * mean_v, var_b = sq_b / n - mean_b * mean_b;
    double se_mean = std::sqrt((var_v + var_b) / n);
    CHECK(std::fabs(mean_v - mean_b) <= 3.0 * se_mean);
    // second moments within 3 crude standard errors
    double se_var = 3.0 * (var_v + var_b) / std::sqrt(n);
    CHECK(std::fabs(var_v - var_b) <= se_var);
}

TEST_CASE("covering number bounds") {
    MetricPointSet pair = two_points(1.0);
    auto far = covering_number(pair, 1.5);
    CHECK(far.upper == 1);
    CHECK(far.lower == 1);
    auto mid = covering_number(pair, 0.4);
    CHECK(mid.upper == 2);
    CHECK(mid.lower == 2);
    CHECK_THROWS_AS(covering_number(pair, 0.0), ValidationError);
}

TEST_CASE("covering sandwich on 1-D segments vs the interval oracle") {
    RngStream rng(7, 0);
    std::vector<std::vector<double>> pts;
    std::vector<double> flat;
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform01();
        pts.push_back({x});
        flat.push_back(x);
    }
    MetricPointSet set = MetricPointSet::from_points_euclidean(pts);
    set.validate();
    for (double r : {0.01, 0.03, 0.08, 0.2, 0.5}) {
        auto cb = covering_number(set, r);
        std::size_t exact = oracles::interval_cover_count(flat, r);
        REQUIRE(cb.lower <= exact);
        REQUIRE(exact <= cb.upper);
        REQUIRE(cb.upper <= 4 * cb.lower);
    }
}

TEST_CASE("dudley gamma: singleton, two-point window, exact scaling") {
    MetricPointSet single = MetricPointSet::from_distances("one", 1, {0.0});
    std::vector<double> grid0 = {1.0, 0.5, 0.25};
    CHECK(dudley_gamma(single, 2.0, grid0) == 0.0);

    double rho = 1.7;
    MetricPointSet pair = two_points(rho);
    auto grid = geometric_radius_grid(rho);
    double est = dudley_gamma(pair, 2.0, grid);
    CHECK(est >= rho * std::sqrt(std::log(2.0)) / 2.0);
    CHECK(est <= 4.0 * rho);

    double c = 3.25;
    MetricPointSet scaled_pair = two_points(c * rho);
    std::vector<double> scaled_grid = grid;
    for (auto& u : scaled_grid) u *= c;
    CHECK(dudley_gamma(scaled_pair, 2.0, scaled_grid) == doctest::Approx(c * est).epsilon(1e-12));

    std::vector<double> empty;
    CHECK_THROWS_AS(dudley_gamma(pair, 2.0, empty), ValidationError);
    std::vector<double> increasing = {0.1, 0.2};
    CHECK_THROWS_AS(dudley_gamma(pair, 2.0, increasing), ValidationError);
}

TEST_CASE("dudley gamma is stable under grid refinement") {
    RngStream rng(8, 0);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.gaussian(), rng.gaussian()});
    MetricPointSet set = MetricPointSet::from_points_euclidean(pts);
    double diam = set.diameter();
    auto coarse = geometric_radius_grid(diam, 2.0, 10);
    auto fine = geometric_radius_grid(diam, std::sqrt(2.0), 20);
    double a = dudley_gamma(set, 2.0, coarse);
    double b = dudley_gamma(set, 2.0, fine);
    CHECK(std::fabs(a - b) / a < 0.30);
}

TEST_CASE("gamma_phi_p upper estimate") {
    PhiFunction phi{2.0};
    MetricPointSet single = MetricPointSet::from_distances("one", 1, {0.0});
    std::vector<double> g0 = {1.0, 0.5};
    CHECK(gamma_phi_p_upper(single, phi, 1.0, g0) == 0.0);

    double rho = 2.0;
    MetricPointSet pair = two_points(rho);
    auto grid = geometric_radius_grid(rho);
    // p = 1: the level-0 term phi*^{-1}(1) * e_0 = sqrt(2) * rho
    double p1 = gamma_phi_p_upper(pair, phi, 1.0, grid);
    CHECK(p1 == doctest::Approx(std::sqrt(2.0) * rho).epsilon(1e-6));
    double p4 = gamma_phi_p_upper(pair, phi, 4.0, grid);
    CHECK(p4 <= p1 + 1e-12);
    CHECK(p4 == 0.0);  // 2^{2^2} balls cover two points at radius ~0

    RngStream rng(9, 0);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
    MetricPointSet cloud = MetricPointSet::from_points_euclidean(pts);
    auto cg = geometric_radius_grid(cloud.diameter());
    double q1 = gamma_phi_p_upper(cloud, phi, 1.0, cg);
    double q2 = gamma_phi_p_upper(cloud, phi, 2.0, cg);
    double q4 = gamma_phi_p_upper(cloud, phi, 4.0, cg);
    CHECK(q1 > 0.0);
    CHECK(q2 <= q1 + 1e-12);
    CHECK(q4 <= q2 + 1e-12);
}

TEST_CASE("rip metric sample set: unit norms, coherence bound, metrics") {
    const std::size_t m = 5, d = 4, L = 8, D = 32, s = 2;
    GroupPartition partition = GroupPartition::contiguous(D, 4);
    for (int rep = 0; rep < 10; ++rep) {
        OrthogonalBasis psi = haar_orthogonal(D, RngStream(20 + rep, 0));
        RipSampleSet set =
            build_rip_metric_set(psi, partition, s, m, d, L, 64, RngStream(30 + rep, 0));
        REQUIRE(set.xs.size() == 64);
        CHECK(set.m_f == doctest::Approx(std::sqrt(5.0)));
        double mu = coherence_mu(psi, partition, d);
        CHECK(set.m_2_2 <= std::sqrt(2.0) * mu + 1e-9);
        for (const auto& x : set.xs) {
            double n2 = 0.0;
            for (double v : x) n2 += v * v;
            REQUIRE(n2 == doctest::Approx(1.0).epsilon(1e-12));
            REQUIRE(group_l0(x, partition) <= s);
        }
        set.set.validate();
    }
}

TEST_CASE("gamma split pieces add up to the unsplit integral") {
    RngStream rng(10, 0);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({rng.gaussian(), rng.gaussian()});
    MetricPointSet set = MetricPointSet::from_points_euclidean(pts);
    auto grid = geometric_radius_grid(set.diameter());
    double full = dudley_gamma(set, 1.0, grid);

    auto zero = gamma_split_estimate(set, 0.0, grid);
    CHECK(zero.low == 0.0);
    CHECK(zero.low + zero.high == doctest::Approx(full).epsilon(1e-10));

    auto past = gamma_split_estimate(set, set.diameter() * 1.01, grid);
    CHECK(past.high == 0.0);
    CHECK(past.low == doctest::Approx(full).epsilon(1e-10));

    for (double frac : {0.1, 0.3, 0.7}) {
        auto split = gamma_split_estimate(set, frac * set.diameter(), grid);
        REQUIRE(split.low + split.high == doctest::Approx(full).epsilon(1e-10));
        REQUIRE(split.low >= 0.0);
        REQUIRE(split.high >= 0.0);
    }
}

TEST_CASE("gamma/U quantities for matrix families") {
    // singleton family: Gamma = 0, U1 = 0
    std::vector<DenseMatrix> one;
    one.push_back(DenseMatrix::identity(3));
    MatrixFamily single = MatrixFamily::build(std::move(one));
    auto q0 = gamma_u_quantities(single, 2.0, {});
    CHECK(q0.gamma_total == 0.0);
    CHECK(q0.u1 == 0.0);
    CHECK(q0.m_f == doctest::Approx(std::sqrt(3.0)));

    // scaling: all radii and Gamma scale linearly
    RngStream rng(11, 0);
    std::vector<DenseMatrix> members, scaled;
    for (int k = 0; k < 6; ++k) {
        DenseMatrix a(4, 4);
        for (auto& v : a.data) v = rng.gaussian();
        scaled.push_back(a.scaled(2.0));
        members.push_back(std::move(a));
    }
    MatrixFamily fam = MatrixFamily::build(std::move(members));
    MatrixFamily fam2 = MatrixFamily::build(std::move(scaled));
    MetricPointSet d22 = metric_set_from_family(fam, MatrixMetric::op_2_2);
    auto grid = geometric_radius_grid(d22.diameter());
    std::vector<double> grid2 = grid;
    for (auto& u : grid2) u *= 2.0;
    auto qa = gamma_u_quantities(fam, 2.0, grid);
    auto qb = gamma_u_quantities(fam2, 2.0, grid2);
    CHECK(qb.m_f == doctest::Approx(2.0 * qa.m_f).epsilon(1e-10));
    CHECK(qb.m_2_2 == doctest::Approx(2.0 * qa.m_2_2).epsilon(1e-7));
    CHECK(qb.gamma_total == doctest::Approx(2.0 * qa.gamma_total).epsilon(1e-6));
    CHECK(qa.u1 >= qa.gamma_total * qa.gamma_total - 1e-12);
    CHECK(qb.u1 == doctest::Approx(2.0 * qa.gamma_total * (2.0 * qa.gamma_total + qb.m_f))
                       .epsilon(1e-6));

    // alpha in (1,2) needs general 2->beta norms: rejected
    CHECK_THROWS_AS(gamma_u_quantities(fam, 1.5, grid), ValidationError);
    // alpha = 1 route uses the 2->inf metric
    auto q1 = gamma_u_quantities(fam, 1.0, grid);
    CHECK(q1.gamma_alpha > 0.0);
    CHECK(q1.u2 == doctest::Approx(q1.m_2_2 * q1.gamma_total + q1.sup_gram_frob).epsilon(1e-10));
}

TEST_CASE("metric set validation catches asymmetry") {
    std::vector<double> bad = {0.0, 1.0, 2.0, 0.0};
    auto set = MetricPointSet::from_distances("bad", 2, bad);
    CHECK_THROWS_AS(set.validate(), ValidationError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "blockrip/errors.hpp"
#include "blockrip/matrix.hpp"
#include "oracles.hpp"

using namespace blockrip;

namespace {

DenseMatrix make(std::size_t r, std::size_t c, std::vector<double> vals) {
    DenseMatrix a(r, c);
    a.data = std::move(vals);
    return a;
}

// eigenvalues of a symmetric 2x2 by the characteristic polynomial
std::pair<double, double> eig2(const DenseMatrix& a) {
    double tr = a(0, 0) + a(1, 1);
    double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    double disc = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

DenseMatrix random_symmetric(std::size_t n, RngStream rng) {
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double v = rng.gaussian();
            s(i, j) = s(j, i) = v;
        }
    return s;
}

}  // namespace

TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(DenseMatrix::identity(3)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(frobenius_norm(DenseMatrix(2, 5)) == 0.0);
    CHECK(frobenius_norm(make(1, 2, {3, 4})) == doctest::Approx(5.0));
}

TEST_CASE("opnorm 2->2 basics") {
    std::vector<double> d = {1.0, 3.0};
    CHECK(opnorm_2_2(DenseMatrix::diagonal(d)) == doctest::Approx(3.0));
    CHECK(opnorm_2_2(DenseMatrix::identity(7)) == doctest::Approx(1.0));
    // 2x2 characteristic polynomial oracle
    DenseMatrix ones = make(2, 2, {1, 1, 1, 1});
    auto [lo, hi] = eig2(ones.gram());
    (void)lo;
    CHECK(opnorm_2_2(ones) == doctest::Approx(std::sqrt(hi)).epsilon(1e-8));
    CHECK(opnorm_2_2(ones) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(opnorm_2_2(ones, 0.0), ValidationError);
}

TEST_CASE("opnorm 2->2 survives a start vector in the null space") {
    // A^T A = [[2,-2],[-2,2]]: the all-ones start is a null vector.
    DenseMatrix a = make(2, 2, {1, -1, -1, 1});
    CHECK(opnorm_2_2(a) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("opnorm 2->2 vs jacobi oracle on random matrices") {
    RngStream rng(77, 0);
    for (int rep = 0; rep < 5; ++rep) {
        DenseMatrix a(12, 8);
        for (auto& v : a.data) v = rng.gaussian();
        auto eig = oracles::jacobi_eigenvalues(a.gram());
        CHECK(opnorm_2_2(a) == doctest::Approx(std::sqrt(eig.back())).epsilon(1e-7));
    }
}

TEST_CASE("opnorm 2->inf closed form and certificate") {
    CHECK(opnorm_2_inf(DenseMatrix::identity(3)) == doctest::Approx(1.0));
    CHECK(opnorm_2_inf(make(2, 2, {3, 4, 0, 1})) == doctest::Approx(5.0));
    CHECK(opnorm_2_inf(DenseMatrix(3, 4)) == 0.0);

    RngStream rng(5, 0);
    DenseMatrix a(6, 5);
    for (auto& v : a.data) v = rng.gaussian();
    double closed = opnorm_2_inf(a);
    // brute force over random unit vectors never exceeds the closed form
    double brute = 0.0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> x(5);
        double n2 = 0.0;
        for (auto& v : x) {
            v = rng.gaussian();
            n2 += v * v;
        }
        for (auto& v : x) v /= std::sqrt(n2);
        std::vector<double> y = a.apply(x);
        for (double v : y) brute = std::max(brute, std::fabs(v));
    }
    CHECK(brute <= closed + 1e-12);
    // the normalized transpose of the maximizing row attains it
    std::size_t best_row = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * a(i, j);
        if (s > best) {
            best = s;
            best_row = i;
        }
    }
    std::vector<double> xstar(a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) xstar[j] = a(best_row, j) / std::sqrt(best);
    std::vector<double> y = a.apply(xstar);
    double attained = 0.0;
    for (double v : y) attained = std::max(attained, std::fabs(v));
    CHECK(attained == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("opnorm bounded by frobenius, equality at rank one") {
    RngStream rng(6, 0);
    DenseMatrix a(7, 4);
    for (auto& v : a.data) v = rng.gaussian();
    CHECK(opnorm_2_2(a) <= frobenius_norm(a) + 1e-10);
    // outer product u v^T
    DenseMatrix outer(5, 3);
    std::vector<double> u(5), w(3);
    for (auto& v : u) v = rng.gaussian();
    for (auto& v : w) v = rng.gaussian();
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) outer(i, j) = u[i] * w[j];
    CHECK(opnorm_2_2(outer) == doctest::Approx(frobenius_norm(outer)).epsilon(1e-8));
}

TEST_CASE("extreme eigenvalues") {
    std::vector<double> d = {0.5, 2.0};
    auto e1 = extreme_eigen_sym(DenseMatrix::diagonal(d));
    CHECK(e1.lambda_min == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(e1.lambda_max == doctest::Approx(2.0).epsilon(1e-8));

    auto e2 = extreme_eigen_sym(DenseMatrix::identity(9));
    CHECK(e2.lambda_min == doctest::Approx(1.0));
    CHECK(e2.lambda_max == doctest::Approx(1.0));

    auto e3 = extreme_eigen_sym(make(2, 2, {2, 1, 1, 2}));
    CHECK(e3.lambda_min == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(e3.lambda_max == doctest::Approx(3.0).epsilon(1e-8));

    std::vector<double> dn = {-3.0, 1.0};
    auto e4 = extreme_eigen_sym(DenseMatrix::diagonal(dn));
    CHECK(e4.lambda_min == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(e4.lambda_max == doctest::Approx(1.0).epsilon(1e-8));

    CHECK_THROWS_AS(extreme_eigen_sym(DenseMatrix(513, 513)), CapacityError);
    CHECK_THROWS_AS(extreme_eigen_sym(DenseMatrix(2, 3)), ValidationError);
}

TEST_CASE("extreme eigenvalues vs jacobi oracle at n=64") {
    RngStream rng(8, 0);
    DenseMatrix s = random_symmetric(64, rng);
    auto eig = oracles::jacobi_eigenvalues(s);
    auto ex = extreme_eigen_sym(s, 1e-10);
    CHECK(ex.lambda_min == doctest::Approx(eig.front()).epsilon(1e-7));
    CHECK(ex.lambda_max == doctest::Approx(eig.back()).epsilon(1e-7));
}

TEST_CASE("random block diagonal: support, variance, determinism") {
    auto b = random_block_diagonal(DistributionSpec::rademacher(), 2, 1, 2, RngStream(4, 0));
    REQUIRE(b.num_blocks() == 2);
    for (const auto& blk : b.blocks)
        for (double v : blk.data) CHECK(std::fabs(v) == 1.0);

    auto bw = random_block_diagonal(DistributionSpec::symmetric_weibull(1.0), 10, 100, 100,
                                    RngStream(5, 0));
    double s2 = 0.0;
    std::size_t n = 0;
    for (const auto& blk : bw.blocks)
        for (double v : blk.data) {
            s2 += v * v;
            ++n;
        }
    CHECK(s2 / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.022));

    auto b1 = random_block_diagonal(DistributionSpec::gaussian(1.0), 3, 4, 5, RngStream(6, 1));
    auto b2 = random_block_diagonal(DistributionSpec::gaussian(1.0), 3, 4, 5, RngStream(6, 1));
    for (std::size_t l = 0; l < 3; ++l) CHECK(b1.blocks[l].data == b2.blocks[l].data);
    CHECK_THROWS_AS(random_block_diagonal(DistributionSpec::gaussian(1.0), 0, 1, 1,
                                          RngStream(1, 0)),
                    ValidationError);
}

TEST_CASE("block apply: identity blocks, single block, dense oracle") {
    BlockDiagonalMatrix b;
    b.blocks = {DenseMatrix::identity(2), DenseMatrix::identity(2)};
    std::vector<double> x = {1, 2, 3, 4};
    CHECK(b.apply(x) == x);

    BlockDiagonalMatrix single;
    single.blocks = {make(1, 1, {2.0})};
    std::vector<double> three = {3.0};
    CHECK(single.apply(three) == std::vector<double>{6.0});

    auto br = random_block_diagonal(DistributionSpec::gaussian(1.0), 2, 3, 4, RngStream(9, 0));
    DenseMatrix dense = br.to_dense();
    RngStream rng(10, 0);
    std::vector<double> xr(8);
    for (auto& v : xr) v = rng.gaussian();
    auto via_blocks = br.apply(xr);
    auto via_dense = dense.apply(xr);
    for (std::size_t i = 0; i < via_blocks.size(); ++i)
        CHECK(via_blocks[i] == doctest::Approx(via_dense[i]).epsilon(1e-12));

    std::vector<double> wrong(7);
    CHECK_THROWS_AS(b.apply(wrong), ValidationError);
}

TEST_CASE("block opnorm equals max block opnorm") {
    auto b = random_block_diagonal(DistributionSpec::gaussian(1.0), 3, 4, 3, RngStream(11, 0));
    double max_block = 0.0;
    for (const auto& blk : b.blocks) max_block = std::max(max_block, opnorm_2_2(blk));
    CHECK(opnorm_2_2(b.to_dense()) == doctest::Approx(max_block).epsilon(1e-7));
}

TEST_CASE("haar orthogonal") {
    auto q1 = haar_orthogonal(1, RngStream(12, 0));
    CHECK(std::fabs(std::fabs(q1.matrix(0, 0)) - 1.0) < 1e-12);

    auto q5 = haar_orthogonal(5, RngStream(13, 0));
    CHECK(q5.orthogonality_error() <= 1e-10);
    q5.validate();

    auto qa = haar_orthogonal(6, RngStream(14, 2));
    auto qb = haar_orthogonal(6, RngStream(14, 2));
    CHECK(qa.matrix.data == qb.matrix.data);

    auto q64 = haar_orthogonal(64, RngStream(15, 0));
    CHECK(q64.orthogonality_error() <= 1e-10);
}

TEST_CASE("matrix text serialization round trip") {
    RngStream rng(16, 0);
    DenseMatrix a(3, 4);
    for (auto& v : a.data) v = rng.gaussian();
    std::stringstream ss;
    save_matrix(a, ss);
    DenseMatrix b = load_matrix(ss);
    REQUIRE(b.rows == 3);
    REQUIRE(b.cols == 4);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-15));
    CHECK_THROWS_AS(load_matrix("/nonexistent/path.mat"), IoError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "blockrip/errors.hpp"
#include "blockrip/group.hpp"
#include "blockrip/rng.hpp"
#include "oracles.hpp"

using namespace blockrip;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

GroupPartition pairs(std::size_t D) { return GroupPartition::contiguous(D, 2); }

std::vector<double> random_vec(std::size_t n, RngStream& rng) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    return x;
}
}  // namespace

TEST_CASE("partition validation messages") {
    GroupPartition overlap;
    overlap.dimension = 3;
    overlap.groups = {{0, 1}, {1, 2}};
    CHECK_THROWS_WITH_AS(overlap.validate(), "partition: overlap at index 2", ValidationError);

    GroupPartition missing;
    missing.dimension = 4;
    missing.groups = {{0, 1}, {3}};
    CHECK_THROWS_WITH_AS(missing.validate(), "partition: missing index 3", ValidationError);

    GroupPartition good = GroupPartition::contiguous(6, 3);
    good.validate();
    CHECK(good.max_group_size() == 3);
}

TEST_CASE("mixed norm examples") {
    GroupPartition p4 = pairs(4);
    std::vector<double> x = {3, 4, 0, 0};
    CHECK(mixed_norm(x, p4, 2.0) == doctest::Approx(5.0));
    CHECK(mixed_norm(x, p4, 1.0) == doctest::Approx(5.0));
    CHECK(mixed_norm(x, p4, kInf) == doctest::Approx(5.0));

    std::vector<double> y = {1, 0, 1, 0};
    CHECK(mixed_norm(y, p4, 1.0) == doctest::Approx(2.0));
    CHECK(mixed_norm(y, p4, kInf) == doctest::Approx(1.0));

    CHECK_THROWS_AS(mixed_norm(x, p4, 0.5), ValidationError);
    std::vector<double> wrong = {1.0};
    CHECK_THROWS_AS(mixed_norm(wrong, p4, 2.0), ValidationError);
}

TEST_CASE("mixed norm is a norm; nesting; pythagorean identity") {
    RngStream rng(3, 0);
    GroupPartition p = pairs(12);
    for (int t = 0; t < 1000; ++t) {
        auto x = random_vec(12, rng);
        auto y = random_vec(12, rng);
        for (double pv : {1.0, 1.5, 2.0, kInf}) {
            std::vector<double> sum(12);
            for (int i = 0; i < 12; ++i) sum[i] = x[i] + y[i];
            REQUIRE(mixed_norm(sum, p, pv) <=
                    mixed_norm(x, p, pv) + mixed_norm(y, p, pv) + 1e-10);
            std::vector<double> scaled(12);
            for (int i = 0; i < 12; ++i) scaled[i] = -2.5 * x[i];
            REQUIRE(mixed_norm(scaled, p, pv) ==
                    doctest::Approx(2.5 * mixed_norm(x, p, pv)).epsilon(1e-10));
        }
        REQUIRE(mixed_norm(x, p, kInf) <= mixed_norm(x, p, 2.0) + 1e-12);
        REQUIRE(mixed_norm(x, p, 2.0) <= mixed_norm(x, p, 1.0) + 1e-12);
        double l2 = 0.0;
        for (double v : x) l2 += v * v;
        REQUIRE(mixed_norm(x, p, 2.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));
    }
}

TEST_CASE("group l0") {
    GroupPartition p = pairs(4);
    std::vector<double> zero = {0, 0, 0, 0};
    CHECK(group_l0(zero, p) == 0);
    std::vector<double> x = {3, 4, 0, 0};
    CHECK(group_l0(x, p) == 1);
    GroupPartition p6 = pairs(12);
    std::vector<double> ones(12, 1.0);
    CHECK(group_l0(ones, p6) == 6);
    CHECK(group_l0(x, p, 10.0) == 0);
}

TEST_CASE("best group approx examples") {
    GroupPartition p = pairs(6);
    std::vector<double> x = {1, 0, 2, 0, 3, 0};
    auto [z3, e3] = best_group_approx(x, p, 3);
    CHECK(e3 == 0.0);
    CHECK(z3.data == x);

    auto [z1, e1] = best_group_approx(x, p, 1);
    CHECK(e1 == doctest::Approx(3.0));
    CHECK(z1.active_groups == std::vector<std::size_t>{2});
    CHECK(z1.data == std::vector<double>{0, 0, 0, 0, 3, 0});

    auto [z0, e0] = best_group_approx(x, p, 0);
    CHECK(e0 == doctest::Approx(6.0));
    CHECK(group_l0(z0.data, p) == 0);
}

TEST_CASE("best group approx is optimal vs exhaustive supports") {
    RngStream rng(9, 0);
    GroupPartition p = pairs(12);  // G = 6
    for (int rep = 0; rep < 20; ++rep) {
        auto x = random_vec(12, rng);
        for (std::size_t s = 1; s <= 3; ++s) {
            auto [z, err] = best_group_approx(x, p, s);
            double best = 1e300;
            oracles::for_each_subset(6, s, [&](const std::vector<std::size_t>& keep) {
                std::vector<double> trunc = x;
                for (std::size_t g = 0; g < 6; ++g) {
                    bool kept = false;
                    for (std::size_t k : keep) kept = kept || (k == g);
                    if (!kept)
                        for (std::size_t idx : p.groups[g]) trunc[idx] = 0.0;
                }
                std::vector<double> diff(12);
                for (int i = 0; i < 12; ++i) diff[i] = x[i] - trunc[i];
                best = std::min(best, mixed_norm(diff, p, 1.0));
            });
            REQUIRE(err == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("best group approx error non-increasing in s") {
    RngStream rng(10, 0);
    GroupPartition p = pairs(16);
    auto x = random_vec(16, rng);
    double prev = 1e300;
    for (std::size_t s = 0; s <= 8; ++s) {
        auto [z, err] = best_group_approx(x, p, s);
        REQUIRE(err <= prev + 1e-12);
        prev = err;
    }
}

TEST_CASE("coherence mu") {
    GroupPartition singles = GroupPartition::singletons(4);
    OrthogonalBasis id{DenseMatrix::identity(4)};
    CHECK(coherence_mu(id, singles, 4) == doctest::Approx(1.0));

    // normalized 4x4 Hadamard: all entries +-1/2
    DenseMatrix h(4, 4);
    int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(i, j) = sign[i][j] * 0.5;
    OrthogonalBasis had{h};
    had.validate();
    CHECK(coherence_mu(had, singles, 4) == doctest::Approx(1.0));

    // random Haar, D=32, 8 groups of 4, d=4: in (0,1] and equal to a direct
    // recomputation of the formula
    OrthogonalBasis haar = haar_orthogonal(32, RngStream(11, 0));
    GroupPartition p8 = GroupPartition::contiguous(32, 4);
    double mu = coherence_mu(haar, p8, 4);
    CHECK(mu > 0.0);
    CHECK(mu <= 1.0);
    double max_row = 0.0;
    for (std::size_t i = 0; i < 32; ++i) {
        double row_best = 0.0;
        for (std::size_t g = 0; g < 8; ++g) {
            double s = 0.0;
            for (std::size_t idx : p8.groups[g])
                s += haar.matrix(i, idx) * haar.matrix(i, idx);
            row_best = std::max(row_best, std::sqrt(s));
        }
        max_row = std::max(max_row, row_best);
    }
    CHECK(mu == doctest::Approx(std::min(2.0 * max_row, 1.0)).epsilon(1e-12));
}

TEST_CASE("support enumeration") {
    GroupSupportEnumerator en(3, 1);
    std::vector<std::size_t> sup;
    std::vector<std::vector<std::size_t>> all;
    while (en.next(sup)) all.push_back(sup);
    CHECK(all == std::vector<std::vector<std::size_t>>{{0}, {1}, {2}});

    GroupSupportEnumerator en3(3, 3);
    std::size_t count = 0;
    while (en3.next(sup)) ++count;
    CHECK(count == 7);

    CHECK(GroupSupportEnumerator::count(10, 3) == 175);
    CHECK(GroupSupportEnumerator::count(3, 3) == 7);
    CHECK_THROWS_AS(GroupSupportEnumerator(40, 10), CapacityError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "blockrip/parallel.hpp"
#include "blockrip/rng.hpp"
#include "blockrip/stats.hpp"

using namespace blockrip;

TEST_CASE("equal streams are bitwise equal") {
    RngStream a(42, 3), b(42, 3);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RngStream c(42, 3), d(42, 4);
    bool all_same = true;
    for (int i = 0; i < 64; ++i) all_same = all_same && (c.next_u64() == d.next_u64());
    CHECK_FALSE(all_same);
}

TEST_CASE("substreams are distinct and reproducible") {
    RngStream root(7, 0);
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 512; ++i) {
        RngStream s = root.substream(i);
        firsts.insert(s.next_u64());
    }
    CHECK(firsts.size() == 512);
    CHECK(root.substream(11).next_u64() == root.substream(11).next_u64());
}

TEST_CASE("uniform01 lies in (0,1] and has the right mean") {
    RngStream r(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 200000; ++i) {
        double u = r.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
        sum += u;
    }
    CHECK(std::fabs(sum / 200000 - 0.5) < 0.005);
}

TEST_CASE("gaussian moments") {
    RngStream r(5, 1);
    std::vector<double> xs(400000);
    for (auto& x : xs) x = r.gaussian();
    CHECK(std::fabs(mean(xs)) < 0.01);
    CHECK(std::fabs(variance(xs) - 1.0) < 0.01);
}

TEST_CASE("parallel_chunks covers every index once") {
    const std::size_t n = 100000;
    std::vector<int> hits(n, 0);
    parallel_chunks(n, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) hits[i] += 1;
    });
    for (std::size_t i = 0; i < n; ++i) REQUIRE(hits[i] == 1);
}

TEST_CASE("wilson interval sane") {
    auto ci = wilson_ci(50, 100);
    CHECK(ci.center == doctest::Approx(0.5).epsilon(0.01));
    CHECK(ci.halfwidth > 0.05);
    CHECK(ci.halfwidth < 0.15);
    auto zero = wilson_ci(0, 100);
    CHECK(zero.center > 0.0);
    CHECK(zero.center - zero.halfwidth <= 0.0 + 1e-12);
}

TEST_CASE("least squares slope recovers a line") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {2.5, 4.5, 6.5, 8.5, 10.5};
    CHECK(ls_slope(x, y) == doctest::Approx(2.0));
}

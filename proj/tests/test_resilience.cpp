#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "psrc/resilience.hpp"

using namespace psrc;

// Structural oracle for PSRC(21,3): each node span is a 1-dim GF(4)-subspace
// of GF(64), i.e. a point of the projective plane PG(2,4). A node subset is
// rank-deficient iff its points are collinear. The plane has 21 lines of 5
// points each, so there are 21*C(5,x) deficient x-subsets for x >= 3 and none
// for x >= 6.
TEST_CASE("exhaustive rho for PSRC(21,3) matches the line-count oracle") {
    auto lay = build_layout(6, 2);
    auto [bad5, rho5] = rho_exhaustive(lay, 5);
    CHECK(bad5 == 21);
    CHECK(choose(21, 5) == 20349);
    CHECK(1.0 - rho5 == doctest::Approx(21.0 / 20349).epsilon(1e-12));

    auto [bad3, rho3] = rho_exhaustive(lay, 3);
    CHECK(bad3 == 210);  // 21 * C(5,3)
    CHECK(choose(21, 3) == 1330);
    CHECK(1.0 - rho3 == doctest::Approx(210.0 / 1330).epsilon(1e-12));

    auto [badn, rhon] = rho_exhaustive(lay, 21);
    CHECK(badn == 0);
    CHECK(rhon == 1.0);
}

TEST_CASE("enumeration budget guard") {
    auto lay = build_layout(8, 2);  // n = 85
    CHECK_THROWS_WITH_AS(rho_exhaustive(lay, 40), doctest::Contains("BudgetExceeded"), error);
}

TEST_CASE("full table agrees with per-x enumeration and is monotone") {
    auto lay = build_layout(6, 2);
    auto tab = rho_table_exhaustive(lay);
    for (int x = 3; x <= 21; ++x) {
        const std::uint64_t expect = x <= 5 ? 21 * choose(5, x) : 0;
        CHECK(tab.deficient[static_cast<std::size_t>(x)] == expect);
    }
    for (int x = 0; x < lay.k(); ++x) CHECK(tab.rho[static_cast<std::size_t>(x)] == 0.0);
    CHECK(tab.rho[21] == 1.0);
    for (int x = 0; x < 21; ++x)
        CHECK(tab.rho[static_cast<std::size_t>(x)] <=
              tab.rho[static_cast<std::size_t>(x) + 1] + 1e-15);
    for (int x : {2, 4, 6, 7})
        CHECK(tab.deficient[static_cast<std::size_t>(x)] ==
              rho_exhaustive(lay, x).first);
}

TEST_CASE("worker count does not change the table") {
    auto lay = build_layout(6, 2);
    auto one = rho_table_exhaustive(lay, 1);
    auto four = rho_table_exhaustive(lay, 4);
    CHECK(one.deficient == four.deficient);
}

TEST_CASE("sampled rho") {
    auto lay = build_layout(6, 2);
    SUBCASE("x below k needs no sampling") {
        auto est = rho_sampled(lay, 2, 10, 1);
        CHECK(est.rho == 0.0);
    }
    SUBCASE("deterministic per seed") {
        auto a = rho_sampled(lay, 5, 20000, 99);
        auto b = rho_sampled(lay, 5, 20000, 99);
        CHECK(a.rho == b.rho);
        CHECK(a.ci_lo == b.ci_lo);
    }
    SUBCASE("estimate brackets the exact value at x=5") {
        const double exact = rho_exhaustive(lay, 5).second;
        auto est = rho_sampled(lay, 5, 100000, 7);
        CHECK(est.ci_lo <= exact);
        CHECK(exact <= est.ci_hi);
    }
    SUBCASE("CI covers the exact value at nominal rate") {
        const double exact = rho_exhaustive(lay, 3).second;
        int covered = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto est = rho_sampled(lay, 3, 2000, seed);
            if (est.ci_lo <= exact && exact <= est.ci_hi) ++covered;
        }
        CHECK(covered >= 93);
    }
}

TEST_CASE("availability curve") {
    auto lay = build_layout(6, 2);
    auto tab = rho_table_exhaustive(lay);
    auto mds = mds_rho(21, 3);

    CHECK(availability_at(tab, 0.0) == 0.0);
    CHECK(availability_at(tab, 1.0) == doctest::Approx(1.0));

    // MDS reference equals the binomial survival function at k
    double p = 0.4;
    double survival = 0.0;
    for (int x = 3; x <= 21; ++x)
        survival += std::exp(log_choose(21, x) + x * std::log(p) + (21 - x) * std::log1p(-p));
    CHECK(availability_at(mds, p) == doctest::Approx(survival).epsilon(1e-12));

    // PSRC dominated by MDS, both monotone in p
    double prev_psrc = 0.0, prev_mds = 0.0;
    for (double q : default_p_grid(0.01)) {
        double up = availability_at(tab, q);
        double upm = availability_at(mds, q);
        CHECK(up <= upm + 1e-12);
        CHECK(up >= prev_psrc - 1e-12);
        CHECK(upm >= prev_mds - 1e-12);
        prev_psrc = up;
        prev_mds = upm;
    }
}

TEST_CASE("MSR download formula") {
    CHECK(*msr_download(6, 3, 3) == doctest::Approx(6.0));
    CHECK(*msr_download(6, 3, 4) == doctest::Approx(4.0));
    CHECK(!msr_download(6, 3, 2).has_value());
}

TEST_CASE("bandwidth comparison for PSRC(21,3)") {
    auto lay = build_layout(6, 2);
    auto rows = compare_bandwidth(lay, 2, 4);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].d == 2);
    CHECK(!rows[0].msr_units.has_value());
    CHECK(rows[0].psrc_units == 4);
    CHECK(rows[1].d == 3);
    CHECK(*rows[1].msr_units == doctest::Approx(6.0));
    CHECK(rows[1].psrc_units == 3);
    CHECK(rows[2].d == 4);
    CHECK(*rows[2].msr_units == doctest::Approx(4.0));
    CHECK(rows[2].psrc_units <= 3);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcdyn/piecewise_map.hpp"

using namespace mcdyn;

TEST_CASE("catalog eval matches the closed forms") {
    const PiecewiseMap dm = catalog_map("del_magno");
    CHECK(eval(dm, 0.0) == 0.0);
    CHECK(eval(dm, 1.0) == 1.0);
    CHECK(eval(dm, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval(dm, 0.25) == doctest::Approx((1 + std::cos(M_PI * 0.25)) / 2).epsilon(1e-14));

    const PiecewiseMap inoue = catalog_map("inoue");
    CHECK(eval(inoue, 0.5) == doctest::Approx(0.0));  // right branch owns 1/2
    CHECK(eval(inoue, 0.25) == doctest::Approx(0.25 + 4 * 0.25 * 0.25 * 0.25));
    CHECK(eval(inoue, 0.0) == 0.0);
    CHECK(eval(inoue, 1.0) == 1.0);

    const PiecewiseMap sj = catalog_map("shrink_jump");
    CHECK(eval(sj, 0.0) == 1.0);  // the isolated jump at the origin
    CHECK(eval(sj, 0.5) == 0.25);
    CHECK(eval(sj, 1.0) == 0.5);
}

TEST_CASE("eval stays in [0,1] for random points on every catalog map") {
    Rng rng(42);
    for (const char* name : {"del_magno", "inoue", "cubic_pitchfork", "doubling", "shrink_jump"}) {
        const PiecewiseMap m = catalog_map(name);
        for (int k = 0; k < 100000; ++k) {
            const double y = eval(m, rng.next_double());
            CHECK(y >= 0.0);
            CHECK(y <= 1.0);
        }
    }
}

TEST_CASE("invalid affine table is rejected") {
    CHECK_THROWS_AS(affine_map({0.0, 1.0}, {{3.0, 0.0}}), InvalidMapError);
    CHECK_THROWS_AS(affine_map({0.0, 0.5, 0.4, 1.0}, {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}),
                    InvalidMapError);
}

TEST_CASE("orbit basics") {
    SUBCASE("fixed point of the cubic") {
        const auto o = orbit(catalog_map("cubic_pitchfork"), 1.0, 5);
        for (double x : o) CHECK(x == 1.0);
    }
    SUBCASE("period two of the doubling map at 1/3") {
        const auto o = orbit(catalog_map("doubling"), 1.0 / 3.0, 3);
        CHECK(o[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(o[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(o[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(o[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("interior orbits escape toward the endpoint pair") {
        const auto o = orbit(catalog_map("del_magno"), 0.25, 40);
        double best_lo = 1.0, best_hi = 0.0;
        for (double x : o) {
            best_lo = std::min(best_lo, x);
            best_hi = std::max(best_hi, x);
        }
        CHECK(best_lo < 1e-6);
        CHECK(best_hi > 1.0 - 1e-6);
        // the override points stay fixed, the orbit never sticks to them
        for (double x : o) {
            CHECK(x > 0.0);
            CHECK(x < 1.0);
        }
    }
    SUBCASE("determinism is bitwise") {
        const auto a = orbit(catalog_map("inoue"), 0.3721, 5000);
        const auto b = orbit(catalog_map("inoue"), 0.3721, 5000);
        CHECK(a == b);
    }
}

TEST_CASE("branch preimages") {
    SUBCASE("doubling") {
        const auto pre = branch_preimages(catalog_map("doubling"), {0.0, 0.5});
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].lo == doctest::Approx(0.0));
        CHECK(pre[0].hi == doctest::Approx(0.25));
        CHECK(pre[1].lo == doctest::Approx(0.5));
        CHECK(pre[1].hi == doctest::Approx(0.75));
    }
    SUBCASE("identity") {
        const auto pre = branch_preimages(identity_map(), {0.2, 0.7});
        REQUIRE(pre.size() == 1);
        CHECK(pre[0].lo == doctest::Approx(0.2));
        CHECK(pre[0].hi == doctest::Approx(0.7));
    }
    SUBCASE("displayed three-state model map") {
        // branches 2x, 2x-1/3, 2x-4/3, 2x-1 on {0,1/3,2/3,5/6,1}
        const PiecewiseMap m = affine_map({0.0, 1.0 / 3, 2.0 / 3, 5.0 / 6, 1.0},
                                          {{2.0, 0.0}, {2.0, -1.0 / 3}, {2.0, -4.0 / 3}, {2.0, -1.0}});
        const auto pre = branch_preimages(m, {0.0, 1.0 / 3});
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].lo == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(pre[0].hi == doctest::Approx(1.0 / 6).epsilon(1e-12));
        CHECK(pre[1].lo == doctest::Approx(2.0 / 3).epsilon(1e-12));
        CHECK(pre[1].hi == doctest::Approx(5.0 / 6).epsilon(1e-12));
    }
    SUBCASE("preimages of a full partition tile the interval") {
        for (const char* name : {"doubling", "inoue", "del_magno", "cubic_pitchfork"}) {
            const PiecewiseMap m = catalog_map(name);
            const int w = 64;
            double total = 0.0;
            std::vector<std::pair<double, double>> all;
            for (int j = 0; j < w; ++j) {
                const auto pre = branch_preimages(m, {j / double(w), (j + 1) / double(w)});
                for (const auto& iv : pre) {
                    total += iv.length();
                    all.emplace_back(iv.lo, iv.hi);
                }
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            // pairwise disjoint
            std::sort(all.begin(), all.end());
            for (std::size_t i = 0; i + 1 < all.size(); ++i)
                CHECK(all[i].second <= all[i + 1].first + 1e-12);
        }
    }
    SUBCASE("constant branch is unsupported") {
        PiecewiseMap flat;
        flat.breakpoints = {0.0, 1.0};
        flat.branches = {{.kind = BranchKind::affine, .slope = 0.0, .intercept = 0.5}};
        finalize_map(flat);
        CHECK_THROWS_AS(branch_preimages(flat, {0.0, 0.5}), UnsupportedMapError);
    }
}

TEST_CASE("fixed point classification") {
    SUBCASE("cubic: stable origin, neutral right end") {
        const auto rep = classify_fixed_points(catalog_map("cubic_pitchfork"));
        REQUIRE(rep.points.size() == 2);
        CHECK(rep.points[0].x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(rep.points[0].stability == Stability::stable);
        CHECK(rep.points[1].x == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.points[1].stability == Stability::neutral);
    }
    SUBCASE("inoue: both ends neutral, nothing else") {
        const auto rep = classify_fixed_points(catalog_map("inoue"));
        REQUIRE(rep.points.size() == 2);
        CHECK(rep.points[0].x == doctest::Approx(0.0));
        CHECK(rep.points[0].stability == Stability::neutral);
        CHECK(rep.points[1].x == doctest::Approx(1.0));
        CHECK(rep.points[1].stability == Stability::neutral);
    }
    SUBCASE("identity flags a degenerate continuum") {
        const auto rep = classify_fixed_points(identity_map());
        CHECK(rep.degenerate_continuum);
    }
    SUBCASE("shrink_jump has no fixed point at all") {
        const auto rep = classify_fixed_points(catalog_map("shrink_jump"));
        CHECK(rep.points.empty());
    }
}

TEST_CASE("transitivity scan") {
    SUBCASE("doubling covers the interval") {
        const auto rep = transitivity_scan(catalog_map("doubling"), {0.1234567891}, 1000000, 1e-3);
        CHECK(rep.samples[0].coverage_of_interval >= 0.99);
        CHECK(rep.max_coverage >= 0.99);
    }
    SUBCASE("identity covers one cell") {
        const auto rep = transitivity_scan(identity_map(), {0.375}, 10000, 1e-2);
        CHECK(rep.samples[0].cells_visited == 1);
        CHECK(rep.attractor_cells == 1);
        CHECK(rep.max_coverage == doctest::Approx(1.0));
    }
    SUBCASE("del_magno visits both endpoint neighborhoods") {
        const auto rep = transitivity_scan(catalog_map("del_magno"), {0.3}, 100000, 1e-2);
        // attractor cells are the two endpoint neighborhoods and both get visited
        CHECK(rep.attractor_cells <= 4);
        CHECK(rep.max_coverage == doctest::Approx(1.0));
        bool near0 = false, near1 = false;
        for (double x : rep.covering_orbit) {
            near0 |= x < 1e-2;
            near1 |= x > 1.0 - 1e-2;
        }
        CHECK(near0);
        CHECK(near1);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcdyn/phase_scan.hpp"

using namespace mcdyn;

namespace {

LatticeSystem cubic_lattice(int d, double eps, Boundary boundary) {
    return LatticeSystem::homogeneous(d, catalog_map("cubic_pitchfork"),
                                      CouplingSpec::diffusive(eps, boundary));
}

CensusParams quick_params() {
    CensusParams p;
    p.n_transient = 20000;
    p.n_tail = 160;
    p.n_samples = 24;
    return p;
}

}  // namespace

TEST_CASE("census on the cubic lattice") {
    SUBCASE("zero boundary: the all-zeros state is the only attractor") {
        const auto census = attractor_census(cubic_lattice(3, 0.05, FixedBoundary{0.0}),
                                             quick_params());
        REQUIRE(census.count() == 1);
        CHECK(census.attractors[0].representative.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(census.attractors[0].basin_fraction == doctest::Approx(1.0));
        CHECK(census.unresolved_fraction == 0.0);
    }
    SUBCASE("single uncoupled site: one attractor at the stable origin") {
        const auto census = attractor_census(cubic_lattice(1, 0.0, PeriodicBoundary{}),
                                             quick_params());
        REQUIRE(census.count() >= 1);
        // the origin's cluster dominates: the neutral end attracts only itself
        const Attractor* top = &census.attractors[0];
        for (const auto& a : census.attractors)
            if (a.basin_fraction > top->basin_fraction) top = &a;
        CHECK(top->representative[0] < 1e-6);
        // an orbit just inside 1 escapes toward 0 (leaving a 1e-6 neighborhood
        // of a neutral point takes ~6e6 steps)
        const PiecewiseMap cubic = catalog_map("cubic_pitchfork");
        double x = 1.0 - 1e-6;
        for (int t = 0; t < 20000000 && x > 0.5; ++t) x = eval(cubic, x);
        CHECK(x < 0.5);
    }
    SUBCASE("determinism: identical seeds give identical censuses") {
        const auto a = attractor_census(cubic_lattice(3, 0.05, FixedBoundary{1.0}), quick_params());
        const auto b = attractor_census(cubic_lattice(3, 0.05, FixedBoundary{1.0}), quick_params());
        REQUIRE(a.count() == b.count());
        for (int i = 0; i < a.count(); ++i) {
            CHECK(a.attractors[i].representative == b.attractors[i].representative);
            CHECK(a.attractors[i].basin_fraction == b.attractors[i].basin_fraction);
        }
        CensusParams parallel = quick_params();
        parallel.jobs = 2;
        const auto c = attractor_census(cubic_lattice(3, 0.05, FixedBoundary{1.0}), parallel);
        REQUIRE(c.count() == a.count());
        for (int i = 0; i < a.count(); ++i)
            CHECK(c.attractors[i].representative == a.attractors[i].representative);
    }
    SUBCASE("doubling the merge radius never increases the count") {
        CensusParams p = quick_params();
        const LatticeSystem sys = cubic_lattice(3, 0.05, FixedBoundary{1.0});
        const int base_count = attractor_census(sys, p).count();
        p.merge_radius *= 2;
        CHECK(attractor_census(sys, p).count() <= base_count);
    }
}

TEST_CASE("alternating tails are classified as periodic") {
    // uncoupled cosine-arch sites settle into the endpoint two-cycle
    const LatticeSystem sys = LatticeSystem::homogeneous(
        2, catalog_map("del_magno"), CouplingSpec::diffusive(0.0, PeriodicBoundary{}));
    CensusParams p = quick_params();
    p.n_transient = 200;
    p.corner_seeds = false;  // corners sit on the override fixed points
    const auto census = attractor_census(sys, p);
    REQUIRE(census.count() >= 1);
    bool saw_periodic = false;
    for (const auto& a : census.attractors)
        saw_periodic |= a.classification == AttractorClass::periodic && a.period == 2;
    CHECK(saw_periodic);
}

TEST_CASE("per-site local maps are honored") {
    LatticeSystem sys;
    sys.d = 2;
    sys.local_maps = {catalog_map("doubling"), identity_map()};
    sys.coupling = CouplingSpec::diffusive(0.0, PeriodicBoundary{});
    Eigen::Vector2d x(0.3, 0.3);
    const LatticeState out = lattice_step(sys, x);
    CHECK(out[0] == doctest::Approx(0.6));
    CHECK(out[1] == doctest::Approx(0.3));
}

TEST_CASE("phase sweep over the boundary value") {
    ParamFamily family;
    family.base = cubic_lattice(3, 0.05, FixedBoundary{0.0});
    family.param = ParamFamily::Param::boundary_y;
    const PhaseSweep sweep = phase_sweep(family, {0.0, 1.0}, quick_params());
    REQUIRE(sweep.points.size() == 2);
    CHECK(sweep.points[0].attractor_count == 1);
    CHECK(sweep.points[1].attractor_count > 1);
    CHECK(sweep.transitions.size() == 1);
}

TEST_CASE("strong coupling collapses the boundary-supported attractors") {
    // at y=1 the count drops toward one as the coupling starts to dominate
    ParamFamily family;
    family.base = cubic_lattice(3, 0.05, FixedBoundary{1.0});
    family.param = ParamFamily::Param::epsilon;
    const PhaseSweep sweep = phase_sweep(family, {0.05, 0.45}, quick_params());
    REQUIRE(sweep.points.size() == 2);
    CHECK(sweep.points[0].attractor_count > sweep.points[1].attractor_count);
    CHECK(sweep.points[1].attractor_count == 1);
}

TEST_CASE("constant family has no transitions") {
    ParamFamily family;
    family.base = LatticeSystem::homogeneous(2, catalog_map("doubling"),
                                             CouplingSpec::diffusive(0.1, PeriodicBoundary{}));
    family.param = ParamFamily::Param::epsilon;
    CensusParams p = quick_params();
    p.n_transient = 500;
    p.n_tail = 160;
    const PhaseSweep sweep = phase_sweep(family, {0.05, 0.1, 0.15}, p);
    // chaotic tails resolve as unresolved everywhere; counts stay equal
    for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i)
        CHECK(sweep.points[i].attractor_count == sweep.points[i + 1].attractor_count);
    CHECK(sweep.transitions.empty());
    // wandering tails are reported as unresolved, never merged into attractors
    for (const auto& pt : sweep.points) CHECK_FALSE(pt.quality_ok);
    for (const auto& census : sweep.censuses) CHECK(census.unresolved_fraction > 0.5);
}

TEST_CASE("stability diagnostics") {
    SUBCASE("interaction-only expansion stays below one for convex couplings") {
        for (double eps : {0.05, 0.3, 0.8}) {
            const LatticeSystem sys = LatticeSystem::homogeneous(
                6, catalog_map("doubling"), CouplingSpec::diffusive(eps, PeriodicBoundary{}));
            const auto diag = stability_diagnostics(sys, {2, 4, 6}, 8, 11);
            CHECK(diag.c_hat_interaction <= 1.0 + 1e-9);
        }
    }
    SUBCASE("uncoupled halving lattice contracts geometrically") {
        const PiecewiseMap half = affine_map({0.0, 1.0}, {{0.5, 0.0}});
        const LatticeSystem sys = LatticeSystem::homogeneous(
            4, half, CouplingSpec::diffusive(0.0, PeriodicBoundary{}));
        const auto diag = stability_diagnostics(sys, {2, 4}, 6, 5, 512, 16);
        CHECK(diag.c_hat_full <= 1.0 + 1e-9);
        CHECK_FALSE(diag.phi_nondecaying);
        REQUIRE(diag.phi_by_n.size() >= 3);
        // phi(n) ~ 2^-n: consecutive dyadic checkpoints square the remaining mass
        const double phi1 = diag.phi_by_n[0].second;
        const double phi4 = diag.phi_by_n[2].second;
        CHECK(phi4 < 0.3 * phi1);
    }
    SUBCASE("uncoupled identical sites have zero window inconsistency") {
        const LatticeSystem sys = LatticeSystem::homogeneous(
            6, catalog_map("inoue"), CouplingSpec::diffusive(0.0, PeriodicBoundary{}));
        const auto diag = stability_diagnostics(sys, {2, 4, 6}, 6, 13);
        for (const auto& [l, psi] : diag.psi_by_window) CHECK(psi == 0.0);
    }
    SUBCASE("multi-attractor regime reports non-decaying phi") {
        const auto diag =
            stability_diagnostics(cubic_lattice(3, 0.05, FixedBoundary{1.0}), {2, 3}, 6, 21, 256, 64);
        CHECK(diag.phi_nondecaying);
        CHECK(diag.phi_by_n.back().second > 0.05);
    }
}

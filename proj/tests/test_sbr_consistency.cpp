// Pathwise occupation limits versus the Cesaro natural measure: whenever the
// orbit statistics of many random starts agree on a common limit, the density
// route from Lebesgue must land on the same measure.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcdyn/markov_model.hpp"
#include "mcdyn/measure.hpp"

using namespace mcdyn;

namespace {

struct PathwiseSummary {
    int converged = 0;
    int total = 0;
    Measure limit = EmpiricalMeasure::single_atom(0.0);
};

PathwiseSummary pathwise_limit(const PiecewiseMap& map, int n_starts, long n) {
    PathwiseSummary out;
    out.total = n_starts;
    std::vector<EmpiricalMeasure> limits;
    Rng seeds(0xA11CE5ull);
    for (int s = 0; s < n_starts; ++s) {
        const double x0 = seeds.next_double();
        const auto est = birkhoff(map, x0, n, static_cast<std::uint64_t>(s));
        // trace entry is dist(full occupation, first-half occupation)
        if (!est.convergence_trace.empty() && est.convergence_trace.back().second < 0.02) {
            ++out.converged;
            limits.push_back(*est.empirical());
        }
    }
    // common limit: all converged runs within 0.02 of the first
    if (!limits.empty()) {
        for (const auto& m : limits)
            if (w1_distance(m, limits.front()) > 0.02) return out;
        out.limit = limits.front();
    }
    return out;
}

void check_sbr_consistency(const PiecewiseMap& map) {
    const PathwiseSummary path = pathwise_limit(map, 100, 200000);
    REQUIRE(path.converged >= 95);
    const auto natural = cesaro_natural(map, CellDensity::lebesgue(2000), 2000, 2000);
    CHECK(w1_distance(Measure(*natural.density()), path.limit) < 0.02);
}

}  // namespace

TEST_CASE("pathwise and natural measures agree where both exist") {
    SUBCASE("endpoint-pair attractor") { check_sbr_consistency(catalog_map("del_magno")); }
    SUBCASE("doubling") { check_sbr_consistency(catalog_map("doubling")); }
    SUBCASE("three-state model map") {
        const StochasticMatrix p = StochasticMatrix::from_triplets(3, {{0, 0, 0.5},
                                                                       {0, 1, 0.5},
                                                                       {1, 1, 0.5},
                                                                       {1, 2, 0.5},
                                                                       {2, 0, 0.5},
                                                                       {2, 2, 0.5}});
        check_sbr_consistency(build_markov_map(p).map);
    }
}

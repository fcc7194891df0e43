#ifndef MCDYN_PIECEWISE_MAP_HPP
#define MCDYN_PIECEWISE_MAP_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcdyn/common.hpp"

namespace mcdyn {

/// Closed-form branch formulas available for catalog maps.
enum class BranchKind {
    affine,           // slope*x + intercept
    cosine_arch,      // (1 + cos(pi x)) / 2, decreasing
    cubic_escape,     // x + 4 x^3, increasing
    cubic_return,     // x - 4 (1-x)^3, increasing
    cubic_sink,       // x - x (x-1)^2 / 6, increasing
};

struct Branch {
    BranchKind kind = BranchKind::affine;
    double slope = 1.0;      // affine only
    double intercept = 0.0;  // affine only

    // attainable range over the branch's (possibly half-open) interval,
    // filled in by finalize_map()
    double range_lo = 0.0;
    double range_hi = 1.0;
    bool lo_attained = true;
    bool hi_attained = true;
    bool increasing = true;

    double value(double x) const;
    double derivative(double x) const;  // closed form for affine/polynomial, central difference otherwise
};

/// One-dimensional map on [0,1]: ordered breakpoints, one branch per interval,
/// plus isolated point redefinitions. Branches own their left endpoint; the
/// final branch owns both ends. Overrides take precedence over branch formulas.
struct PiecewiseMap {
    std::vector<double> breakpoints;  // strictly increasing, first 0, last 1
    std::vector<Branch> branches;     // breakpoints.size() - 1
    std::vector<std::pair<double, double>> point_overrides;
    std::string name = "custom";

    int branch_index(double x) const;
    bool all_branches_monotone() const;
};

/// Validates invariants and caches per-branch attainable ranges.
/// Throws InvalidMapError if a branch leaves [0,1] by more than 1e-12.
void finalize_map(PiecewiseMap& map);

/// Catalog: del_magno, inoue, cubic_pitchfork, doubling, shrink_jump.
PiecewiseMap catalog_map(std::string_view name);
PiecewiseMap identity_map();
PiecewiseMap affine_map(std::vector<double> breakpoints, std::vector<std::pair<double, double>> slope_intercept);

/// Branch formula applied to x, overrides first. The result is clamped into
/// the branch's attainable range so that rounding never lands an interior
/// orbit on a boundary value the branch cannot reach (open range ends are
/// mapped to the nearest interior double).
double eval(const PiecewiseMap& map, double x);

/// eval followed by a seeded uniform perturbation of amplitude `noise`,
/// reflected into [0,1]. Statistics drivers use this: binary-exact branches
/// (e.g. slope 2) otherwise exhaust the mantissa within ~50 steps and collapse
/// onto short dyadic orbits. The amplitude sits far below any statistical
/// resolution of interest but refills the bit supply with fresh entropy.
double eval_perturbed(const PiecewiseMap& map, double x, Rng& rng, double noise = 1e-13);

/// orbit[0]=x0, orbit[k+1]=eval(map, orbit[k]); exact iteration, no dither.
std::vector<double> orbit(const PiecewiseMap& map, double x0, long n);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// Full preimage of J as a disjoint union of intervals, one candidate per
/// strictly monotone branch. Throws UnsupportedMapError for non-invertible
/// branches.
std::vector<Interval> branch_preimages(const PiecewiseMap& map, Interval j);

enum class Stability { stable, neutral, unstable };

struct FixedPoint {
    double x = 0.0;
    Stability stability = Stability::neutral;
    double derivative = 0.0;
};

struct FixedPointReport {
    std::vector<FixedPoint> points;
    bool degenerate_continuum = false;  // e.g. identity: every grid point fixed
};

/// Sign-change scan of T(x)-x per branch with bisection refinement to 1e-10,
/// plus explicit endpoint/override checks. Neutral band: |T'-1| < 1e-6.
FixedPointReport classify_fixed_points(const PiecewiseMap& map, int grid_resolution = 4096);

struct CoverageSample {
    double x0 = 0.0;
    long cells_visited = 0;
    double coverage_of_attractor = 0.0;  // visited / detected attractor cells
    double coverage_of_interval = 0.0;   // visited / all cells
};

struct CoverageReport {
    long n_cells = 0;
    long attractor_cells = 0;  // union of tail-visited cells over all samples
    std::vector<CoverageSample> samples;
    double max_coverage = 0.0;
    double best_x0 = 0.0;
    std::vector<double> covering_orbit;  // subsampled orbit of the best start
};

/// For each start, the fraction of eps_net-cells of the detected attractor
/// visited by the length-n orbit. The attractor is the union of cells visited
/// in the second half of any sampled orbit.
CoverageReport transitivity_scan(const PiecewiseMap& map, const std::vector<double>& x0_samples,
                                 long n, double eps_net, std::uint64_t seed = 0);

}  // namespace mcdyn

#endif

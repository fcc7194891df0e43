#ifndef MCDYN_PHASE_SCAN_HPP
#define MCDYN_PHASE_SCAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcdyn/lattice.hpp"

namespace mcdyn {

struct CensusParams {
    long n_transient = 20000;
    long n_tail = 256;
    int n_samples = 64;
    double merge_radius = 1e-4;
    std::uint64_t seed = 0;
    int period_max = 64;
    bool corner_seeds = true;  // all 2^d corner-perturbed starts when d <= 12
    int jobs = 1;
};

enum class AttractorClass { fixed_point, periodic, other };

struct Attractor {
    Eigen::VectorXd representative;  // tail mean state of the first member
    double basin_fraction = 0.0;
    AttractorClass classification = AttractorClass::fixed_point;
    int period = 1;
    std::vector<EmpiricalMeasure> site_occupation;  // tail marginals
};

struct AttractorCensus {
    std::vector<Attractor> attractors;
    double unresolved_fraction = 0.0;
    long total_seeds = 0;
    CensusParams params;

    int count() const { return static_cast<int>(attractors.size()); }
};

/// Iterate seeded starts past the transient, summarize tails, and single-link
/// merge summaries within merge_radius (max-coordinate metric). Tails that
/// neither settle nor lock into a period <= period_max are reported as
/// unresolved, never merged.
AttractorCensus attractor_census(const LatticeSystem& system, const CensusParams& params);

/// One-parameter family for sweeps.
struct ParamFamily {
    enum class Param { epsilon, boundary_y };
    LatticeSystem base;
    Param param = Param::boundary_y;

    LatticeSystem at(double gamma) const;
};

struct SweepPoint {
    double gamma = 0.0;
    int attractor_count = 0;
    bool quality_ok = true;  // false when the census carries unresolved runs
};

struct Transition {
    double gamma_left = 0.0;
    double gamma_right = 0.0;
    int count_left = 0;
    int count_right = 0;
};

struct PhaseSweep {
    std::vector<SweepPoint> points;
    std::vector<Transition> transitions;
    std::vector<AttractorCensus> censuses;
};

PhaseSweep phase_sweep(const ParamFamily& family, const std::vector<double>& gammas,
                       const CensusParams& params);

struct StabilityDiagnostics {
    double c_hat_full = 0.0;         // expansion of the full step
    double c_hat_interaction = 0.0;  // expansion of the interaction alone
    std::vector<std::pair<int, double>> psi_by_window;  // (|L|, psi_hat)
    std::vector<std::pair<long, double>> phi_by_n;      // (n, phi_hat)
    bool phi_nondecaying = false;
    bool small_sample_warning = false;
};

/// Estimates the contraction/consistency quantities over seeded pairs of
/// piecewise-uniform product measures represented by common-quantile particle
/// clouds; dist is the product metric (max per-site W1).
StabilityDiagnostics stability_diagnostics(const LatticeSystem& system,
                                           const std::vector<int>& window_sizes,
                                           int n_measure_pairs, std::uint64_t seed,
                                           int cloud_size = 512, long phi_max_n = 64);

}  // namespace mcdyn

#endif

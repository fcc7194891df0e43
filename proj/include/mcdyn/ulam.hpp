#ifndef MCDYN_ULAM_HPP
#define MCDYN_ULAM_HPP

#include <cstdint>
#include <vector>

#include "mcdyn/markov_model.hpp"
#include "mcdyn/measure.hpp"

namespace mcdyn {

enum class UlamMethod { exact_preimage, monte_carlo };

/// Finite-chain approximation of a map on a uniform W-cell partition,
/// p_ij = m(T^-1 cell_j n cell_i) / m(cell_i).
struct UlamApproximation {
    Eigen::VectorXd breaks;
    StochasticMatrix matrix;
    UlamMethod method = UlamMethod::exact_preimage;
    long mc_samples = 0;
    std::uint64_t seed = 0;
    bool fell_back_to_mc = false;       // exact requested but branches not monotone
    Eigen::VectorXd raw_row_sums;       // before renormalization (MC only)
};

UlamApproximation ulam_matrix(const PiecewiseMap& map, int w,
                              UlamMethod method = UlamMethod::exact_preimage,
                              long samples = 1000000, std::uint64_t seed = 0);

struct StationaryReport {
    bool unique = true;
    double restart_dispersion = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration from the uniform vector until |vP - v|_1 < tol. Twenty
/// seeded simplex restarts probe uniqueness; dispersion above 10*tol raises
/// the non-uniqueness flag. Throws ConvergenceError past max_iter.
Eigen::VectorXd stationary(const StochasticMatrix& chain, double tol = 1e-12,
                           int max_iter = 200000, StationaryReport* report = nullptr,
                           std::uint64_t seed = 0);

struct InvariantDensityResult {
    CellDensity density;
    StationaryReport report;
    UlamApproximation approximation;
};

/// stationary(ulam_matrix(map, w)) reinterpreted as a cell density. When the
/// stationary vector is flagged non-unique the uniform density is returned
/// unchanged.
InvariantDensityResult ulam_invariant_density(const PiecewiseMap& map, int w,
                                              UlamMethod method = UlamMethod::exact_preimage,
                                              double tol = 1e-12);

struct RefinementPoint {
    int w = 0;
    double w1_to_reference = 0.0;
};

/// W1 distance of the Ulam invariant density to a reference, per resolution.
std::vector<RefinementPoint> ulam_refinement_study(const PiecewiseMap& map,
                                                   const std::vector<int>& resolutions,
                                                   const CellDensity& reference);

}  // namespace mcdyn

#endif

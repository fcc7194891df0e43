#ifndef MCDYN_LATTICE_HPP
#define MCDYN_LATTICE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "mcdyn/measure.hpp"
#include "mcdyn/piecewise_map.hpp"

namespace mcdyn {

struct FixedBoundary {
    double y = 0.0;
};
struct PeriodicBoundary {};
using Boundary = std::variant<FixedBoundary, PeriodicBoundary>;

/// Convex finite-range coupling: (1-eps) x_i + eps sum_j a_j x_{i+j}.
/// Out-of-range neighbors come from the boundary condition; fixed-boundary
/// coordinates stay at y for all time.
struct CouplingSpec {
    double epsilon = 0.0;
    Eigen::VectorXd weights;  // a_{-K}..a_{K}, nonnegative, sums to 1
    Boundary boundary = PeriodicBoundary{};

    int radius() const { return static_cast<int>(weights.size()) / 2; }
    void validate() const;

    static CouplingSpec diffusive(double epsilon, Boundary boundary);
};

enum class CompositionOrder {
    interaction_after_map,  // x' = I(T x)
    map_after_interaction,  // x'_i = (1-eps) T(x_i) + eps sum a_j x_{i+j}
};

/// Finite multicomponent system: per-site local maps (one shared map in
/// homogeneous mode), a coupling, and the composition order.
struct LatticeSystem {
    int d = 1;
    std::vector<PiecewiseMap> local_maps;  // size 1 (homogeneous) or d
    CouplingSpec coupling;
    CompositionOrder order = CompositionOrder::interaction_after_map;

    const PiecewiseMap& map_at(int i) const {
        return local_maps.size() == 1 ? local_maps[0] : local_maps[static_cast<std::size_t>(i)];
    }
    static LatticeSystem homogeneous(int d, PiecewiseMap map, CouplingSpec coupling,
                                     CompositionOrder order = CompositionOrder::interaction_after_map);
};

using LatticeState = Eigen::VectorXd;

LatticeState apply_coupling(const CouplingSpec& spec, const LatticeState& x);

/// One synchronous step; optional rng enables the +-1 ulp orbit dither on the
/// local maps (off for attractor work, on for long-run statistics).
LatticeState lattice_step(const LatticeSystem& system, const LatticeState& x, Rng* dither = nullptr);

/// Delayed-copy system of dimension 2d equivalent to a map_after_interaction
/// system: local pairs (x_i, y_i) -> (T x_i, x_i), then the interaction draws
/// neighbor values from the y layer. State layout: [x_0..x_{d-1}, y_0..y_{d-1}].
struct DoubledSystem {
    LatticeSystem base;  // the original map_after_interaction system
};

DoubledSystem doubling_transform(const LatticeSystem& system);
Eigen::VectorXd doubled_step(const DoubledSystem& system, const Eigen::VectorXd& xy);
Eigen::VectorXd doubled_initial(const LatticeState& x0);

/// Per-site occupation measures of a trajectory sample over the given sites.
std::vector<EmpiricalMeasure> project_marginals(const std::vector<LatticeState>& sample,
                                                const std::vector<int>& sites);

/// Product metric: max over matched site pairs of the per-site W1 distance.
double product_metric(const std::vector<EmpiricalMeasure>& a,
                      const std::vector<EmpiricalMeasure>& b);

}  // namespace mcdyn

#endif

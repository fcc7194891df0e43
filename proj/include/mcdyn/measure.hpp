#ifndef MCDYN_MEASURE_HPP
#define MCDYN_MEASURE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "mcdyn/piecewise_map.hpp"

namespace mcdyn {

/// Piecewise-uniform probability measure: per-cell mass over a breakpoint
/// partition of [0,1]. Density on a cell is mass/length.
struct CellDensity {
    Eigen::VectorXd breaks;  // W+1 increasing, 0..1
    Eigen::VectorXd mass;    // W, nonnegative, sums to 1

    int cells() const { return static_cast<int>(mass.size()); }
    double total() const { return mass.sum(); }
    /// Mass of an arbitrary subinterval (uniform within cells).
    double mass_of(double lo, double hi) const;

    static CellDensity lebesgue(int w);
    static CellDensity uniform_on(double lo, double hi, int w);
    static CellDensity from_breaks(Eigen::VectorXd breaks, Eigen::VectorXd mass);
};

/// Weighted atoms on [0,1].
struct EmpiricalMeasure {
    Eigen::VectorXd location;  // sorted ascending
    Eigen::VectorXd weight;    // positive, sums to 1

    static EmpiricalMeasure from_points(std::vector<double> pts);
    static EmpiricalMeasure single_atom(double x);
};

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

/// Result of a measure-estimation run: the estimate itself, detected point
/// masses, and a convergence trace of distances between Cesaro halves.
struct MeasureEstimate {
    std::variant<CellDensity, EmpiricalMeasure> representation;
    std::vector<Atom> atom_summary;
    std::vector<std::pair<long, double>> convergence_trace;  // (n, dist(avg_n, avg_{n/2}))

    const CellDensity* density() const { return std::get_if<CellDensity>(&representation); }
    const EmpiricalMeasure* empirical() const { return std::get_if<EmpiricalMeasure>(&representation); }
};

using Measure = std::variant<CellDensity, EmpiricalMeasure>;

/// Cell-mass histogram of an empirical measure on a uniform partition.
CellDensity histogram(const EmpiricalMeasure& m, int w);

/// Kantorovich-Wasserstein-1 distance, computed exactly as the L1 distance
/// between cumulative distribution functions.
double w1_distance(const Measure& a, const Measure& b);
double w1_distance(const CellDensity& a, const CellDensity& b);
double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

namespace detail {
/// Row-stochastic transfer matrix on a partition: p_ij = m(T^-1 cell_j n cell_i)/m(cell_i).
/// Exact via branch preimages for monotone maps.
Eigen::SparseMatrix<double, Eigen::RowMajor> grid_transfer(const PiecewiseMap& map,
                                                           const Eigen::VectorXd& breaks);
/// Stratified Monte Carlo variant for maps without monotone branches.
Eigen::SparseMatrix<double, Eigen::RowMajor> grid_transfer_mc(const PiecewiseMap& map,
                                                              const Eigen::VectorXd& breaks,
                                                              long samples, std::uint64_t seed);
}  // namespace detail

/// Pushforward of mu onto the partition out_breaks: out_j = mu(T^-1 cell_j).
/// Exact for monotone branches; lossless when the map is Markov on out_breaks.
CellDensity pushforward(const PiecewiseMap& map, const CellDensity& mu,
                        const Eigen::VectorXd& out_breaks);
/// Pushforward onto a uniform W-cell partition.
CellDensity pushforward(const PiecewiseMap& map, const CellDensity& mu, int w);

/// Seeded Monte Carlo pushforward (fallback for non-monotone branches).
CellDensity push_mc(const PiecewiseMap& map, const CellDensity& mu, int w,
                    long samples = 1000000, std::uint64_t seed = 0);

/// Cesaro average (1/n) sum_k T*^k mu0 on a W-cell uniform grid, with atom
/// extraction (single-cell mass above 10x both neighbors and >= 0.01).
MeasureEstimate cesaro_natural(const PiecewiseMap& map, const CellDensity& mu0, long n_steps,
                               int refinement = 2000);

/// Orbit occupation measure (1/n) sum_k delta at T^k x0, dithered iteration.
MeasureEstimate birkhoff(const PiecewiseMap& map, double x0, long n, std::uint64_t seed = 0);

struct OccupationTrace {
    std::vector<std::pair<long, double>> trace;  // subsampled (k, a_k)
    double tail_max = 0.0;
    double tail_min = 1.0;
    long tail_start = 0;
    double final_value = 0.0;
};

/// Running average a_n = (1/n) sum 1_[lo,hi](T^k x0). Tail statistics are
/// taken over k >= max(1000, n/1000).
OccupationTrace occupation_fraction(const PiecewiseMap& map, double x0, double lo, double hi,
                                    long n, std::uint64_t seed = 0);

struct ErgodicityReport {
    bool non_ergodic_evidence = false;
    bool degenerate_continuum = false;
    std::vector<std::pair<double, double>> fixed_point_weights;  // (fixed point, atom weight nearby)
    double birkhoff_dispersion = 0.0;  // max spread of orbit averages of x, x^2, sin(pi x)
    std::vector<Atom> atom_clusters;
};

/// Flags non-ergodic evidence when two or more fixed points each carry atom
/// weight >= 0.1; also reports dispersion of Birkhoff averages over seeded
/// random starts.
ErgodicityReport ergodicity_report(const PiecewiseMap& map, const MeasureEstimate& estimate,
                                   int n_probes = 16, long probe_len = 100000,
                                   std::uint64_t seed = 0);

}  // namespace mcdyn

#endif

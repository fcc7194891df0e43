#ifndef MCDYN_MARKOV_MODEL_HPP
#define MCDYN_MARKOV_MODEL_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mcdyn/piecewise_map.hpp"

namespace mcdyn {

/// Finite row-stochastic matrix, sparse rows.
struct StochasticMatrix {
    int n = 0;
    Eigen::SparseMatrix<double, Eigen::RowMajor> p;

    /// Validates positivity, column range, and row sums (1 within 1e-12).
    static StochasticMatrix from_triplets(int n,
                                          const std::vector<std::tuple<int, int, double>>& entries);
    static StochasticMatrix from_dense(const Eigen::MatrixXd& dense);
    Eigen::MatrixXd dense() const;
    /// Left action p -> p P.
    Eigen::VectorXd apply_left(const Eigen::VectorXd& v) const;
    /// Max positive entries in any row.
    int max_row_support() const;
};

/// Piecewise-linear interval model of a Markov chain: base cells carry states,
/// refined cells carry one transition each, ordered by ascending target index.
/// Each refined cell maps affinely onto its target base cell.
struct MarkovMapModel {
    Eigen::VectorXd base_breaks;     // N+1
    Eigen::VectorXd refined_breaks;  // C+1
    std::vector<int> cell_state;     // C, owning base state of each refined cell
    std::vector<int> cell_target;    // C, image base state
    PiecewiseMap map;                // affine branches on the refined partition
    std::vector<std::string> warnings;

    int n_states() const { return static_cast<int>(base_breaks.size()) - 1; }
    int cell_count() const { return static_cast<int>(cell_state.size()); }
    int base_cell_of(double x) const;
};

/// Builds the interval model whose induced action on piecewise-uniform
/// densities matches the left action of the matrix. |cell| = P(i,j)|base_i|.
/// Entries below 1e-15 are dropped with a warning; a zero row throws
/// InvalidChainError. Default base partition: N equal cells.
MarkovMapModel build_markov_map(const StochasticMatrix& chain,
                                std::optional<Eigen::VectorXd> base_breaks = std::nullopt);

struct MarkovVerifyReport {
    bool ok = true;
    bool cell_bound_ok = true;
    double max_endpoint_error = 0.0;
    std::vector<std::string> violations;
};

/// Checks that every refined cell maps onto a base cell within 1e-10 endpoint
/// error and that the refined cell count stays within N*K.
MarkovVerifyReport verify_markov(const MarkovMapModel& model);

enum class WalkKind { inhomogeneous, homogeneous };

struct RandomWalkSpec {
    WalkKind kind = WalkKind::homogeneous;
    double p_left = 0.0;   // homogeneous
    double p_right = 0.0;  // homogeneous
    // inhomogeneous: per-state (p_left, p_stay, p_right); state 0 must have p_left = 0
    std::vector<std::array<double, 3>> triples;
};

struct RandomWalkModel {
    MarkovMapModel model;
    StochasticMatrix chain;       // truncated chain, state-indexed
    std::vector<int> cell_of_state;  // walk state -> base cell position
};

/// Interval model of a random walk on {0..M-1} over the dyadic layout
/// (2^-i, 2^-i+1]; overflow at the truncation folds into the last self-loop.
RandomWalkModel build_random_walk_map(const RandomWalkSpec& spec, int truncation_m);

/// Push base-cell masses through the model map and return the new base-cell
/// masses; equals p P within 1e-12.
Eigen::VectorXd lumped_action(const MarkovMapModel& model, const Eigen::VectorXd& p);

/// The model map with contiguous branches of equal slope/intercept merged
/// (1e-12 tolerance), e.g. for compact breakpoint-table export.
PiecewiseMap merged_map(const MarkovMapModel& model);

}  // namespace mcdyn

#endif

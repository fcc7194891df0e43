#ifndef MCDYN_PCA_HPP
#define MCDYN_PCA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcdyn/markov_model.hpp"

namespace mcdyn {

/// Probabilistic cellular automaton on a finite graph. The neighborhood of a
/// vertex includes the vertex itself; configurations are encoded base-K over
/// the neighborhood in ascending vertex order.
struct PcaSpec {
    int n_states = 2;
    std::vector<std::vector<int>> neighborhoods;  // per vertex, sorted, self included
    // per vertex: configuration code -> probability row over states
    std::vector<std::map<std::uint64_t, Eigen::VectorXd>> table;

    int n_vertices() const { return static_cast<int>(neighborhoods.size()); }
    std::uint64_t config_code(int vertex, const std::vector<int>& states) const;
    long n_configs(int vertex) const;
    void validate(int max_neighborhood = 16) const;
};

/// Per-vertex family of interval models, one per neighborhood configuration.
/// Every member shares the K-equal-cell base partition encoding the states.
struct CompiledPca {
    int n_states = 2;
    Eigen::VectorXd base_breaks;
    std::vector<std::map<std::uint64_t, MarkovMapModel>> maps;  // per vertex

    int decode_cell(double x) const;
    double cell_midpoint(int state) const;
};

/// Builds, for each vertex and neighborhood configuration, the interval model
/// of the K-state matrix whose every row is that configuration's probability
/// row: the image state distribution depends on the configuration alone.
CompiledPca compile_pca(const PcaSpec& spec);

/// Synchronous update of the compiled system: decode neighbor cells, select
/// each vertex's map by the decoded configuration, apply it to the vertex's
/// own coordinate.
std::vector<double> step_compiled(const CompiledPca& compiled, const PcaSpec& spec,
                                  const std::vector<double>& x);

/// One stochastic PCA update of a state vector (for Monte Carlo comparison).
std::vector<int> step_pca(const PcaSpec& spec, const std::vector<int>& states, Rng& rng);

enum class EquivalenceMode { exact, monte_carlo };

struct EquivalenceReport {
    EquivalenceMode mode = EquivalenceMode::exact;
    std::vector<double> tv_by_step;
    double max_tv = 0.0;
};

/// Per-step total-variation distance between the PCA state distribution and
/// the cell-decoded distribution of the compiled system, both started from the
/// uniform state distribution. Exact mode enumerates the joint chain (state
/// count capped at 4096); Monte Carlo mode samples n_runs trajectories per side.
EquivalenceReport equivalence_report(const PcaSpec& spec, const CompiledPca& compiled, int horizon,
                                     long n_runs, std::uint64_t seed,
                                     EquivalenceMode mode = EquivalenceMode::monte_carlo);

}  // namespace mcdyn

#endif

#ifndef MCDYN_IO_HPP
#define MCDYN_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mcdyn/markov_model.hpp"
#include "mcdyn/measure.hpp"
#include "mcdyn/pca.hpp"
#include "mcdyn/piecewise_map.hpp"

namespace mcdyn {

/// Matrix text format: first line N, then `row col prob` triples (0-based).
StochasticMatrix load_matrix(std::istream& in);
StochasticMatrix load_matrix_file(const std::string& path);
void save_matrix(std::ostream& out, const StochasticMatrix& m);

/// Piecewise-affine map table: one `breakpoint, slope, intercept` line per
/// branch (the final right endpoint is 1).
PiecewiseMap load_map_table(std::istream& in);
PiecewiseMap load_map_table_file(const std::string& path);
void save_map_table(std::ostream& out, const PiecewiseMap& map);

/// Resolves a catalog name or a map-table path.
PiecewiseMap resolve_map(const std::string& name_or_path);

/// Measure CSV: `cell, left_break, right_break, mass` rows then
/// `atom, location, weight` rows.
void save_measure_csv(std::ostream& out, const MeasureEstimate& estimate);
void save_density_csv(std::ostream& out, const CellDensity& density);

void save_trace_csv(std::ostream& out, const std::vector<std::pair<long, double>>& trace);

/// Automaton description: `states K`, `vertex v`, `edge a b`, and
/// `table v config-string -> p0 p1 ...` lines.
PcaSpec load_pca_spec(std::istream& in);
PcaSpec load_pca_spec_file(const std::string& path);

/// Canonical float formatting used by every CSV writer (round-trip exact,
/// byte-stable across runs).
std::string format_double(double v);

}  // namespace mcdyn

#endif

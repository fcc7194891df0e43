#include "mcdyn/markov_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mcdyn/measure.hpp"

namespace mcdyn {

StochasticMatrix StochasticMatrix::from_triplets(
    int n, const std::vector<std::tuple<int, int, double>>& entries) {
    if (n <= 0) throw InvalidChainError("matrix must have at least one state");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(entries.size());
    for (const auto& [r, c, v] : entries) {
        if (r < 0 || r >= n || c < 0 || c >= n)
            throw InvalidChainError("matrix index out of range");
        if (v < 0.0) throw InvalidChainError("negative transition probability");
        if (v > 1.0 + 1e-12) throw InvalidChainError("transition probability above 1");
        if (v > 0.0) trip.emplace_back(r, c, v);
    }
    StochasticMatrix m;
    m.n = n;
    m.p.resize(n, n);
    m.p.setFromTriplets(trip.begin(), trip.end());
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.p, i); it; ++it)
            sum += it.value();
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidChainError("row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    return m;
}

StochasticMatrix StochasticMatrix::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<std::tuple<int, int, double>> entries;
    for (int i = 0; i < dense.rows(); ++i)
        for (int j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0) entries.emplace_back(i, j, dense(i, j));
    return from_triplets(static_cast<int>(dense.rows()), entries);
}

Eigen::MatrixXd StochasticMatrix::dense() const { return Eigen::MatrixXd(p); }

Eigen::VectorXd StochasticMatrix::apply_left(const Eigen::VectorXd& v) const {
    return p.transpose() * v;
}

int StochasticMatrix::max_row_support() const {
    int k = 0;
    for (int i = 0; i < n; ++i) {
        int cnt = 0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p, i); it; ++it)
            if (it.value() > 0.0) ++cnt;
        k = std::max(k, cnt);
    }
    return k;
}

int MarkovMapModel::base_cell_of(double x) const {
    const int n = n_states();
    auto it = std::upper_bound(base_breaks.data(), base_breaks.data() + n + 1, x);
    return std::clamp(static_cast<int>(it - base_breaks.data()) - 1, 0, n - 1);
}

MarkovMapModel build_markov_map(const StochasticMatrix& chain,
                                std::optional<Eigen::VectorXd> base_breaks) {
    const int n = chain.n;
    MarkovMapModel model;
    if (base_breaks) {
        if (base_breaks->size() != n + 1) throw InvalidChainError("base partition size mismatch");
        model.base_breaks = *base_breaks;
    } else {
        model.base_breaks = Eigen::VectorXd::LinSpaced(n + 1, 0.0, 1.0);
    }

    std::vector<double> refined{model.base_breaks[0]};
    std::vector<std::pair<double, double>> slope_intercept;
    for (int i = 0; i < n; ++i) {
        const double lo = model.base_breaks[i];
        const double hi = model.base_breaks[i + 1];
        const double len = hi - lo;
        if (len <= 0.0) throw InvalidChainError("base cell with nonpositive length");

        std::vector<std::pair<int, double>> row;  // ascending target index
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(chain.p, i); it; ++it) {
            if (it.value() < 1e-15) {
                model.warnings.push_back("dropped degenerate cell: P(" + std::to_string(i) + "," +
                                         std::to_string(static_cast<int>(it.col())) + ") = " +
                                         std::to_string(it.value()));
                continue;
            }
            row.emplace_back(static_cast<int>(it.col()), it.value());
        }
        if (row.empty()) throw InvalidChainError("zero row at state " + std::to_string(i));

        double cum = 0.0;
        double cell_lo = lo;
        for (std::size_t k = 0; k < row.size(); ++k) {
            cum += row[k].second;
            const double cell_hi = (k + 1 == row.size()) ? hi : lo + cum * len;
            const int target = row[k].first;
            const double t_lo = model.base_breaks[target];
            const double t_hi = model.base_breaks[target + 1];
            const double slope = (t_hi - t_lo) / (cell_hi - cell_lo);
            slope_intercept.emplace_back(slope, t_lo - slope * cell_lo);
            refined.push_back(cell_hi);
            model.cell_state.push_back(i);
            model.cell_target.push_back(target);
            cell_lo = cell_hi;
        }
    }

    model.refined_breaks =
        Eigen::Map<Eigen::VectorXd>(refined.data(), static_cast<long>(refined.size()));
    model.map = affine_map(refined, slope_intercept);
    model.map.name = "markov_model";
    return model;
}

MarkovVerifyReport verify_markov(const MarkovMapModel& model) {
    MarkovVerifyReport report;
    const int n = model.n_states();
    for (int c = 0; c < model.cell_count(); ++c) {
        const Branch& b = model.map.branches[c];
        const double lo = model.refined_breaks[c];
        const double hi = model.refined_breaks[c + 1];
        const double img_lo = std::min(b.value(lo), b.value(hi));
        const double img_hi = std::max(b.value(lo), b.value(hi));
        // nearest base cell to the image
        double best_err = 1e300;
        for (int t = 0; t < n; ++t) {
            const double err = std::max(std::abs(img_lo - model.base_breaks[t]),
                                        std::abs(img_hi - model.base_breaks[t + 1]));
            best_err = std::min(best_err, err);
        }
        report.max_endpoint_error = std::max(report.max_endpoint_error, best_err);
        if (best_err > 1e-10) {
            report.ok = false;
            report.violations.push_back("cell " + std::to_string(c) +
                                        " image is not a base cell (error " +
                                        std::to_string(best_err) + ")");
        }
    }
    // count bound N*K
    std::vector<int> per_state(n, 0);
    for (int s : model.cell_state) ++per_state[s];
    const int k = *std::max_element(per_state.begin(), per_state.end());
    if (model.cell_count() > n * k) {
        report.cell_bound_ok = false;
        report.ok = false;
        report.violations.push_back("refined cell count exceeds N*K");
    }
    return report;
}

RandomWalkModel build_random_walk_map(const RandomWalkSpec& spec, int truncation_m) {
    if (truncation_m < 2) throw InvalidChainError("truncation must keep at least two states");
    const int m = truncation_m;

    std::vector<std::array<double, 3>> rows(m);  // (left, stay, right) per state
    if (spec.kind == WalkKind::homogeneous) {
        if (spec.p_left < 0.0 || spec.p_right < 0.0 || spec.p_left + spec.p_right > 1.0 + 1e-12)
            throw InvalidChainError("homogeneous walk probabilities invalid");
        for (int s = 0; s < m; ++s)
            rows[s] = {spec.p_left, 1.0 - spec.p_left - spec.p_right, spec.p_right};
        rows[0] = {0.0, 1.0 - spec.p_right, spec.p_right};
    } else {
        if (static_cast<int>(spec.triples.size()) < m)
            throw InvalidChainError("walk needs a triple per state up to the truncation");
        for (int s = 0; s < m; ++s) {
            rows[s] = spec.triples[s];
            for (double q : rows[s])
                if (q < 0.0) throw InvalidChainError("negative walk probability");
            const double sum = rows[s][0] + rows[s][1] + rows[s][2];
            if (std::abs(sum - 1.0) > 1e-12) throw InvalidChainError("walk triple does not sum to 1");
        }
        if (rows[0][0] != 0.0) throw InvalidChainError("state 0 cannot step left");
    }
    // fold the overflow of the last state into its self-loop
    rows[m - 1][1] += rows[m - 1][2];
    rows[m - 1][2] = 0.0;

    // dyadic layout: state s sits on (2^-s-1, 2^-s]; the last cell absorbs [0, 2^-m+1]
    Eigen::VectorXd breaks(m + 1);
    breaks[0] = 0.0;
    for (int k = 1; k <= m; ++k) breaks[k] = std::ldexp(1.0, k - m);
    RandomWalkModel out;
    out.cell_of_state.resize(m);
    for (int s = 0; s < m; ++s) out.cell_of_state[s] = m - 1 - s;

    // chain indexed by walk state; model built over position-indexed cells
    std::vector<std::tuple<int, int, double>> state_entries;
    std::vector<std::tuple<int, int, double>> pos_entries;
    for (int s = 0; s < m; ++s) {
        const int targets[3] = {s - 1, s, s + 1};
        for (int t = 0; t < 3; ++t) {
            const double q = rows[s][t];
            if (q <= 0.0) continue;
            const int dst = targets[t];
            if (dst < 0 || dst >= m) throw InvalidChainError("walk target out of range");
            state_entries.emplace_back(s, dst, q);
            pos_entries.emplace_back(out.cell_of_state[s], out.cell_of_state[dst], q);
        }
    }
    out.chain = StochasticMatrix::from_triplets(m, state_entries);
    const StochasticMatrix pos_chain = StochasticMatrix::from_triplets(m, pos_entries);
    out.model = build_markov_map(pos_chain, breaks);
    return out;
}

Eigen::VectorXd lumped_action(const MarkovMapModel& model, const Eigen::VectorXd& p) {
    if (p.size() != model.n_states()) throw Error("lumped_action: vector size mismatch");
    // refined-cell masses of the piecewise-uniform density with base masses p
    const int c = model.cell_count();
    Eigen::VectorXd refined_mass(c);
    for (int i = 0; i < c; ++i) {
        const int s = model.cell_state[i];
        const double cell_len = model.refined_breaks[i + 1] - model.refined_breaks[i];
        const double base_len = model.base_breaks[s + 1] - model.base_breaks[s];
        refined_mass[i] = p[s] * cell_len / base_len;
    }
    CellDensity mu{model.refined_breaks, refined_mass};
    const CellDensity pushed = pushforward(model.map, mu, model.refined_breaks);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(model.n_states());
    for (int i = 0; i < c; ++i) out[model.cell_state[i]] += pushed.mass[i];
    return out;
}

PiecewiseMap merged_map(const MarkovMapModel& model) {
    std::vector<double> breaks{model.refined_breaks[0]};
    std::vector<std::pair<double, double>> si;
    for (int c = 0; c < model.cell_count(); ++c) {
        const Branch& b = model.map.branches[c];
        if (!si.empty() && std::abs(si.back().first - b.slope) <= 1e-12 &&
            std::abs(si.back().second - b.intercept) <= 1e-12) {
            breaks.back() = model.refined_breaks[c + 1];  // extend previous branch
        } else {
            si.emplace_back(b.slope, b.intercept);
            breaks.push_back(model.refined_breaks[c + 1]);
        }
    }
    PiecewiseMap merged = affine_map(breaks, si);
    merged.name = "markov_model_merged";
    return merged;
}

}  // namespace mcdyn

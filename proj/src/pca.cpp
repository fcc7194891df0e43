#include "mcdyn/pca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mcdyn {

std::uint64_t PcaSpec::config_code(int vertex, const std::vector<int>& states) const {
    const auto& nbh = neighborhoods[static_cast<std::size_t>(vertex)];
    std::uint64_t code = 0;
    for (int g : nbh) code = code * static_cast<std::uint64_t>(n_states) +
                             static_cast<std::uint64_t>(states[static_cast<std::size_t>(g)]);
    return code;
}

long PcaSpec::n_configs(int vertex) const {
    long n = 1;
    for (std::size_t k = 0; k < neighborhoods[static_cast<std::size_t>(vertex)].size(); ++k)
        n *= n_states;
    return n;
}

void PcaSpec::validate(int max_neighborhood) const {
    if (n_states < 2) throw SpecError("automaton needs at least two states");
    if (neighborhoods.empty()) throw SpecError("automaton needs at least one vertex");
    if (table.size() != neighborhoods.size()) throw SpecError("table size mismatch");
    for (int v = 0; v < n_vertices(); ++v) {
        const auto& nbh = neighborhoods[static_cast<std::size_t>(v)];
        if (static_cast<int>(nbh.size()) > max_neighborhood)
            throw SpecError("neighborhood of vertex " + std::to_string(v) + " exceeds the bound");
        if (!std::is_sorted(nbh.begin(), nbh.end())) throw SpecError("neighborhood not sorted");
        if (!std::binary_search(nbh.begin(), nbh.end(), v))
            throw SpecError("neighborhood must include the vertex itself");
        for (int g : nbh)
            if (g < 0 || g >= n_vertices()) throw SpecError("neighbor out of range");
        if (static_cast<long>(table[static_cast<std::size_t>(v)].size()) != n_configs(v))
            throw SpecError("vertex " + std::to_string(v) + " is missing configuration rows");
        for (const auto& [code, row] : table[static_cast<std::size_t>(v)]) {
            if (row.size() != n_states) throw SpecError("probability row has wrong length");
            if (row.minCoeff() < 0.0) throw SpecError("negative probability in table");
            if (std::abs(row.sum() - 1.0) > 1e-12)
                throw SpecError("probability row does not sum to 1");
        }
    }
}

int CompiledPca::decode_cell(double x) const {
    const int k = n_states;
    auto it = std::upper_bound(base_breaks.data(), base_breaks.data() + k + 1, x);
    return std::clamp(static_cast<int>(it - base_breaks.data()) - 1, 0, k - 1);
}

double CompiledPca::cell_midpoint(int state) const {
    return 0.5 * (base_breaks[state] + base_breaks[state + 1]);
}

CompiledPca compile_pca(const PcaSpec& spec) {
    spec.validate();
    CompiledPca out;
    out.n_states = spec.n_states;
    out.base_breaks = Eigen::VectorXd::LinSpaced(spec.n_states + 1, 0.0, 1.0);
    out.maps.resize(static_cast<std::size_t>(spec.n_vertices()));
    for (int v = 0; v < spec.n_vertices(); ++v) {
        for (const auto& [code, row] : spec.table[static_cast<std::size_t>(v)]) {
            // the next-state distribution depends on the configuration only, so
            // the compiled matrix repeats the row for every current state
            std::vector<std::tuple<int, int, double>> entries;
            for (int i = 0; i < spec.n_states; ++i)
                for (int j = 0; j < spec.n_states; ++j)
                    if (row[j] > 0.0) entries.emplace_back(i, j, row[j]);
            const StochasticMatrix m = StochasticMatrix::from_triplets(spec.n_states, entries);
            out.maps[static_cast<std::size_t>(v)].emplace(code,
                                                          build_markov_map(m, out.base_breaks));
        }
    }
    return out;
}

std::vector<double> step_compiled(const CompiledPca& compiled, const PcaSpec& spec,
                                  const std::vector<double>& x) {
    const int n = spec.n_vertices();
    std::vector<int> states(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) states[static_cast<std::size_t>(v)] = compiled.decode_cell(x[static_cast<std::size_t>(v)]);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const std::uint64_t code = spec.config_code(v, states);
        const MarkovMapModel& model = compiled.maps[static_cast<std::size_t>(v)].at(code);
        out[static_cast<std::size_t>(v)] = eval(model.map, x[static_cast<std::size_t>(v)]);
    }
    return out;
}

std::vector<int> step_pca(const PcaSpec& spec, const std::vector<int>& states, Rng& rng) {
    const int n = spec.n_vertices();
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const Eigen::VectorXd& row = spec.table[static_cast<std::size_t>(v)].at(spec.config_code(v, states));
        const double u = rng.next_double();
        double acc = 0.0;
        int next = spec.n_states - 1;
        for (int s = 0; s < spec.n_states; ++s) {
            acc += row[s];
            if (u < acc) {
                next = s;
                break;
            }
        }
        out[static_cast<std::size_t>(v)] = next;
    }
    return out;
}

namespace {

long joint_state_count(const PcaSpec& spec) {
    long n = 1;
    for (int v = 0; v < spec.n_vertices(); ++v) {
        n *= spec.n_states;
        if (n > 4096) return -1;
    }
    return n;
}

std::vector<int> decode_joint(const PcaSpec& spec, long sigma) {
    std::vector<int> states(static_cast<std::size_t>(spec.n_vertices()));
    for (int v = spec.n_vertices() - 1; v >= 0; --v) {
        states[static_cast<std::size_t>(v)] = static_cast<int>(sigma % spec.n_states);
        sigma /= spec.n_states;
    }
    return states;
}

long encode_joint(const PcaSpec& spec, const std::vector<int>& states) {
    long sigma = 0;
    for (int v = 0; v < spec.n_vertices(); ++v)
        sigma = sigma * spec.n_states + states[static_cast<std::size_t>(v)];
    return sigma;
}

// joint transition matrix from per-vertex rows supplied by a callback
Eigen::MatrixXd joint_matrix(const PcaSpec& spec, long s_count,
                             const std::function<Eigen::VectorXd(int, std::uint64_t)>& row_of) {
    const int n = spec.n_vertices();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(s_count, s_count);
    for (long sigma = 0; sigma < s_count; ++sigma) {
        const std::vector<int> states = decode_joint(spec, sigma);
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) rows.push_back(row_of(v, spec.config_code(v, states)));
        for (long tau = 0; tau < s_count; ++tau) {
            const std::vector<int> next = decode_joint(spec, tau);
            double prob = 1.0;
            for (int v = 0; v < n && prob > 0.0; ++v)
                prob *= rows[static_cast<std::size_t>(v)][next[static_cast<std::size_t>(v)]];
            p(sigma, tau) = prob;
        }
    }
    return p;
}

}  // namespace

EquivalenceReport equivalence_report(const PcaSpec& spec, const CompiledPca& compiled, int horizon,
                                     long n_runs, std::uint64_t seed, EquivalenceMode mode) {
    EquivalenceReport report;
    report.mode = mode;
    const int n = spec.n_vertices();
    const long s_count = joint_state_count(spec);
    if (mode == EquivalenceMode::exact && s_count < 0)
        throw SpecError("exact equivalence needs at most 4096 joint states");

    if (mode == EquivalenceMode::exact) {
        // chain side: the automaton's own rows; compiled side: rows measured
        // from the interval models by lumping the pushforward of a cell mass
        const Eigen::MatrixXd pa =
            joint_matrix(spec, s_count, [&](int v, std::uint64_t code) {
                return spec.table[static_cast<std::size_t>(v)].at(code);
            });
        const Eigen::MatrixXd pb = joint_matrix(spec, s_count, [&](int v, std::uint64_t code) {
            const MarkovMapModel& model = compiled.maps[static_cast<std::size_t>(v)].at(code);
            // the vertex's own state is a digit of the configuration code
            const auto& nbh = spec.neighborhoods[static_cast<std::size_t>(v)];
            const std::size_t pos = static_cast<std::size_t>(
                std::lower_bound(nbh.begin(), nbh.end(), v) - nbh.begin());
            std::uint64_t c = code;
            int own = 0;
            for (std::size_t k = nbh.size(); k-- > 0;) {
                const int digit = static_cast<int>(c % static_cast<std::uint64_t>(spec.n_states));
                if (k == pos) own = digit;
                c /= static_cast<std::uint64_t>(spec.n_states);
            }
            Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.n_states);
            e[own] = 1.0;
            return Eigen::VectorXd(lumped_action(model, e));
        });
        Eigen::VectorXd da = Eigen::VectorXd::Constant(s_count, 1.0 / static_cast<double>(s_count));
        Eigen::VectorXd db = da;
        for (int t = 0; t <= horizon; ++t) {
            report.tv_by_step.push_back(0.5 * (da - db).cwiseAbs().sum());
            da = pa.transpose() * da;
            db = pb.transpose() * db;
        }
    } else {
        // independent sampling on each side
        std::vector<std::vector<long>> hist_a(static_cast<std::size_t>(horizon) + 1),
            hist_b(static_cast<std::size_t>(horizon) + 1);
        const long bins = s_count > 0 ? s_count : 4096;
        for (auto& h : hist_a) h.assign(static_cast<std::size_t>(bins), 0);
        for (auto& h : hist_b) h.assign(static_cast<std::size_t>(bins), 0);

        for (long r = 0; r < n_runs; ++r) {
            Rng rng = Rng::stream(seed, 0xACAull + static_cast<std::uint64_t>(r));
            std::vector<int> states(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v)
                states[static_cast<std::size_t>(v)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.n_states)));
            for (int t = 0; t <= horizon; ++t) {
                ++hist_a[static_cast<std::size_t>(t)][static_cast<std::size_t>(encode_joint(spec, states) % bins)];
                states = step_pca(spec, states, rng);
            }
        }
        for (long r = 0; r < n_runs; ++r) {
            Rng rng = Rng::stream(seed, 0xC0117ull + static_cast<std::uint64_t>(r));
            std::vector<double> x(static_cast<std::size_t>(n));
            std::vector<int> states(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                states[static_cast<std::size_t>(v)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.n_states)));
                // uniform within the state's cell
                const double lo = compiled.base_breaks[states[static_cast<std::size_t>(v)]];
                const double hi = compiled.base_breaks[states[static_cast<std::size_t>(v)] + 1];
                x[static_cast<std::size_t>(v)] = lo + rng.next_double() * (hi - lo);
            }
            for (int t = 0; t <= horizon; ++t) {
                for (int v = 0; v < n; ++v) states[static_cast<std::size_t>(v)] = compiled.decode_cell(x[static_cast<std::size_t>(v)]);
                ++hist_b[static_cast<std::size_t>(t)][static_cast<std::size_t>(encode_joint(spec, states) % bins)];
                x = step_compiled(compiled, spec, x);
            }
        }
        for (int t = 0; t <= horizon; ++t) {
            double tv = 0.0;
            for (long b = 0; b < bins; ++b)
                tv += std::abs(static_cast<double>(hist_a[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)]) -
                               static_cast<double>(hist_b[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)]));
            report.tv_by_step.push_back(0.5 * tv / static_cast<double>(n_runs));
        }
    }
    for (double tv : report.tv_by_step) report.max_tv = std::max(report.max_tv, tv);
    return report;
}

}  // namespace mcdyn

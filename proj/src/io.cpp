#include "mcdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mcdyn {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

// strip comments and blank lines
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream probe(line);
        std::string tok;
        if (probe >> tok) return true;
    }
    return false;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

StochasticMatrix load_matrix(std::istream& in) {
    std::string line;
    if (!next_line(in, line)) throw Error("matrix file is empty");
    int n = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> n)) throw Error("matrix file must start with the state count");
    }
    std::vector<std::tuple<int, int, double>> entries;
    while (next_line(in, line)) {
        std::istringstream ls(line);
        int r, c;
        double p;
        if (!(ls >> r >> c >> p)) throw Error("bad matrix entry line: " + line);
        entries.emplace_back(r, c, p);
    }
    return StochasticMatrix::from_triplets(n, entries);
}

StochasticMatrix load_matrix_file(const std::string& path) {
    auto in = open_or_throw(path);
    return load_matrix(in);
}

void save_matrix(std::ostream& out, const StochasticMatrix& m) {
    out << m.n << "\n";
    for (int i = 0; i < m.n; ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.p, i); it; ++it)
            out << i << " " << it.col() << " " << format_double(it.value()) << "\n";
}

PiecewiseMap load_map_table(std::istream& in) {
    std::vector<double> breaks;
    std::vector<std::pair<double, double>> si;
    std::string line;
    while (next_line(in, line)) {
        std::istringstream ls(line);
        double b, s, c;
        if (!(ls >> b >> s >> c)) throw Error("bad map table line: " + line);
        breaks.push_back(b);
        si.emplace_back(s, c);
    }
    breaks.push_back(1.0);
    return affine_map(std::move(breaks), std::move(si));
}

PiecewiseMap load_map_table_file(const std::string& path) {
    auto in = open_or_throw(path);
    PiecewiseMap m = load_map_table(in);
    m.name = path;
    return m;
}

void save_map_table(std::ostream& out, const PiecewiseMap& map) {
    for (std::size_t i = 0; i < map.branches.size(); ++i) {
        const Branch& b = map.branches[i];
        if (b.kind != BranchKind::affine) throw Error("map table export needs affine branches");
        out << format_double(map.breakpoints[i]) << ", " << format_double(b.slope) << ", "
            << format_double(b.intercept) << "\n";
    }
}

PiecewiseMap resolve_map(const std::string& name_or_path) {
    static const char* kCatalog[] = {"del_magno", "inoue", "cubic_pitchfork",
                                     "doubling",  "shrink_jump", "identity"};
    for (const char* c : kCatalog)
        if (name_or_path == c) return catalog_map(name_or_path);
    return load_map_table_file(name_or_path);
}

void save_density_csv(std::ostream& out, const CellDensity& density) {
    out << "left_break, right_break, mass\n";
    for (int i = 0; i < density.cells(); ++i)
        out << format_double(density.breaks[i]) << ", " << format_double(density.breaks[i + 1])
            << ", " << format_double(density.mass[i]) << "\n";
}

void save_measure_csv(std::ostream& out, const MeasureEstimate& estimate) {
    if (const CellDensity* d = estimate.density()) {
        save_density_csv(out, *d);
    } else if (const EmpiricalMeasure* e = estimate.empirical()) {
        out << "left_break, right_break, mass\n";
        for (int i = 0; i < e->location.size(); ++i)
            out << format_double(e->location[i]) << ", " << format_double(e->location[i]) << ", "
                << format_double(e->weight[i]) << "\n";
    }
    for (const Atom& a : estimate.atom_summary)
        out << "atom, " << format_double(a.location) << ", " << format_double(a.weight) << "\n";
}

void save_trace_csv(std::ostream& out, const std::vector<std::pair<long, double>>& trace) {
    out << "n, value\n";
    for (const auto& [n, v] : trace) out << n << ", " << format_double(v) << "\n";
}

PcaSpec load_pca_spec(std::istream& in) {
    PcaSpec spec;
    spec.n_states = 2;
    std::vector<std::vector<int>> adjacency;
    struct RawRow {
        int vertex;
        std::string config;
        std::vector<double> probs;
    };
    std::vector<RawRow> raw_rows;
    int n_vertices = 0;

    std::string line;
    while (next_line(in, line)) {
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "states") {
            if (!(ls >> spec.n_states)) throw SpecError("bad states line");
        } else if (kind == "vertices") {
            if (!(ls >> n_vertices)) throw SpecError("bad vertices line");
            adjacency.assign(static_cast<std::size_t>(n_vertices), {});
        } else if (kind == "edge") {
            int a, b;
            if (!(ls >> a >> b)) throw SpecError("bad edge line");
            if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices)
                throw SpecError("edge endpoint out of range");
            adjacency[static_cast<std::size_t>(a)].push_back(b);
            adjacency[static_cast<std::size_t>(b)].push_back(a);
        } else if (kind == "table") {
            RawRow row;
            std::string arrow;
            if (!(ls >> row.vertex >> row.config >> arrow) || arrow != "->")
                throw SpecError("bad table line: " + line);
            double p;
            while (ls >> p) row.probs.push_back(p);
            raw_rows.push_back(std::move(row));
        } else {
            throw SpecError("unknown line in automaton spec: " + line);
        }
    }
    if (n_vertices == 0) throw SpecError("automaton spec has no vertices");

    spec.neighborhoods.resize(static_cast<std::size_t>(n_vertices));
    for (int v = 0; v < n_vertices; ++v) {
        auto& nbh = spec.neighborhoods[static_cast<std::size_t>(v)];
        nbh = adjacency[static_cast<std::size_t>(v)];
        nbh.push_back(v);
        std::sort(nbh.begin(), nbh.end());
        nbh.erase(std::unique(nbh.begin(), nbh.end()), nbh.end());
    }
    spec.table.resize(static_cast<std::size_t>(n_vertices));
    for (const RawRow& row : raw_rows) {
        if (row.vertex < 0 || row.vertex >= n_vertices) throw SpecError("table vertex out of range");
        const auto& nbh = spec.neighborhoods[static_cast<std::size_t>(row.vertex)];
        if (row.config.size() != nbh.size())
            throw SpecError("config string length must match the neighborhood size");
        std::vector<int> states(static_cast<std::size_t>(n_vertices), 0);
        for (std::size_t k = 0; k < nbh.size(); ++k) {
            const int digit = row.config[k] - '0';
            if (digit < 0 || digit >= spec.n_states) throw SpecError("bad config digit");
            states[static_cast<std::size_t>(nbh[k])] = digit;
        }
        Eigen::VectorXd probs(static_cast<long>(row.probs.size()));
        for (std::size_t i = 0; i < row.probs.size(); ++i) probs[static_cast<long>(i)] = row.probs[i];
        spec.table[static_cast<std::size_t>(row.vertex)][spec.config_code(row.vertex, states)] =
            std::move(probs);
    }
    spec.validate();
    return spec;
}

PcaSpec load_pca_spec_file(const std::string& path) {
    auto in = open_or_throw(path);
    return load_pca_spec(in);
}

}  // namespace mcdyn

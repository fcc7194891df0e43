#include "mcdyn/piecewise_map.hpp"

#include <algorithm>
#include <cmath>

namespace mcdyn {

namespace {

constexpr double kRangeTol = 1e-12;

double branch_formula(BranchKind kind, double slope, double intercept, double x) {
    switch (kind) {
        case BranchKind::affine:
            return slope * x + intercept;
        case BranchKind::cosine_arch:
            return (1.0 + std::cos(M_PI * x)) / 2.0;
        case BranchKind::cubic_escape:
            return x + 4.0 * x * x * x;
        case BranchKind::cubic_return: {
            const double u = 1.0 - x;
            return x - 4.0 * u * u * u;
        }
        case BranchKind::cubic_sink: {
            const double u = x - 1.0;
            return x - x * u * u / 6.0;
        }
    }
    return x;
}

}  // namespace

double Branch::value(double x) const { return branch_formula(kind, slope, intercept, x); }

double Branch::derivative(double x) const {
    switch (kind) {
        case BranchKind::affine:
            return slope;
        case BranchKind::cubic_escape:
            return 1.0 + 12.0 * x * x;
        case BranchKind::cubic_return: {
            const double u = 1.0 - x;
            return 1.0 + 12.0 * u * u;
        }
        case BranchKind::cubic_sink:
            return 1.0 - (x - 1.0) * (3.0 * x - 1.0) / 6.0;
        case BranchKind::cosine_arch: {
            const double h = 1e-7;
            const double a = std::max(0.0, x - h);
            const double b = std::min(1.0, x + h);
            return (value(b) - value(a)) / (b - a);
        }
    }
    return 0.0;
}

int PiecewiseMap::branch_index(double x) const {
    // each branch owns its left endpoint, the final branch owns both
    const int nb = static_cast<int>(branches.size());
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    int idx = static_cast<int>(it - breakpoints.begin()) - 1;
    if (idx < 0) idx = 0;
    if (idx >= nb) idx = nb - 1;
    return idx;
}

bool PiecewiseMap::all_branches_monotone() const {
    for (const auto& b : branches) {
        if (b.kind == BranchKind::affine && b.slope == 0.0) return false;
    }
    return true;
}

void finalize_map(PiecewiseMap& map) {
    const std::size_t nb = map.branches.size();
    if (map.breakpoints.size() != nb + 1 || nb == 0)
        throw InvalidMapError("breakpoint/branch count mismatch");
    if (map.breakpoints.front() != 0.0 || map.breakpoints.back() != 1.0)
        throw InvalidMapError("breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < map.breakpoints.size(); ++i)
        if (!(map.breakpoints[i] < map.breakpoints[i + 1]))
            throw InvalidMapError("breakpoints must be strictly increasing");

    auto overridden = [&](double p) {
        for (const auto& [q, _] : map.point_overrides)
            if (q == p) return true;
        return false;
    };

    for (std::size_t i = 0; i < nb; ++i) {
        Branch& b = map.branches[i];
        const double l = map.breakpoints[i];
        const double r = map.breakpoints[i + 1];
        const double fl = b.value(l);
        const double fr = b.value(r);
        if (std::min(fl, fr) < -kRangeTol || std::max(fl, fr) > 1.0 + kRangeTol)
            throw InvalidMapError("branch leaves [0,1] on " + map.name);
        b.increasing = fr >= fl;
        b.range_lo = std::clamp(std::min(fl, fr), 0.0, 1.0);
        b.range_hi = std::clamp(std::max(fl, fr), 0.0, 1.0);
        // domain inclusion: left endpoint owned unless shadowed by an override;
        // right endpoint owned only by the final branch (unless overridden)
        const bool has_l = !overridden(l);
        const bool has_r = (i + 1 == nb) && !overridden(r);
        b.lo_attained = b.increasing ? has_l : has_r;
        b.hi_attained = b.increasing ? has_r : has_l;
    }
    for (const auto& [p, v] : map.point_overrides) {
        if (p < 0.0 || p > 1.0 || v < 0.0 || v > 1.0)
            throw InvalidMapError("point override outside [0,1]");
    }
}

PiecewiseMap catalog_map(std::string_view name) {
    PiecewiseMap m;
    m.name = std::string(name);
    if (name == "del_magno") {
        m.breakpoints = {0.0, 1.0};
        m.branches = {{.kind = BranchKind::cosine_arch}};
        m.point_overrides = {{0.0, 0.0}, {1.0, 1.0}};
    } else if (name == "inoue") {
        m.breakpoints = {0.0, 0.5, 1.0};
        m.branches = {{.kind = BranchKind::cubic_escape}, {.kind = BranchKind::cubic_return}};
    } else if (name == "cubic_pitchfork") {
        m.breakpoints = {0.0, 1.0};
        m.branches = {{.kind = BranchKind::cubic_sink}};
    } else if (name == "doubling") {
        m.breakpoints = {0.0, 0.5, 1.0};
        m.branches = {{.kind = BranchKind::affine, .slope = 2.0, .intercept = 0.0},
                      {.kind = BranchKind::affine, .slope = 2.0, .intercept = -1.0}};
    } else if (name == "shrink_jump") {
        m.breakpoints = {0.0, 1.0};
        m.branches = {{.kind = BranchKind::affine, .slope = 0.5, .intercept = 0.0}};
        m.point_overrides = {{0.0, 1.0}};
    } else if (name == "identity") {
        return identity_map();
    } else {
        throw InvalidMapError("unknown catalog map: " + std::string(name));
    }
    finalize_map(m);
    return m;
}

PiecewiseMap identity_map() {
    PiecewiseMap m;
    m.name = "identity";
    m.breakpoints = {0.0, 1.0};
    m.branches = {{.kind = BranchKind::affine, .slope = 1.0, .intercept = 0.0}};
    finalize_map(m);
    return m;
}

PiecewiseMap affine_map(std::vector<double> breakpoints,
                        std::vector<std::pair<double, double>> slope_intercept) {
    PiecewiseMap m;
    m.breakpoints = std::move(breakpoints);
    m.branches.reserve(slope_intercept.size());
    for (auto [s, c] : slope_intercept)
        m.branches.push_back({.kind = BranchKind::affine, .slope = s, .intercept = c});
    finalize_map(m);
    return m;
}

double eval(const PiecewiseMap& map, double x) {
    if (x < 0.0 || x > 1.0) throw InvalidMapError("eval: point outside [0,1]");
    for (const auto& [p, v] : map.point_overrides)
        if (x == p) return v;
    const Branch& b = map.branches[map.branch_index(x)];
    double y = b.value(x);
    if (y < -kRangeTol || y > 1.0 + kRangeTol)
        throw InvalidMapError("eval: branch image outside [0,1] on " + map.name);
    y = std::clamp(y, b.range_lo, b.range_hi);
    // keep rounded outputs off range endpoints the branch does not attain
    if (!b.lo_attained && y <= b.range_lo) y = std::nextafter(b.range_lo, 1.0);
    if (!b.hi_attained && y >= b.range_hi) y = std::nextafter(b.range_hi, 0.0);
    return y;
}

double eval_perturbed(const PiecewiseMap& map, double x, Rng& rng, double noise) {
    double y = eval(map, x) + noise * (2.0 * rng.next_double() - 1.0);
    if (y < 0.0) y = -y;
    if (y > 1.0) y = 2.0 - y;
    return std::clamp(y, 0.0, 1.0);
}

std::vector<double> orbit(const PiecewiseMap& map, double x0, long n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(x0);
    double x = x0;
    for (long k = 0; k < n; ++k) {
        x = eval(map, x);
        out.push_back(x);
    }
    return out;
}

namespace {

// invert a strictly monotone branch on [l, r] at level y via bisection
double invert_branch(const Branch& b, double l, double r, double y) {
    if (b.kind == BranchKind::affine) return (y - b.intercept) / b.slope;
    double lo = l, hi = r;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool below = b.increasing ? (b.value(mid) < y) : (b.value(mid) > y);
        (below ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Interval> branch_preimages(const PiecewiseMap& map, Interval j) {
    const double jlo = std::max(0.0, std::min(j.lo, j.hi));
    const double jhi = std::min(1.0, std::max(j.lo, j.hi));
    std::vector<Interval> out;
    for (std::size_t i = 0; i < map.branches.size(); ++i) {
        const Branch& b = map.branches[i];
        if (b.kind == BranchKind::affine && b.slope == 0.0)
            throw UnsupportedMapError("branch_preimages: non-invertible branch");
        const double l = map.breakpoints[i];
        const double r = map.breakpoints[i + 1];
        const double ylo = std::max(jlo, b.range_lo);
        const double yhi = std::min(jhi, b.range_hi);
        if (ylo >= yhi) continue;
        // levels at the range ends invert to the domain ends exactly
        auto invert = [&](double y) {
            if (y <= b.range_lo) return b.increasing ? l : r;
            if (y >= b.range_hi) return b.increasing ? r : l;
            return std::clamp(invert_branch(b, l, r, y), l, r);
        };
        const double a = b.increasing ? invert(ylo) : invert(yhi);
        const double c = b.increasing ? invert(yhi) : invert(ylo);
        if (c > a) out.push_back({a, c});
    }
    std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return out;
}

namespace {

Stability classify_derivative(double deriv) {
    if (std::abs(deriv - 1.0) < 1e-6) return Stability::neutral;
    return std::abs(deriv) < 1.0 ? Stability::stable : Stability::unstable;
}

double derivative_at(const PiecewiseMap& map, double p) {
    // override points get a one-sided difference from inside [0,1]
    for (const auto& [q, _] : map.point_overrides) {
        if (q == p) {
            const double h = 1e-7;
            if (p + h <= 1.0) return (eval(map, p + h) - eval(map, p)) / h;
            return (eval(map, p) - eval(map, p - h)) / h;
        }
    }
    return map.branches[map.branch_index(p)].derivative(p);
}

}  // namespace

FixedPointReport classify_fixed_points(const PiecewiseMap& map, int grid_resolution) {
    FixedPointReport report;
    std::vector<double> roots;
    auto push_root = [&](double x) {
        // candidates must be fixed under the actual map, overrides included
        if (std::abs(eval(map, x) - x) > 1e-8) return;
        for (double r : roots)
            if (std::abs(r - x) < 1e-9) return;
        roots.push_back(x);
    };

    // scan the continuous branch formulas; override points and breakpoints
    // are handled separately since the map value may jump there
    long near_fixed = 0;
    long total_grid = 0;
    for (std::size_t i = 0; i < map.branches.size(); ++i) {
        const Branch& b = map.branches[i];
        const double l = map.breakpoints[i];
        const double r = map.breakpoints[i + 1];
        auto g = [&](double x) { return b.value(x) - x; };
        const int cells = std::max(2, static_cast<int>(grid_resolution * (r - l)));
        double xa = l, ga = g(xa);
        for (int k = 1; k <= cells; ++k) {
            const double xb = l + (r - l) * k / cells;
            const double gb = g(xb);
            ++total_grid;
            if (std::abs(gb) < 1e-10) ++near_fixed;
            if (std::abs(ga) < 1e-12) push_root(xa);
            if (ga * gb < 0.0) {
                double lo = xa, hi = xb, glo = ga;
                while (hi - lo > 1e-10) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if (glo * gm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                push_root(0.5 * (lo + hi));
            }
            xa = xb;
            ga = gb;
        }
        if (std::abs(g(r)) < 1e-12) push_root(r);
    }
    std::vector<double> specials = map.breakpoints;
    for (const auto& [p, _] : map.point_overrides) specials.push_back(p);
    for (double p : specials)
        if (std::abs(eval(map, p) - p) < 1e-12) push_root(p);

    report.degenerate_continuum = near_fixed * 2 >= total_grid;
    if (report.degenerate_continuum) return report;  // no point enumerating a continuum
    std::sort(roots.begin(), roots.end());
    for (double x : roots) {
        const double d = derivative_at(map, x);
        report.points.push_back({x, classify_derivative(d), d});
    }
    return report;
}

CoverageReport transitivity_scan(const PiecewiseMap& map, const std::vector<double>& x0_samples,
                                 long n, double eps_net, std::uint64_t seed) {
    CoverageReport report;
    const long w = std::max<long>(1, static_cast<long>(std::ceil(1.0 / eps_net)));
    report.n_cells = w;
    auto cell_of = [&](double x) {
        long c = static_cast<long>(x * static_cast<double>(w));
        return std::clamp<long>(c, 0, w - 1);
    };

    std::vector<std::vector<char>> visited(x0_samples.size(), std::vector<char>(w, 0));
    std::vector<char> attractor(w, 0);
    for (std::size_t s = 0; s < x0_samples.size(); ++s) {
        Rng rng = Rng::stream(seed, s);
        double x = x0_samples[s];
        for (long k = 0; k < n; ++k) {
            const long c = cell_of(x);
            visited[s][c] = 1;
            if (k >= n / 2) attractor[c] = 1;
            x = eval_perturbed(map, x, rng);
        }
    }
    long attr_cells = 0;
    for (char a : attractor) attr_cells += a;
    report.attractor_cells = attr_cells;

    std::size_t best = 0;
    for (std::size_t s = 0; s < x0_samples.size(); ++s) {
        CoverageSample cs;
        cs.x0 = x0_samples[s];
        long vis = 0, vis_attr = 0;
        for (long c = 0; c < w; ++c) {
            vis += visited[s][c];
            if (attractor[c]) vis_attr += visited[s][c];
        }
        cs.cells_visited = vis;
        cs.coverage_of_interval = static_cast<double>(vis) / static_cast<double>(w);
        cs.coverage_of_attractor =
            attr_cells > 0 ? static_cast<double>(vis_attr) / static_cast<double>(attr_cells) : 0.0;
        if (cs.coverage_of_attractor >= report.max_coverage) {
            report.max_coverage = cs.coverage_of_attractor;
            best = s;
        }
        report.samples.push_back(cs);
    }
    if (!x0_samples.empty()) {
        report.best_x0 = x0_samples[best];
        Rng rng = Rng::stream(seed, best);
        double x = x0_samples[best];
        const long stride = std::max<long>(1, n / 1000);
        for (long k = 0; k < n; ++k) {
            if (k % stride == 0) report.covering_orbit.push_back(x);
            x = eval_perturbed(map, x, rng);
        }
    }
    return report;
}

}  // namespace mcdyn

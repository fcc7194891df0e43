#include "mcdyn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcdyn {

double CellDensity::mass_of(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    double out = 0.0;
    for (int i = 0; i < cells(); ++i) {
        const double a = std::max(lo, breaks[i]);
        const double b = std::min(hi, breaks[i + 1]);
        if (b > a) out += mass[i] * (b - a) / (breaks[i + 1] - breaks[i]);
    }
    return out;
}

CellDensity CellDensity::lebesgue(int w) {
    CellDensity d;
    d.breaks = Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0);
    d.mass = Eigen::VectorXd::Constant(w, 1.0 / w);
    return d;
}

CellDensity CellDensity::uniform_on(double lo, double hi, int w) {
    CellDensity d = lebesgue(w);
    for (int i = 0; i < w; ++i) {
        const double a = std::max(lo, d.breaks[i]);
        const double b = std::min(hi, d.breaks[i + 1]);
        d.mass[i] = std::max(0.0, b - a) / (hi - lo);
    }
    return d;
}

CellDensity CellDensity::from_breaks(Eigen::VectorXd breaks, Eigen::VectorXd mass) {
    if (breaks.size() != mass.size() + 1) throw Error("CellDensity: size mismatch");
    for (int i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1])) throw Error("CellDensity: breaks not increasing");
    if (mass.minCoeff() < -1e-12) throw Error("CellDensity: negative mass");
    return {std::move(breaks), std::move(mass)};
}

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<double> pts) {
    std::sort(pts.begin(), pts.end());
    EmpiricalMeasure m;
    std::vector<double> loc;
    std::vector<double> w;
    const double unit = 1.0 / static_cast<double>(pts.size());
    for (double p : pts) {
        if (!loc.empty() && loc.back() == p) {
            w.back() += unit;
        } else {
            loc.push_back(p);
            w.push_back(unit);
        }
    }
    m.location = Eigen::Map<Eigen::VectorXd>(loc.data(), static_cast<long>(loc.size()));
    m.weight = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<long>(w.size()));
    return m;
}

EmpiricalMeasure EmpiricalMeasure::single_atom(double x) {
    EmpiricalMeasure m;
    m.location = Eigen::VectorXd::Constant(1, x);
    m.weight = Eigen::VectorXd::Constant(1, 1.0);
    return m;
}

CellDensity histogram(const EmpiricalMeasure& m, int w) {
    CellDensity d;
    d.breaks = Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0);
    d.mass = Eigen::VectorXd::Zero(w);
    for (int i = 0; i < m.location.size(); ++i) {
        const int c = std::clamp(static_cast<int>(m.location[i] * w), 0, w - 1);
        d.mass[c] += m.weight[i];
    }
    return d;
}

namespace {

// CDF of either measure kind as a piecewise-linear function with jumps:
// nodes (x_k) with value just right of x_k; linear in between.
struct CdfNodes {
    std::vector<double> x;
    std::vector<double> f_right;  // CDF value at x_k^+
};

CdfNodes cdf_nodes(const Measure& m) {
    CdfNodes out;
    if (const auto* d = std::get_if<CellDensity>(&m)) {
        const double total = d->total();
        double acc = 0.0;
        out.x.push_back(d->breaks[0]);
        out.f_right.push_back(0.0);
        for (int i = 0; i < d->cells(); ++i) {
            acc += d->mass[i] / total;
            out.x.push_back(d->breaks[i + 1]);
            out.f_right.push_back(acc);
        }
    } else {
        const auto& e = std::get<EmpiricalMeasure>(m);
        const double total = e.weight.sum();
        double acc = 0.0;
        for (int i = 0; i < e.location.size(); ++i) {
            acc += e.weight[i] / total;
            out.x.push_back(e.location[i]);
            out.f_right.push_back(acc);
        }
    }
    return out;
}

}  // namespace

double w1_distance(const Measure& a, const Measure& b) {
    // merged two-pointer sweep; on each subsegment both CDFs are linear
    const CdfNodes na = cdf_nodes(a);
    const CdfNodes nb = cdf_nodes(b);
    const bool lin_a = std::holds_alternative<CellDensity>(a);
    const bool lin_b = std::holds_alternative<CellDensity>(b);

    // F right of xl and left of xr for the segment (xl, xr), which contains no
    // interior nodes of the measure; p = last node index with x <= xl (or -1)
    auto segment_values = [](const CdfNodes& n, bool linear, std::ptrdiff_t p, double xl, double xr,
                             double& fl, double& fr) {
        if (p < 0) {  // before the first node both limits are zero
            fl = fr = 0.0;
            return;
        }
        const std::size_t k = static_cast<std::size_t>(p);
        if (!linear || k + 1 >= n.x.size()) {
            fl = fr = n.f_right[k];
            return;
        }
        const double x0 = n.x[k], x1 = n.x[k + 1];
        const double f0 = n.f_right[k], f1 = n.f_right[k + 1];
        const double slope = (f1 - f0) / (x1 - x0);
        fl = f0 + slope * (xl - x0);
        fr = f0 + slope * (xr - x0);
    };

    double w1 = 0.0;
    double xl = 0.0;
    std::ptrdiff_t pa = -1, pb = -1;
    while (xl < 1.0) {
        while (pa + 1 < static_cast<std::ptrdiff_t>(na.x.size()) &&
               na.x[static_cast<std::size_t>(pa + 1)] <= xl)
            ++pa;
        while (pb + 1 < static_cast<std::ptrdiff_t>(nb.x.size()) &&
               nb.x[static_cast<std::size_t>(pb + 1)] <= xl)
            ++pb;
        double xr = 1.0;
        if (pa + 1 < static_cast<std::ptrdiff_t>(na.x.size()))
            xr = std::min(xr, na.x[static_cast<std::size_t>(pa + 1)]);
        if (pb + 1 < static_cast<std::ptrdiff_t>(nb.x.size()))
            xr = std::min(xr, nb.x[static_cast<std::size_t>(pb + 1)]);
        if (xr <= xl) {
            xl = std::nextafter(xl, 2.0);
            continue;
        }
        double fal, far, fbl, fbr;
        segment_values(na, lin_a, pa, xl, xr, fal, far);
        segment_values(nb, lin_b, pb, xl, xr, fbl, fbr);
        const double d0 = fal - fbl;
        const double d1 = far - fbr;
        const double h = xr - xl;
        if (d0 * d1 >= 0.0) {
            w1 += 0.5 * std::abs(d0 + d1) * h;
        } else {
            const double t = d0 / (d0 - d1);
            w1 += 0.5 * h * (std::abs(d0) * t + std::abs(d1) * (1.0 - t));
        }
        xl = xr;
    }
    return w1;
}

double w1_distance(const CellDensity& a, const CellDensity& b) {
    return w1_distance(Measure(a), Measure(b));
}

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return w1_distance(Measure(a), Measure(b));
}

namespace detail {

Eigen::SparseMatrix<double, Eigen::RowMajor> grid_transfer(const PiecewiseMap& map,
                                                           const Eigen::VectorXd& breaks) {
    const int w = static_cast<int>(breaks.size()) - 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(w) * 3);
    for (int j = 0; j < w; ++j) {
        const auto pre = branch_preimages(map, {breaks[j], breaks[j + 1]});
        for (const auto& iv : pre) {
            // spread the preimage interval over the source cells it meets
            auto lo_it = std::upper_bound(breaks.data(), breaks.data() + w + 1, iv.lo);
            int i = std::clamp(static_cast<int>(lo_it - breaks.data()) - 1, 0, w - 1);
            for (; i < w && breaks[i] < iv.hi; ++i) {
                const double a = std::max(iv.lo, breaks[i]);
                const double b = std::min(iv.hi, breaks[i + 1]);
                if (b > a)
                    trip.emplace_back(i, j, (b - a) / (breaks[i + 1] - breaks[i]));
            }
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> p(w, w);
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> grid_transfer_mc(const PiecewiseMap& map,
                                                              const Eigen::VectorXd& breaks,
                                                              long samples, std::uint64_t seed) {
    const int w = static_cast<int>(breaks.size()) - 1;
    const long per_cell = std::max<long>(8, samples / w);
    std::vector<Eigen::Triplet<double>> trip;
    auto cell_of = [&](double x) {
        auto it = std::upper_bound(breaks.data(), breaks.data() + w + 1, x);
        return std::clamp(static_cast<int>(it - breaks.data()) - 1, 0, w - 1);
    };
    for (int i = 0; i < w; ++i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        std::vector<long> hits(w, 0);
        for (long s = 0; s < per_cell; ++s) {
            // stratified: one jittered sample per subcell
            const double u = (static_cast<double>(s) + rng.next_double()) / static_cast<double>(per_cell);
            const double x = breaks[i] + u * (breaks[i + 1] - breaks[i]);
            ++hits[cell_of(eval(map, x))];
        }
        for (int j = 0; j < w; ++j)
            if (hits[j] > 0)
                trip.emplace_back(i, j, static_cast<double>(hits[j]) / static_cast<double>(per_cell));
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> p(w, w);
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

}  // namespace detail

CellDensity pushforward(const PiecewiseMap& map, const CellDensity& mu,
                        const Eigen::VectorXd& out_breaks) {
    const int w = static_cast<int>(out_breaks.size()) - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w);
    for (int j = 0; j < w; ++j) {
        const auto pre = branch_preimages(map, {out_breaks[j], out_breaks[j + 1]});
        double m = 0.0;
        for (const auto& iv : pre) m += mu.mass_of(iv.lo, iv.hi);
        out[j] = m;
    }
    CellDensity result;
    result.breaks = out_breaks;
    result.mass = std::move(out);
    return result;
}

CellDensity pushforward(const PiecewiseMap& map, const CellDensity& mu, int w) {
    return pushforward(map, mu, Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0));
}

CellDensity push_mc(const PiecewiseMap& map, const CellDensity& mu, int w, long samples,
                    std::uint64_t seed) {
    Rng rng(seed ^ 0xACEDBEEFull);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w);
    // inverse-CDF sampling from the piecewise-uniform measure
    Eigen::VectorXd cum(mu.cells() + 1);
    cum[0] = 0.0;
    for (int i = 0; i < mu.cells(); ++i) cum[i + 1] = cum[i] + mu.mass[i];
    const double total = cum[mu.cells()];
    for (long s = 0; s < samples; ++s) {
        const double u = rng.next_double() * total;
        auto it = std::upper_bound(cum.data(), cum.data() + mu.cells() + 1, u);
        const int i = std::clamp(static_cast<int>(it - cum.data()) - 1, 0, mu.cells() - 1);
        const double frac = (u - cum[i]) / std::max(1e-300, cum[i + 1] - cum[i]);
        const double x = mu.breaks[i] + frac * (mu.breaks[i + 1] - mu.breaks[i]);
        const double y = eval(map, std::clamp(x, 0.0, 1.0));
        const int j = std::clamp(static_cast<int>(y * w), 0, w - 1);
        out[j] += 1.0;
    }
    out *= total / static_cast<double>(samples);
    CellDensity result;
    result.breaks = Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0);
    result.mass = std::move(out);
    return result;
}

namespace {

std::vector<Atom> extract_atoms(const CellDensity& d) {
    std::vector<Atom> atoms;
    const int w = d.cells();
    for (int i = 0; i < w; ++i) {
        const double m = d.mass[i];
        if (m < 0.01) continue;
        const double left = i > 0 ? d.mass[i - 1] : 0.0;
        const double right = i + 1 < w ? d.mass[i + 1] : 0.0;
        if (m >= 10.0 * std::max(left, right))
            atoms.push_back({0.5 * (d.breaks[i] + d.breaks[i + 1]), m});
    }
    return atoms;
}

}  // namespace

MeasureEstimate cesaro_natural(const PiecewiseMap& map, const CellDensity& mu0, long n_steps,
                               int refinement) {
    const Eigen::VectorXd breaks = Eigen::VectorXd::LinSpaced(refinement + 1, 0.0, 1.0);
    // project mu0 onto the working grid
    Eigen::VectorXd v(refinement);
    for (int i = 0; i < refinement; ++i) v[i] = mu0.mass_of(breaks[i], breaks[i + 1]);

    Eigen::SparseMatrix<double, Eigen::RowMajor> p;
    if (map.all_branches_monotone()) {
        p = detail::grid_transfer(map, breaks);
    } else {
        p = detail::grid_transfer_mc(map, breaks, 1000000, 0);
    }
    const Eigen::SparseMatrix<double, Eigen::RowMajor> pt = p.transpose();

    // checkpoints at n/8, n/4, n/2, n; trace entry = dist(avg_c, avg_{c/2})
    std::vector<long> checkpoints;
    for (long c = std::max<long>(1, n_steps / 8); c < n_steps; c *= 2) checkpoints.push_back(c);
    checkpoints.push_back(n_steps);

    Eigen::VectorXd avg = Eigen::VectorXd::Zero(refinement);
    std::vector<std::pair<long, Eigen::VectorXd>> snapshots;
    std::size_t next_cp = 0;
    for (long k = 0; k < n_steps; ++k) {
        avg += v;
        v = pt * v;
        const long done = k + 1;
        if (next_cp < checkpoints.size() && done == checkpoints[next_cp]) {
            snapshots.emplace_back(done, avg / static_cast<double>(done));
            ++next_cp;
        }
    }
    MeasureEstimate est;
    for (std::size_t s = 1; s < snapshots.size(); ++s) {
        CellDensity cur{breaks, snapshots[s].second};
        CellDensity prev{breaks, snapshots[s - 1].second};
        est.convergence_trace.emplace_back(snapshots[s].first, w1_distance(cur, prev));
    }
    CellDensity full{breaks, avg / static_cast<double>(n_steps)};
    est.atom_summary = extract_atoms(full);
    est.representation = std::move(full);
    return est;
}

MeasureEstimate birkhoff(const PiecewiseMap& map, double x0, long n, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 0x0B1Bull);
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    std::vector<double> half_pts;
    double x = x0;
    for (long k = 0; k < n; ++k) {
        pts.push_back(x);
        x = eval_perturbed(map, x, rng);
    }
    half_pts.assign(pts.begin(), pts.begin() + static_cast<long>(n / 2));

    MeasureEstimate est;
    EmpiricalMeasure full = EmpiricalMeasure::from_points(std::move(pts));
    if (!half_pts.empty()) {
        EmpiricalMeasure half = EmpiricalMeasure::from_points(std::move(half_pts));
        est.convergence_trace.emplace_back(n, w1_distance(full, half));
    }
    // atom summary: weights concentrated within 1e-3 clusters
    std::vector<Atom> atoms;
    for (int i = 0; i < full.location.size(); ++i) {
        if (!atoms.empty() && full.location[i] - atoms.back().location < 1e-3) {
            atoms.back().weight += full.weight[i];
        } else {
            atoms.push_back({full.location[i], full.weight[i]});
        }
    }
    for (const Atom& a : atoms)
        if (a.weight >= 0.01) est.atom_summary.push_back(a);
    est.representation = std::move(full);
    return est;
}

OccupationTrace occupation_fraction(const PiecewiseMap& map, double x0, double lo, double hi,
                                    long n, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 0x0CC0ull);
    OccupationTrace out;
    out.tail_start = std::max<long>(1000, n / 1000);
    const long stride = std::max<long>(1, n / 10000);
    double x = x0;
    long count = 0;
    for (long k = 0; k < n; ++k) {
        if (x >= lo && x <= hi) ++count;
        const double a = static_cast<double>(count) / static_cast<double>(k + 1);
        if (k % stride == 0) out.trace.emplace_back(k, a);
        if (k >= out.tail_start) {
            out.tail_max = std::max(out.tail_max, a);
            out.tail_min = std::min(out.tail_min, a);
        }
        out.final_value = a;
        x = eval_perturbed(map, x, rng);
    }
    return out;
}

ErgodicityReport ergodicity_report(const PiecewiseMap& map, const MeasureEstimate& estimate,
                                   int n_probes, long probe_len, std::uint64_t seed) {
    ErgodicityReport report;
    const FixedPointReport fps = classify_fixed_points(map);
    report.degenerate_continuum = fps.degenerate_continuum;

    // weight carried near each fixed point (clusters from the atom summary)
    report.atom_clusters = estimate.atom_summary;
    if (!report.degenerate_continuum) {
        int heavy = 0;
        for (const FixedPoint& fp : fps.points) {
            double wsum = 0.0;
            for (const Atom& a : estimate.atom_summary)
                if (std::abs(a.location - fp.x) <= 2e-3) wsum += a.weight;
            if (wsum > 0.0) report.fixed_point_weights.emplace_back(fp.x, wsum);
            if (wsum >= 0.1) ++heavy;
        }
        report.non_ergodic_evidence = heavy >= 2;
    }

    // dispersion of Birkhoff averages of test observables across random starts
    double fmin[3], fmax[3];
    for (int f = 0; f < 3; ++f) {
        fmin[f] = 1e300;
        fmax[f] = -1e300;
    }
    for (int pidx = 0; pidx < n_probes; ++pidx) {
        Rng rng = Rng::stream(seed, 0xE9D0ull + static_cast<std::uint64_t>(pidx));
        double x = rng.next_double();
        double acc[3] = {0.0, 0.0, 0.0};
        for (long k = 0; k < probe_len; ++k) {
            acc[0] += x;
            acc[1] += x * x;
            acc[2] += std::sin(M_PI * x);
            x = eval_perturbed(map, x, rng);
        }
        for (int f = 0; f < 3; ++f) {
            const double avg = acc[f] / static_cast<double>(probe_len);
            fmin[f] = std::min(fmin[f], avg);
            fmax[f] = std::max(fmax[f], avg);
        }
    }
    for (int f = 0; f < 3; ++f)
        report.birkhoff_dispersion = std::max(report.birkhoff_dispersion, fmax[f] - fmin[f]);
    return report;
}

}  // namespace mcdyn

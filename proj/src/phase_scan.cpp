#include "mcdyn/phase_scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>

namespace mcdyn {

namespace {

struct TailSummary {
    bool resolved = false;
    AttractorClass classification = AttractorClass::other;
    int period = 1;
    Eigen::VectorXd mean;
    std::vector<LatticeState> tail;
};

TailSummary summarize_run(const LatticeSystem& system, LatticeState x, const CensusParams& p) {
    for (long k = 0; k < p.n_transient; ++k) x = lattice_step(system, x);
    TailSummary s;
    s.tail.reserve(static_cast<std::size_t>(p.n_tail));
    for (long k = 0; k < p.n_tail; ++k) {
        s.tail.push_back(x);
        x = lattice_step(system, x);
    }
    s.mean = Eigen::VectorXd::Zero(system.d);
    for (const auto& state : s.tail) s.mean += state;
    s.mean /= static_cast<double>(s.tail.size());

    auto max_shift = [&](long lag) {
        double m = 0.0;
        for (std::size_t t = 0; t + lag < s.tail.size(); ++t)
            m = std::max(m, (s.tail[t + lag] - s.tail[t]).cwiseAbs().maxCoeff());
        return m;
    };
    if (max_shift(1) <= p.merge_radius * 0.1) {
        s.resolved = true;
        s.classification = AttractorClass::fixed_point;
        s.period = 1;
        return s;
    }
    for (int per = 2; per <= p.period_max; ++per) {
        if (max_shift(per) <= p.merge_radius) {
            s.resolved = true;
            s.classification = AttractorClass::periodic;
            s.period = per;
            return s;
        }
    }
    return s;  // unresolved: oscillating tail with no short period
}

}  // namespace

AttractorCensus attractor_census(const LatticeSystem& system, const CensusParams& params) {
    AttractorCensus census;
    census.params = params;
    const int d = system.d;

    std::vector<LatticeState> seeds;
    if (params.corner_seeds && d <= 12) {
        for (long corner = 0; corner < (1L << d); ++corner) {
            LatticeState x(d);
            for (int i = 0; i < d; ++i)
                x[i] = ((corner >> i) & 1) ? 1.0 - 1e-6 : 1e-6;
            seeds.push_back(std::move(x));
        }
    }
    for (int s = 0; s < params.n_samples; ++s) {
        Rng rng = Rng::stream(params.seed, 0xCE05ull + static_cast<std::uint64_t>(s));
        LatticeState x(d);
        for (int i = 0; i < d; ++i) x[i] = rng.next_double();
        seeds.push_back(std::move(x));
    }
    census.total_seeds = static_cast<long>(seeds.size());

    std::vector<TailSummary> summaries(seeds.size());
    const int jobs = std::max(1, params.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            summaries[i] = summarize_run(system, seeds[i], params);
    } else {
        std::vector<std::future<void>> work;
        std::atomic<std::size_t> next{0};
        for (int j = 0; j < jobs; ++j) {
            work.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1))
                    summaries[i] = summarize_run(system, seeds[i], params);
            }));
        }
        for (auto& w : work) w.get();
    }

    // single-linkage merge of resolved summaries in max-coordinate distance
    std::vector<std::size_t> resolved_idx;
    for (std::size_t i = 0; i < summaries.size(); ++i)
        if (summaries[i].resolved) resolved_idx.push_back(i);

    std::vector<int> cluster(resolved_idx.size());
    std::iota(cluster.begin(), cluster.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (cluster[a] != a) a = cluster[a] = cluster[cluster[a]];
        return a;
    };
    for (std::size_t a = 0; a < resolved_idx.size(); ++a)
        for (std::size_t b = a + 1; b < resolved_idx.size(); ++b) {
            const double dist = (summaries[resolved_idx[a]].mean - summaries[resolved_idx[b]].mean)
                                    .cwiseAbs()
                                    .maxCoeff();
            if (dist <= params.merge_radius) cluster[find(static_cast<int>(b))] = find(static_cast<int>(a));
        }

    std::vector<int> roots;
    std::vector<long> members;
    for (std::size_t a = 0; a < resolved_idx.size(); ++a) {
        const int r = find(static_cast<int>(a));
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            members.push_back(1);
        } else {
            ++members[static_cast<std::size_t>(it - roots.begin())];
        }
    }
    for (std::size_t c = 0; c < roots.size(); ++c) {
        const TailSummary& rep = summaries[resolved_idx[static_cast<std::size_t>(roots[c])]];
        Attractor a;
        a.representative = rep.mean;
        a.basin_fraction = static_cast<double>(members[c]) / static_cast<double>(census.total_seeds);
        a.classification = rep.classification;
        a.period = rep.period;
        std::vector<int> sites(d);
        std::iota(sites.begin(), sites.end(), 0);
        a.site_occupation = project_marginals(rep.tail, sites);
        census.attractors.push_back(std::move(a));
    }
    census.unresolved_fraction =
        static_cast<double>(summaries.size() - resolved_idx.size()) /
        static_cast<double>(std::max<std::size_t>(1, summaries.size()));
    return census;
}

LatticeSystem ParamFamily::at(double gamma) const {
    LatticeSystem sys = base;
    if (param == Param::epsilon) {
        sys.coupling.epsilon = gamma;
    } else {
        sys.coupling.boundary = FixedBoundary{gamma};
    }
    sys.coupling.validate();
    return sys;
}

PhaseSweep phase_sweep(const ParamFamily& family, const std::vector<double>& gammas,
                       const CensusParams& params) {
    if (gammas.empty()) throw Error("phase_sweep: empty parameter grid");
    PhaseSweep sweep;
    for (double g : gammas) {
        AttractorCensus census = attractor_census(family.at(g), params);
        SweepPoint pt;
        pt.gamma = g;
        pt.attractor_count = census.count();
        pt.quality_ok = census.unresolved_fraction == 0.0;
        sweep.points.push_back(pt);
        sweep.censuses.push_back(std::move(census));
    }
    for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i) {
        if (sweep.points[i].attractor_count != sweep.points[i + 1].attractor_count) {
            sweep.transitions.push_back({sweep.points[i].gamma, sweep.points[i + 1].gamma,
                                         sweep.points[i].attractor_count,
                                         sweep.points[i + 1].attractor_count});
        }
    }
    return sweep;
}

namespace {

// particle cloud representing a product of uniform-on-interval marginals;
// common quantile grids between paired clouds keep per-site couplings
// comonotone, so empirical W1 between the pair is the true product-optimal cost
struct Cloud {
    std::vector<Eigen::VectorXd> particles;

    std::vector<EmpiricalMeasure> marginals(int n_sites) const {
        std::vector<EmpiricalMeasure> out;
        out.reserve(static_cast<std::size_t>(n_sites));
        for (int i = 0; i < n_sites; ++i) {
            std::vector<double> pts;
            pts.reserve(particles.size());
            for (const auto& p : particles) pts.push_back(p[i]);
            out.push_back(EmpiricalMeasure::from_points(std::move(pts)));
        }
        return out;
    }
};

struct ProductSupport {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

ProductSupport random_support(int d, Rng& rng) {
    ProductSupport s;
    s.lo.resize(d);
    s.hi.resize(d);
    for (int i = 0; i < d; ++i) {
        const double len = 0.05 + 0.2 * rng.next_double();
        const double a = (1.0 - len) * rng.next_double();
        s.lo[i] = a;
        s.hi[i] = a + len;
    }
    return s;
}

// quantile grid with a per-site seeded shuffle: marginals are stratified,
// cross-site pairing is randomized so the cloud samples the product measure
Cloud make_cloud(const ProductSupport& s, int n, std::uint64_t seed) {
    const int d = static_cast<int>(s.lo.size());
    std::vector<std::vector<int>> order(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        order[i].resize(static_cast<std::size_t>(n));
        std::iota(order[i].begin(), order[i].end(), 0);
        Rng rng = Rng::stream(seed, 0x0D0Eull + static_cast<std::uint64_t>(i));
        for (int k = n - 1; k > 0; --k)
            std::swap(order[i][static_cast<std::size_t>(k)],
                      order[i][rng.next_below(static_cast<std::uint64_t>(k + 1))]);
    }
    Cloud cloud;
    cloud.particles.resize(static_cast<std::size_t>(n), Eigen::VectorXd(d));
    for (int p = 0; p < n; ++p)
        for (int i = 0; i < d; ++i) {
            const double u = (order[i][static_cast<std::size_t>(p)] + 0.5) / n;
            cloud.particles[static_cast<std::size_t>(p)][i] = s.lo[i] + u * (s.hi[i] - s.lo[i]);
        }
    return cloud;
}

Cloud restrict_cloud(const Cloud& cloud, int n_sites) {
    Cloud out;
    out.particles.reserve(cloud.particles.size());
    for (const auto& p : cloud.particles) out.particles.push_back(p.head(n_sites));
    return out;
}

LatticeSystem subsystem(const LatticeSystem& system, int n_sites) {
    LatticeSystem sub = system;
    sub.d = n_sites;
    if (sub.local_maps.size() > 1)
        sub.local_maps.resize(static_cast<std::size_t>(n_sites));
    return sub;
}

}  // namespace

StabilityDiagnostics stability_diagnostics(const LatticeSystem& system,
                                           const std::vector<int>& window_sizes,
                                           int n_measure_pairs, std::uint64_t seed, int cloud_size,
                                           long phi_max_n) {
    StabilityDiagnostics diag;
    const int d = system.d;
    for (std::size_t i = 0; i + 1 < window_sizes.size(); ++i)
        if (window_sizes[i] >= window_sizes[i + 1] || window_sizes[i + 1] > d)
            throw Error("stability_diagnostics: windows must be nested within the system");

    std::vector<std::pair<Cloud, Cloud>> pairs;
    for (int q = 0; q < n_measure_pairs; ++q) {
        Rng rng = Rng::stream(seed, 0x5AB1ull + static_cast<std::uint64_t>(q));
        const ProductSupport sa = random_support(d, rng);
        const ProductSupport sb = random_support(d, rng);
        const std::uint64_t cloud_seed = seed * 1315423911ull + static_cast<std::uint64_t>(q);
        pairs.emplace_back(make_cloud(sa, cloud_size, cloud_seed),
                           make_cloud(sb, cloud_size, cloud_seed));
    }
    // adversarial pair concentrated near opposite corners: a uniform-quantifier
    // failure over initial measures shows up here first
    {
        ProductSupport lo_corner, hi_corner;
        lo_corner.lo = Eigen::VectorXd::Zero(d);
        lo_corner.hi = Eigen::VectorXd::Constant(d, 0.02);
        hi_corner.lo = Eigen::VectorXd::Constant(d, 0.98);
        hi_corner.hi = Eigen::VectorXd::Ones(d);
        const std::uint64_t cloud_seed = seed * 1315423911ull + 0xC04Eull;
        pairs.emplace_back(make_cloud(lo_corner, cloud_size, cloud_seed),
                           make_cloud(hi_corner, cloud_size, cloud_seed));
    }

    auto push_cloud = [](const Cloud& c, const LatticeSystem& sys, auto&& step_fn) {
        Cloud out;
        out.particles.reserve(c.particles.size());
        for (const auto& p : c.particles) out.particles.push_back(step_fn(sys, p));
        return out;
    };
    auto coupling_step = [](const LatticeSystem& sys, const LatticeState& x) {
        return apply_coupling(sys.coupling, x);
    };
    auto full_step = [](const LatticeSystem& sys, const LatticeState& x) {
        return lattice_step(sys, x);
    };

    for (const auto& [mu, nu] : pairs) {
        const double dist0 = product_metric(mu.marginals(d), nu.marginals(d));
        if (dist0 < 1e-6) {
            diag.small_sample_warning = true;
            continue;
        }
        const Cloud imu = push_cloud(mu, system, coupling_step);
        const Cloud inu = push_cloud(nu, system, coupling_step);
        diag.c_hat_interaction = std::max(
            diag.c_hat_interaction, product_metric(imu.marginals(d), inu.marginals(d)) / dist0);
        const Cloud tmu = push_cloud(mu, system, full_step);
        const Cloud tnu = push_cloud(nu, system, full_step);
        diag.c_hat_full =
            std::max(diag.c_hat_full, product_metric(tmu.marginals(d), tnu.marginals(d)) / dist0);
    }

    // psi: window-L push versus projected window-L' push of the same measure
    for (std::size_t wi = 0; wi + 1 < window_sizes.size(); ++wi) {
        const int l = window_sizes[wi];
        const int lp = window_sizes[wi + 1];
        const LatticeSystem sys_l = subsystem(system, l);
        const LatticeSystem sys_lp = subsystem(system, lp);
        double psi = 0.0;
        for (const auto& [mu, nu] : pairs) {
            for (const Cloud* c : {&mu, &nu}) {
                const Cloud small = push_cloud(restrict_cloud(*c, l), sys_l, full_step);
                const Cloud big = push_cloud(restrict_cloud(*c, lp), sys_lp, full_step);
                psi = std::max(psi,
                               product_metric(small.marginals(l), restrict_cloud(big, l).marginals(l)));
            }
        }
        diag.psi_by_window.emplace_back(l, psi);
    }

    // phi: n-step push against the census natural measure
    CensusParams cp;
    cp.seed = seed;
    cp.n_samples = 32;
    cp.n_transient = 5000;
    const AttractorCensus census = attractor_census(system, cp);
    if (!census.attractors.empty()) {
        const Attractor* top = &census.attractors[0];
        for (const auto& a : census.attractors)
            if (a.basin_fraction > top->basin_fraction) top = &a;

        std::vector<Cloud> clouds;
        for (const auto& [mu, nu] : pairs) {
            clouds.push_back(mu);
            clouds.push_back(nu);
        }
        for (long n = 1; n <= phi_max_n; n *= 2) diag.phi_by_n.emplace_back(n, 0.0);
        for (auto& cloud : clouds) {
            long done = 0;
            for (auto& [n, phi] : diag.phi_by_n) {
                for (; done < n; ++done) cloud = push_cloud(cloud, system, full_step);
                phi = std::max(phi, product_metric(cloud.marginals(d), top->site_occupation));
            }
        }
        if (!diag.phi_by_n.empty()) {
            const double first = diag.phi_by_n.front().second;
            const double last = diag.phi_by_n.back().second;
            diag.phi_nondecaying = last > std::max(0.05, 0.5 * first);
        }
    }
    return diag;
}

}  // namespace mcdyn

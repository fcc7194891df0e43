#include "mcdyn/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace mcdyn {

void CouplingSpec::validate() const {
    if (epsilon < 0.0 || epsilon > 1.0) throw Error("coupling strength outside [0,1]");
    if (weights.size() % 2 != 1) throw Error("coupling needs weights a_{-K}..a_{K}");
    if (weights.minCoeff() < 0.0) throw Error("negative coupling weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw Error("coupling weights must sum to 1");
    if (const auto* f = std::get_if<FixedBoundary>(&boundary))
        if (f->y < 0.0 || f->y > 1.0) throw Error("boundary value outside [0,1]");
}

CouplingSpec CouplingSpec::diffusive(double epsilon, Boundary boundary) {
    CouplingSpec spec;
    spec.epsilon = epsilon;
    spec.weights = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    spec.boundary = boundary;
    spec.validate();
    return spec;
}

LatticeSystem LatticeSystem::homogeneous(int d, PiecewiseMap map, CouplingSpec coupling,
                                         CompositionOrder order) {
    coupling.validate();
    LatticeSystem sys;
    sys.d = d;
    sys.local_maps.push_back(std::move(map));
    sys.coupling = std::move(coupling);
    sys.order = order;
    return sys;
}

namespace {

// neighbor lookup against a source vector with boundary handling
inline double neighbor(const Eigen::VectorXd& z, int i, int d, const Boundary& boundary) {
    if (i >= 0 && i < d) return z[i];
    if (const auto* f = std::get_if<FixedBoundary>(&boundary)) return f->y;
    int w = i % d;
    if (w < 0) w += d;
    return z[w];
}

// convex window average in deviation form: exact on constant windows
inline double couple_site(const CouplingSpec& spec, const Eigen::VectorXd& z, int i, int d) {
    const int k = spec.radius();
    const double self = z[i];
    double dev = 0.0;
    double wmin = self, wmax = self;
    for (int j = -k; j <= k; ++j) {
        const double nb = neighbor(z, i + j, d, spec.boundary);
        dev += spec.weights[j + k] * (nb - self);
        wmin = std::min(wmin, nb);
        wmax = std::max(wmax, nb);
    }
    return std::clamp(self + spec.epsilon * dev, wmin, wmax);
}

}  // namespace

LatticeState apply_coupling(const CouplingSpec& spec, const LatticeState& x) {
    const int d = static_cast<int>(x.size());
    LatticeState out(d);
    for (int i = 0; i < d; ++i) out[i] = couple_site(spec, x, i, d);
    return out;
}

LatticeState lattice_step(const LatticeSystem& system, const LatticeState& x, Rng* dither) {
    const int d = system.d;
    LatticeState out(d);
    if (system.order == CompositionOrder::interaction_after_map) {
        LatticeState z(d);
        for (int i = 0; i < d; ++i)
            z[i] = dither ? eval_perturbed(system.map_at(i), x[i], *dither)
                          : eval(system.map_at(i), x[i]);
        return apply_coupling(system.coupling, z);
    }
    // map_after_interaction: the local map acts on the site, the coupling term
    // reads the pre-map neighbor values
    const CouplingSpec& spec = system.coupling;
    const int k = spec.radius();
    for (int i = 0; i < d; ++i) {
        const double tx = dither ? eval_perturbed(system.map_at(i), x[i], *dither)
                                 : eval(system.map_at(i), x[i]);
        double nb_avg = 0.0;
        for (int j = -k; j <= k; ++j)
            nb_avg += spec.weights[j + k] * neighbor(x, i + j, d, spec.boundary);
        out[i] = std::clamp((1.0 - spec.epsilon) * tx + spec.epsilon * nb_avg, 0.0, 1.0);
    }
    return out;
}

DoubledSystem doubling_transform(const LatticeSystem& system) {
    if (system.order != CompositionOrder::map_after_interaction)
        throw Error("doubling_transform expects a map_after_interaction system");
    return DoubledSystem{system};
}

Eigen::VectorXd doubled_initial(const LatticeState& x0) {
    Eigen::VectorXd xy(2 * x0.size());
    xy.head(x0.size()) = x0;
    xy.tail(x0.size()) = x0;
    return xy;
}

Eigen::VectorXd doubled_step(const DoubledSystem& system, const Eigen::VectorXd& xy) {
    const LatticeSystem& base = system.base;
    const int d = base.d;
    // local pair map: (x_i, y_i) -> (T x_i, x_i)
    Eigen::VectorXd zx(d), zy(d);
    for (int i = 0; i < d; ++i) {
        zx[i] = eval(base.map_at(i), xy[i]);
        zy[i] = xy[i];
    }
    // interaction: both layers pull from the y-layer neighborhood
    const CouplingSpec& spec = base.coupling;
    const int k = spec.radius();
    Eigen::VectorXd out(2 * d);
    for (int i = 0; i < d; ++i) {
        double nb_avg = 0.0;
        for (int j = -k; j <= k; ++j)
            nb_avg += spec.weights[j + k] * neighbor(zy, i + j, d, spec.boundary);
        out[i] = std::clamp((1.0 - spec.epsilon) * zx[i] + spec.epsilon * nb_avg, 0.0, 1.0);
        out[d + i] = std::clamp((1.0 - spec.epsilon) * zy[i] + spec.epsilon * nb_avg, 0.0, 1.0);
    }
    return out;
}

std::vector<EmpiricalMeasure> project_marginals(const std::vector<LatticeState>& sample,
                                                const std::vector<int>& sites) {
    if (sample.empty()) throw Error("project_marginals: empty sample");
    std::vector<EmpiricalMeasure> out;
    out.reserve(sites.size());
    for (int s : sites) {
        std::vector<double> pts;
        pts.reserve(sample.size());
        for (const auto& state : sample) pts.push_back(state[s]);
        out.push_back(EmpiricalMeasure::from_points(std::move(pts)));
    }
    return out;
}

double product_metric(const std::vector<EmpiricalMeasure>& a,
                      const std::vector<EmpiricalMeasure>& b) {
    if (a.size() != b.size()) throw Error("product_metric: window size mismatch");
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dist = std::max(dist, w1_distance(a[i], b[i]));
    return dist;
}

}  // namespace mcdyn

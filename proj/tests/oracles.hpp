// Independent reference computations for tests. These deliberately avoid the
// library's own code paths wherever they check one.
#ifndef MCDYN_TESTS_ORACLES_HPP
#define MCDYN_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mcdyn/measure.hpp"
#include "mcdyn/piecewise_map.hpp"

namespace oracles {

// dense left action p -> p P, plain loops
inline Eigen::VectorXd vector_matrix(const Eigen::VectorXd& p, const Eigen::MatrixXd& m) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m.cols());
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) out[j] += p[i] * m(i, j);
    return out;
}

// stationary vector by dense balance solve: v (P - I) = 0, sum v = 1
inline Eigen::VectorXd balance_solve(const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(p.rows());
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    return a.fullPivLu().solve(b);
}

// Monte Carlo pushforward of a cell density: stratified quantile sampling of
// the source measure, points pushed through eval and histogrammed
inline mcdyn::CellDensity mc_pushforward(const mcdyn::PiecewiseMap& map,
                                         const mcdyn::CellDensity& mu, int w, long samples,
                                         std::uint64_t seed) {
    mcdyn::Rng rng(seed);
    Eigen::VectorXd cum(mu.cells() + 1);
    cum[0] = 0.0;
    for (int i = 0; i < mu.cells(); ++i) cum[i + 1] = cum[i] + mu.mass[i];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w);
    for (long s = 0; s < samples; ++s) {
        const double u = (s + rng.next_double()) / samples * cum[mu.cells()];
        int i = 0;
        while (i + 1 < mu.cells() && cum[i + 1] <= u) ++i;
        const double frac = (u - cum[i]) / (cum[i + 1] - cum[i]);
        const double x = mu.breaks[i] + frac * (mu.breaks[i + 1] - mu.breaks[i]);
        const double y = mcdyn::eval(map, x);
        int j = static_cast<int>(y * w);
        if (j >= w) j = w - 1;
        if (j < 0) j = 0;
        out[j] += 1.0;
    }
    out /= static_cast<double>(samples);
    mcdyn::CellDensity d;
    d.breaks = Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0);
    d.mass = out;
    return d;
}

// W1 by brute-force CDF quadrature on a fine grid
inline double w1_quadrature(const mcdyn::Measure& a, const mcdyn::Measure& b, int grid = 2000000) {
    auto cdf = [](const mcdyn::Measure& m, double x) {
        if (const auto* d = std::get_if<mcdyn::CellDensity>(&m)) {
            return d->mass_of(0.0, x) / d->total();
        }
        const auto& e = std::get<mcdyn::EmpiricalMeasure>(m);
        double acc = 0.0;
        for (int i = 0; i < e.location.size() && e.location[i] <= x; ++i) acc += e.weight[i];
        return acc / e.weight.sum();
    };
    double sum = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double x = (k + 0.5) / grid;
        sum += std::abs(cdf(a, x) - cdf(b, x));
    }
    return sum / grid;
}

}  // namespace oracles

#endif

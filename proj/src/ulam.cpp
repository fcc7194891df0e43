#include "mcdyn/ulam.hpp"

#include <algorithm>
#include <cmath>

namespace mcdyn {

UlamApproximation ulam_matrix(const PiecewiseMap& map, int w, UlamMethod method, long samples,
                              std::uint64_t seed) {
    if (w < 2) throw Error("ulam_matrix: need at least two cells");
    UlamApproximation out;
    out.breaks = Eigen::VectorXd::LinSpaced(w + 1, 0.0, 1.0);
    out.method = method;
    out.seed = seed;

    if (method == UlamMethod::exact_preimage && !map.all_branches_monotone()) {
        method = UlamMethod::monte_carlo;
        out.method = method;
        out.fell_back_to_mc = true;
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> p;
    if (method == UlamMethod::exact_preimage) {
        p = detail::grid_transfer(map, out.breaks);
    } else {
        out.mc_samples = samples;
        p = detail::grid_transfer_mc(map, out.breaks, samples, seed);
    }
    // renormalize rows; raw sums kept for the record
    out.raw_row_sums.resize(w);
    std::vector<std::tuple<int, int, double>> entries;
    for (int i = 0; i < w; ++i) {
        double sum = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p, i); it; ++it)
            sum += it.value();
        out.raw_row_sums[i] = sum;
        if (sum <= 0.0) throw InvalidChainError("ulam row " + std::to_string(i) + " is empty");
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p, i); it; ++it)
            entries.emplace_back(i, static_cast<int>(it.col()), it.value() / sum);
    }
    out.matrix = StochasticMatrix::from_triplets(w, entries);
    return out;
}

namespace {

Eigen::VectorXd power_iterate(const Eigen::SparseMatrix<double, Eigen::RowMajor>& pt,
                              Eigen::VectorXd v, double tol, int max_iter, int& iters,
                              double& residual) {
    for (iters = 0; iters < max_iter; ++iters) {
        Eigen::VectorXd next = pt * v;
        next /= next.sum();
        residual = (pt * next - next).cwiseAbs().sum();
        v = std::move(next);
        if (residual < tol) return v;
    }
    residual = (pt * v - v).cwiseAbs().sum();
    return v;
}

}  // namespace

Eigen::VectorXd stationary(const StochasticMatrix& chain, double tol, int max_iter,
                           StationaryReport* report, std::uint64_t seed) {
    const int n = chain.n;
    const Eigen::SparseMatrix<double, Eigen::RowMajor> pt = chain.p.transpose();

    int iters = 0;
    double residual = 0.0;
    Eigen::VectorXd v =
        power_iterate(pt, Eigen::VectorXd::Constant(n, 1.0 / n), tol, max_iter, iters, residual);
    if (residual >= tol)
        throw ConvergenceError("stationary: power iteration stalled at residual " +
                                   std::to_string(residual) + " after " +
                                   std::to_string(max_iter) + " iterations",
                               residual);

    StationaryReport rep;
    rep.iterations = iters;
    rep.residual = residual;

    // probe uniqueness with seeded simplex restarts
    double dispersion = 0.0;
    for (int r = 0; r < 20; ++r) {
        Rng rng = Rng::stream(seed, 0x57A7ull + static_cast<std::uint64_t>(r));
        Eigen::VectorXd start(n);
        for (int i = 0; i < n; ++i) start[i] = -std::log(1.0 - rng.next_double());
        start /= start.sum();
        int it2 = 0;
        double res2 = 0.0;
        Eigen::VectorXd u = power_iterate(pt, std::move(start), tol, max_iter, it2, res2);
        if (res2 < tol) dispersion = std::max(dispersion, (u - v).cwiseAbs().sum());
    }
    rep.restart_dispersion = dispersion;
    rep.unique = dispersion <= 10.0 * tol;
    if (report) *report = rep;
    return v;
}

InvariantDensityResult ulam_invariant_density(const PiecewiseMap& map, int w, UlamMethod method,
                                              double tol) {
    InvariantDensityResult out;
    out.approximation = ulam_matrix(map, w, method);
    Eigen::VectorXd v = stationary(out.approximation.matrix, tol, 200000, &out.report);
    if (!out.report.unique) v = Eigen::VectorXd::Constant(w, 1.0 / w);
    out.density = CellDensity{out.approximation.breaks, std::move(v)};
    return out;
}

std::vector<RefinementPoint> ulam_refinement_study(const PiecewiseMap& map,
                                                   const std::vector<int>& resolutions,
                                                   const CellDensity& reference) {
    std::vector<RefinementPoint> out;
    for (int w : resolutions) {
        const auto inv = ulam_invariant_density(map, w);
        out.push_back({w, w1_distance(inv.density, reference)});
    }
    return out;
}

}  // namespace mcdyn

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcdyn/ulam.hpp"
#include "oracles.hpp"

using namespace mcdyn;

TEST_CASE("ulam matrix of the doubling map") {
    const UlamApproximation ap = ulam_matrix(catalog_map("doubling"), 4);
    const Eigen::MatrixXd dense = ap.matrix.dense();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool hit = j == (2 * i) % 4 || j == (2 * i + 1) % 4;
            CHECK(dense(i, j) == doctest::Approx(hit ? 0.5 : 0.0).epsilon(1e-12));
        }
}

TEST_CASE("ulam matrix of the identity is the identity") {
    const UlamApproximation ap = ulam_matrix(identity_map(), 16);
    const Eigen::MatrixXd dense = ap.matrix.dense();
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            CHECK(dense(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("exact and stratified Monte Carlo rows agree") {
    for (const char* name : {"doubling", "inoue", "del_magno", "cubic_pitchfork", "shrink_jump"}) {
        const PiecewiseMap map = catalog_map(name);
        for (int w : {16, 64}) {
            const Eigen::MatrixXd a = ulam_matrix(map, w).matrix.dense();
            const Eigen::MatrixXd b =
                ulam_matrix(map, w, UlamMethod::monte_carlo, 1000000, 7).matrix.dense();
            CHECK((a - b).cwiseAbs().maxCoeff() < 5e-3);
        }
    }
}

TEST_CASE("markov model round-trip: ulam on the refined partition is the model matrix") {
    const StochasticMatrix p = StochasticMatrix::from_triplets(3, {{0, 0, 0.5},
                                                                   {0, 1, 0.5},
                                                                   {1, 1, 0.5},
                                                                   {1, 2, 0.5},
                                                                   {2, 0, 0.5},
                                                                   {2, 2, 0.5}});
    const MarkovMapModel model = build_markov_map(p);
    // transfer matrix on the refined partition, lumped by state, equals P
    const auto transfer = detail::grid_transfer(model.map, model.refined_breaks);
    Eigen::MatrixXd lumped = Eigen::MatrixXd::Zero(3, 3);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(transfer);
    for (int i = 0; i < model.cell_count(); ++i)
        for (int j = 0; j < model.cell_count(); ++j) {
            const double cell_len = model.refined_breaks[i + 1] - model.refined_breaks[i];
            const double base_len = model.base_breaks[model.cell_state[i] + 1] -
                                    model.base_breaks[model.cell_state[i]];
            lumped(model.cell_state[i], model.cell_state[j]) += dense(i, j) * cell_len / base_len;
        }
    CHECK((lumped - p.dense()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stationary vectors") {
    SUBCASE("three-state chain is doubly stochastic") {
        const StochasticMatrix p = StochasticMatrix::from_triplets(3, {{0, 0, 0.5},
                                                                       {0, 1, 0.5},
                                                                       {1, 1, 0.5},
                                                                       {1, 2, 0.5},
                                                                       {2, 0, 0.5},
                                                                       {2, 2, 0.5}});
        StationaryReport rep;
        const Eigen::VectorXd v = stationary(p, 1e-12, 100000, &rep);
        for (int i = 0; i < 3; ++i) CHECK(v[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
        CHECK(rep.unique);
        // cross-check with the dense balance solve
        const Eigen::VectorXd direct = oracles::balance_solve(p.dense());
        CHECK((v - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("identity matrix is flagged non-unique") {
        const StochasticMatrix p = StochasticMatrix::from_triplets(3, {{0, 0, 1.0},
                                                                       {1, 1, 1.0},
                                                                       {2, 2, 1.0}});
        StationaryReport rep;
        stationary(p, 1e-12, 1000, &rep);
        CHECK_FALSE(rep.unique);
    }
    SUBCASE("residual contract holds on return") {
        Rng rng(3);
        for (int repn = 0; repn < 10; ++repn) {
            const int n = 2 + static_cast<int>(rng.next_below(30));
            std::vector<std::tuple<int, int, double>> entries;
            for (int i = 0; i < n; ++i) {
                Eigen::Vector3d w(0.1 + rng.next_double(), 0.1 + rng.next_double(),
                                  0.1 + rng.next_double());
                w /= w.sum();
                w[2] = 1.0 - w[0] - w[1];
                for (int k = 0; k < 3; ++k)
                    entries.emplace_back(i, static_cast<int>((i + k) % n), w[k]);
            }
            const StochasticMatrix p = StochasticMatrix::from_triplets(n, entries);
            const Eigen::VectorXd v = stationary(p, 1e-12, 200000);
            CHECK((p.apply_left(v) - v).cwiseAbs().sum() < 1e-12);
        }
    }
}

TEST_CASE("ulam invariant densities") {
    SUBCASE("doubling at W=64 is uniform") {
        const auto inv = ulam_invariant_density(catalog_map("doubling"), 64);
        CHECK(w1_distance(inv.density, CellDensity::lebesgue(64)) < 1e-10);
    }
    SUBCASE("identity is flagged and left uniform") {
        const auto inv = ulam_invariant_density(identity_map(), 16);
        CHECK_FALSE(inv.report.unique);
        for (int i = 0; i < 16; ++i) CHECK(inv.density.mass[i] == doctest::Approx(1.0 / 16));
    }
    SUBCASE("markov model map: lumped stationary density matches the chain") {
        const StochasticMatrix p = StochasticMatrix::from_triplets(3, {{0, 0, 0.5},
                                                                       {0, 1, 0.5},
                                                                       {1, 1, 0.5},
                                                                       {1, 2, 0.5},
                                                                       {2, 0, 0.5},
                                                                       {2, 2, 0.5}});
        const MarkovMapModel model = build_markov_map(p);
        // transfer chain on the model's own refined partition
        const auto transfer = detail::grid_transfer(model.map, model.refined_breaks);
        std::vector<std::tuple<int, int, double>> entries;
        for (int i = 0; i < model.cell_count(); ++i)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(transfer, i); it;
                 ++it)
                entries.emplace_back(i, static_cast<int>(it.col()), it.value());
        const StochasticMatrix refined_chain =
            StochasticMatrix::from_triplets(model.cell_count(), entries);
        const Eigen::VectorXd cell_pi = stationary(refined_chain);
        Eigen::VectorXd lumped = Eigen::VectorXd::Zero(3);
        for (int c = 0; c < model.cell_count(); ++c) lumped[model.cell_state[c]] += cell_pi[c];
        const Eigen::VectorXd chain_pi = stationary(p);
        CHECK((lumped - chain_pi).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("refinement study on the doubling map stays flat at machine level") {
    const auto study = ulam_refinement_study(catalog_map("doubling"), {16, 32, 64, 128, 256},
                                             CellDensity::lebesgue(4));
    for (std::size_t k = 0; k + 1 < study.size(); ++k)
        CHECK(study[k + 1].w1_to_reference <= study[k].w1_to_reference + 1e-9);
    CHECK(study.back().w1_to_reference < 1e-10);
}

TEST_CASE("non-monotone map falls back to the Monte Carlo method") {
    PiecewiseMap flat;
    flat.breakpoints = {0.0, 0.5, 1.0};
    flat.branches = {{.kind = BranchKind::affine, .slope = 0.0, .intercept = 0.75},
                     {.kind = BranchKind::affine, .slope = 1.0, .intercept = 0.0}};
    finalize_map(flat);
    const UlamApproximation ap = ulam_matrix(flat, 8, UlamMethod::exact_preimage, 10000, 3);
    CHECK(ap.fell_back_to_mc);
    CHECK(ap.method == UlamMethod::monte_carlo);
    // row sums renormalized to one
    const Eigen::MatrixXd dense = ap.matrix.dense();
    for (int i = 0; i < 8; ++i) CHECK(dense.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

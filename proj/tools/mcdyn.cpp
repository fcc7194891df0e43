// mcdyn — interval maps, Markov-chain interval models, Ulam approximation,
// coupled lattices and attractor scans, from one reproducible command line.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mcdyn/io.hpp"
#include "mcdyn/lattice.hpp"
#include "mcdyn/markov_model.hpp"
#include "mcdyn/measure.hpp"
#include "mcdyn/pca.hpp"
#include "mcdyn/phase_scan.hpp"
#include "mcdyn/piecewise_map.hpp"
#include "mcdyn/ulam.hpp"

namespace fs = std::filesystem;
using namespace mcdyn;

namespace {

// resolved run configuration, echoed verbatim into the manifest; the artifact
// names carry a hash of it so reruns overwrite their own outputs
class Manifest {
public:
    Manifest(std::string subcommand, std::string out_dir)
        : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
        set("subcommand", subcommand_);
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set(const std::string& key, double value) { kv_[key] = format_double(value); }
    void set(const std::string& key, long value) { kv_[key] = std::to_string(value); }
    void set(const std::string& key, int value) { kv_[key] = std::to_string(value); }

    std::string body() const {
        std::ostringstream os;
        for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
        return os.str();
    }

    std::string hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : body()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    fs::path artifact(const std::string& stem_suffix) const {
        return fs::path(out_dir_) / (subcommand_ + "-" + hash() + stem_suffix);
    }

    void write() const {
        fs::create_directories(out_dir_);
        std::ofstream out(artifact(".manifest.txt"));
        out << body();
        for (const auto& note : notes_) out << "note: " << note << "\n";
    }

    void note(const std::string& line) { notes_.push_back(line); }

private:
    std::string subcommand_;
    std::string out_dir_;
    std::map<std::string, std::string> kv_;
    std::vector<std::string> notes_;
};

std::ofstream open_artifact(const Manifest& man, const std::string& suffix) {
    fs::create_directories(man.artifact(suffix).parent_path());
    std::ofstream out(man.artifact(suffix));
    if (!out) throw Error("cannot write " + man.artifact(suffix).string());
    std::cout << man.artifact(suffix).string() << "\n";
    return out;
}

Boundary parse_boundary(const std::string& text) {
    if (text == "periodic") return PeriodicBoundary{};
    if (text.rfind("fixed:", 0) == 0) return FixedBoundary{std::stod(text.substr(6))};
    throw CLI::ValidationError("--boundary", "expected 'periodic' or 'fixed:<y>'");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

LatticeSystem make_lattice(const std::string& map_name, int d, double eps,
                           const std::string& boundary, const std::string& order) {
    const CompositionOrder ord = order == "map-after-interaction"
                                     ? CompositionOrder::map_after_interaction
                                     : CompositionOrder::interaction_after_map;
    return LatticeSystem::homogeneous(d, resolve_map(map_name),
                                      CouplingSpec::diffusive(eps, parse_boundary(boundary)), ord);
}

// standalone census rows carry classification and period; sweep rows use the
// shared `gamma, attractor_id, basin_fraction, representative_coords...` layout
void write_census_csv(std::ostream& out, const AttractorCensus& census, double gamma,
                      bool with_gamma, bool header) {
    if (header) {
        if (with_gamma) {
            out << "gamma, attractor_id, basin_fraction, representative_coords...\n";
        } else {
            out << "attractor_id, basin_fraction, classification, period, "
                   "representative_coords...\n";
        }
    }
    for (int a = 0; a < census.count(); ++a) {
        const Attractor& at = census.attractors[a];
        if (with_gamma) {
            out << format_double(gamma) << ", " << a << ", "
                << format_double(at.basin_fraction);
        } else {
            out << a << ", " << format_double(at.basin_fraction) << ", "
                << (at.classification == AttractorClass::fixed_point
                        ? "fixed"
                        : at.classification == AttractorClass::periodic ? "periodic" : "other")
                << ", " << at.period;
        }
        for (int i = 0; i < at.representative.size(); ++i)
            out << ", " << format_double(at.representative[i]);
        out << "\n";
    }
}

int run_app(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computational dynamics workbench: interval maps, deterministic models of Markov "
                 "chains, Ulam approximation, coupled map lattices and phase scans"};
    try {
        return run_app(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit 0, every parse problem exits 1
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

namespace {

int run_app(CLI::App& app, int argc, char** argv) {
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags take precedence)");

    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    app.add_option("--out", out_dir, "output directory")->envname("MCDYN_OUT")->capture_default_str();
    app.add_option("--seed", seed, "base seed for every stochastic stage")->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for census/sweep")->capture_default_str();

    // ---- build-map ----------------------------------------------------------
    auto* cmd_build = app.add_subcommand("build-map", "compile a transition matrix into a "
                                                      "piecewise-linear interval model");
    std::string build_matrix, walk_kind;
    double walk_pl = 0.0, walk_pr = 0.0;
    int walk_m = 16;
    cmd_build->add_option("--matrix", build_matrix, "matrix file: N line, then `row col prob`");
    cmd_build->add_option("--walk", walk_kind, "random walk model instead: homogeneous");
    cmd_build->add_option("--p-left", walk_pl, "walk left probability");
    cmd_build->add_option("--p-right", walk_pr, "walk right probability");
    cmd_build->add_option("--truncation", walk_m, "walk state truncation")->capture_default_str();

    // ---- verify-map ---------------------------------------------------------
    auto* cmd_verify = app.add_subcommand("verify-map", "check the Markov property of a compiled model");
    std::string verify_matrix;
    cmd_verify->add_option("--matrix", verify_matrix, "matrix file")->required();

    // ---- natural-measure ----------------------------------------------------
    auto* cmd_nat = app.add_subcommand("natural-measure",
                                       "Cesaro average of density pushforwards from Lebesgue");
    std::string nat_map;
    long nat_n = 10000;
    int nat_w = 2000;
    cmd_nat->add_option("--map", nat_map, "catalog name or map-table file")->required();
    cmd_nat->add_option("--n", nat_n, "number of averaged steps")->capture_default_str();
    cmd_nat->add_option("--W", nat_w, "grid resolution")->capture_default_str();

    // ---- birkhoff -----------------------------------------------------------
    auto* cmd_birk = app.add_subcommand("birkhoff", "orbit occupation measure");
    std::string birk_map;
    double birk_x0 = 0.5;
    long birk_n = 1000000;
    cmd_birk->add_option("--map", birk_map)->required();
    cmd_birk->add_option("--x0", birk_x0, "starting point")->capture_default_str();
    cmd_birk->add_option("--n", birk_n, "orbit length")->capture_default_str();

    // ---- occupation ---------------------------------------------------------
    auto* cmd_occ = app.add_subcommand("occupation", "running occupation fraction of an interval");
    std::string occ_map;
    double occ_x0 = 0.37, occ_lo = 0.0, occ_hi = 0.05;
    long occ_n = 1000000;
    cmd_occ->add_option("--map", occ_map)->required();
    cmd_occ->add_option("--x0", occ_x0)->capture_default_str();
    cmd_occ->add_option("--lo", occ_lo)->capture_default_str();
    cmd_occ->add_option("--hi", occ_hi)->capture_default_str();
    cmd_occ->add_option("--n", occ_n)->capture_default_str();

    // ---- ulam ---------------------------------------------------------------
    auto* cmd_ulam = app.add_subcommand("ulam", "finite-chain approximation and its stationary density");
    std::string ulam_map, ulam_method = "exact", ulam_refine;
    int ulam_w = 64;
    long ulam_samples = 1000000;
    double ulam_tol = 1e-12;
    cmd_ulam->add_option("--map", ulam_map)->required();
    cmd_ulam->add_option("--W", ulam_w, "cells")->capture_default_str();
    cmd_ulam->add_option("--method", ulam_method, "exact | mc")->capture_default_str();
    cmd_ulam->add_option("--samples", ulam_samples, "Monte Carlo samples")->capture_default_str();
    cmd_ulam->add_option("--tol", ulam_tol, "stationary residual target")->capture_default_str();
    cmd_ulam->add_option("--refine", ulam_refine, "comma list of W values for a refinement study");

    // ---- lattice-run --------------------------------------------------------
    auto* cmd_lat = app.add_subcommand("lattice-run", "trajectory of a coupled lattice");
    std::string lat_map, lat_boundary = "periodic", lat_order = "interaction-after-map", lat_x0;
    int lat_d = 8;
    double lat_eps = 0.1;
    long lat_steps = 1000;
    bool lat_noise = false;
    cmd_lat->add_option("--map", lat_map)->required();
    cmd_lat->add_option("--d", lat_d, "sites")->capture_default_str();
    cmd_lat->add_option("--eps", lat_eps, "coupling strength")->capture_default_str();
    cmd_lat->add_option("--boundary", lat_boundary, "periodic | fixed:<y>")->capture_default_str();
    cmd_lat->add_option("--order", lat_order, "interaction-after-map | map-after-interaction")
        ->capture_default_str();
    cmd_lat->add_option("--steps", lat_steps)->capture_default_str();
    cmd_lat->add_option("--x0", lat_x0, "comma list of initial coordinates (default seeded)");
    cmd_lat->add_flag("--noise", lat_noise, "orbit noise on the local maps");

    // ---- doubling-check -----------------------------------------------------
    auto* cmd_dbl = app.add_subcommand("doubling-check",
                                       "delayed-copy equivalence of a map-after-interaction system");
    std::string dbl_map, dbl_boundary = "periodic";
    int dbl_d = 4, dbl_seeds = 20;
    double dbl_eps = 0.1;
    long dbl_steps = 1000;
    cmd_dbl->add_option("--map", dbl_map)->required();
    cmd_dbl->add_option("--d", dbl_d)->capture_default_str();
    cmd_dbl->add_option("--eps", dbl_eps)->capture_default_str();
    cmd_dbl->add_option("--boundary", dbl_boundary)->capture_default_str();
    cmd_dbl->add_option("--steps", dbl_steps)->capture_default_str();
    cmd_dbl->add_option("--seeds", dbl_seeds)->capture_default_str();

    // ---- census -------------------------------------------------------------
    auto* cmd_census = app.add_subcommand("census", "attractor census of a coupled lattice");
    std::string cen_map = "cubic_pitchfork", cen_boundary = "fixed:0";
    int cen_d = 3, cen_samples = 64;
    double cen_eps = 0.05, cen_merge = 1e-4;
    long cen_transient = 20000, cen_tail = 256;
    cmd_census->add_option("--map", cen_map)->capture_default_str();
    cmd_census->add_option("--d", cen_d)->capture_default_str();
    cmd_census->add_option("--eps", cen_eps)->capture_default_str();
    cmd_census->add_option("--boundary", cen_boundary)->capture_default_str();
    cmd_census->add_option("--transient", cen_transient)->capture_default_str();
    cmd_census->add_option("--tail", cen_tail)->capture_default_str();
    cmd_census->add_option("--samples", cen_samples)->capture_default_str();
    cmd_census->add_option("--merge-radius", cen_merge)->capture_default_str();

    // ---- sweep --------------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "attractor counts along a parameter grid");
    std::string sw_map = "cubic_pitchfork", sw_boundary = "fixed:0", sw_param = "boundary-y",
                sw_grid = "0,1";
    int sw_d = 3, sw_samples = 64;
    double sw_eps = 0.05, sw_merge = 1e-4;
    long sw_transient = 20000, sw_tail = 256;
    cmd_sweep->add_option("--map", sw_map)->capture_default_str();
    cmd_sweep->add_option("--d", sw_d)->capture_default_str();
    cmd_sweep->add_option("--eps", sw_eps)->capture_default_str();
    cmd_sweep->add_option("--boundary", sw_boundary)->capture_default_str();
    cmd_sweep->add_option("--param", sw_param, "boundary-y | epsilon")->capture_default_str();
    cmd_sweep->add_option("--grid", sw_grid, "comma list of parameter values")->capture_default_str();
    cmd_sweep->add_option("--transient", sw_transient)->capture_default_str();
    cmd_sweep->add_option("--tail", sw_tail)->capture_default_str();
    cmd_sweep->add_option("--samples", sw_samples)->capture_default_str();
    cmd_sweep->add_option("--merge-radius", sw_merge)->capture_default_str();

    // ---- stability ----------------------------------------------------------
    auto* cmd_stab = app.add_subcommand("stability", "contraction/consistency diagnostics");
    std::string stab_map = "cubic_pitchfork", stab_boundary = "periodic", stab_windows = "2,4";
    int stab_d = 4, stab_pairs = 8, stab_cloud = 512;
    double stab_eps = 0.05;
    long stab_phi_n = 64;
    cmd_stab->add_option("--map", stab_map)->capture_default_str();
    cmd_stab->add_option("--d", stab_d)->capture_default_str();
    cmd_stab->add_option("--eps", stab_eps)->capture_default_str();
    cmd_stab->add_option("--boundary", stab_boundary)->capture_default_str();
    cmd_stab->add_option("--windows", stab_windows, "nested window sizes")->capture_default_str();
    cmd_stab->add_option("--pairs", stab_pairs)->capture_default_str();
    cmd_stab->add_option("--cloud", stab_cloud, "particles per measure")->capture_default_str();
    cmd_stab->add_option("--phi-n", stab_phi_n, "largest push horizon")->capture_default_str();

    // ---- pca-compile --------------------------------------------------------
    auto* cmd_pcac = app.add_subcommand("pca-compile",
                                        "per-vertex interval models of a probabilistic automaton");
    std::string pcac_spec;
    cmd_pcac->add_option("--spec", pcac_spec, "automaton description file")->required();

    // ---- pca-equiv ----------------------------------------------------------
    auto* cmd_pcae = app.add_subcommand("pca-equiv",
                                        "distribution divergence between automaton and compiled model");
    std::string pcae_spec;
    int pcae_horizon = 50;
    long pcae_runs = 100000;
    bool pcae_exact = false;
    cmd_pcae->add_option("--spec", pcae_spec)->required();
    cmd_pcae->add_option("--horizon", pcae_horizon)->capture_default_str();
    cmd_pcae->add_option("--runs", pcae_runs)->capture_default_str();
    cmd_pcae->add_flag("--exact", pcae_exact, "enumerate the joint chain instead of sampling");

    app.parse(argc, argv);

    if (cmd_build->parsed()) {
        Manifest man("build-map", out_dir);
        man.set("seed", static_cast<long>(seed));
        MarkovMapModel model;
        if (!build_matrix.empty()) {
            man.set("matrix", build_matrix);
            model = build_markov_map(load_matrix_file(build_matrix));
        } else if (walk_kind == "homogeneous") {
            man.set("walk", walk_kind);
            man.set("p_left", walk_pl);
            man.set("p_right", walk_pr);
            man.set("truncation", walk_m);
            RandomWalkSpec spec;
            spec.kind = WalkKind::homogeneous;
            spec.p_left = walk_pl;
            spec.p_right = walk_pr;
            model = build_random_walk_map(spec, walk_m).model;
        } else {
            throw CLI::ValidationError("build-map", "need --matrix or --walk homogeneous");
        }
        for (const auto& w : model.warnings) man.note(w);
        man.write();
        auto table = open_artifact(man, ".map.csv");
        save_map_table(table, merged_map(model));
        auto cells = open_artifact(man, ".cells.csv");
        cells << "cell, left, right, state, target\n";
        for (int c = 0; c < model.cell_count(); ++c)
            cells << c << ", " << format_double(model.refined_breaks[c]) << ", "
                  << format_double(model.refined_breaks[c + 1]) << ", " << model.cell_state[c]
                  << ", " << model.cell_target[c] << "\n";
        return 0;
    }

    if (cmd_verify->parsed()) {
        Manifest man("verify-map", out_dir);
        man.set("matrix", verify_matrix);
        const MarkovMapModel model = build_markov_map(load_matrix_file(verify_matrix));
        const MarkovVerifyReport rep = verify_markov(model);
        man.set("ok", rep.ok ? "true" : "false");
        man.set("max_endpoint_error", rep.max_endpoint_error);
        man.write();
        auto out = open_artifact(man, ".csv");
        out << "field, value\n";
        out << "ok, " << (rep.ok ? 1 : 0) << "\n";
        out << "cell_count, " << model.cell_count() << "\n";
        out << "cell_bound_ok, " << (rep.cell_bound_ok ? 1 : 0) << "\n";
        out << "max_endpoint_error, " << format_double(rep.max_endpoint_error) << "\n";
        for (const auto& v : rep.violations) out << "violation, " << v << "\n";
        std::cout << (rep.ok ? "markov property holds\n" : "markov property violated\n");
        return 0;
    }

    if (cmd_nat->parsed()) {
        Manifest man("natural-measure", out_dir);
        man.set("map", nat_map);
        man.set("n", nat_n);
        man.set("W", nat_w);
        man.write();
        const auto est = cesaro_natural(resolve_map(nat_map), CellDensity::lebesgue(nat_w), nat_n,
                                        nat_w);
        auto out = open_artifact(man, ".csv");
        save_measure_csv(out, est);
        auto trace = open_artifact(man, ".trace.csv");
        save_trace_csv(trace, est.convergence_trace);
        return 0;
    }

    if (cmd_birk->parsed()) {
        Manifest man("birkhoff", out_dir);
        man.set("map", birk_map);
        man.set("x0", birk_x0);
        man.set("n", birk_n);
        man.set("seed", static_cast<long>(seed));
        man.write();
        const auto est = birkhoff(resolve_map(birk_map), birk_x0, birk_n, seed);
        MeasureEstimate hist_est;
        hist_est.representation = histogram(*est.empirical(), 1000);
        hist_est.atom_summary = est.atom_summary;
        hist_est.convergence_trace = est.convergence_trace;
        auto out = open_artifact(man, ".csv");
        save_measure_csv(out, hist_est);
        return 0;
    }

    if (cmd_occ->parsed()) {
        Manifest man("occupation", out_dir);
        man.set("map", occ_map);
        man.set("x0", occ_x0);
        man.set("lo", occ_lo);
        man.set("hi", occ_hi);
        man.set("n", occ_n);
        man.set("seed", static_cast<long>(seed));
        const auto tr = occupation_fraction(resolve_map(occ_map), occ_x0, occ_lo, occ_hi, occ_n,
                                            seed);
        man.set("tail_max", tr.tail_max);
        man.set("tail_min", tr.tail_min);
        man.set("final", tr.final_value);
        man.write();
        auto out = open_artifact(man, ".csv");
        save_trace_csv(out, tr.trace);
        return 0;
    }

    if (cmd_ulam->parsed()) {
        Manifest man("ulam", out_dir);
        man.set("map", ulam_map);
        man.set("W", ulam_w);
        man.set("method", ulam_method);
        man.set("seed", static_cast<long>(seed));
        man.set("tol", ulam_tol);
        const UlamMethod method =
            ulam_method == "mc" ? UlamMethod::monte_carlo : UlamMethod::exact_preimage;
        const auto inv = ulam_invariant_density(resolve_map(ulam_map), ulam_w, method, ulam_tol);
        if (inv.approximation.fell_back_to_mc)
            man.note("exact preimages unavailable, fell back to Monte Carlo rows");
        man.set("stationary_unique", inv.report.unique ? "true" : "false");
        man.set("residual", inv.report.residual);
        man.write();
        auto mat = open_artifact(man, ".matrix.txt");
        save_matrix(mat, inv.approximation.matrix);
        auto out = open_artifact(man, ".csv");
        save_density_csv(out, inv.density);
        if (!ulam_refine.empty()) {
            const auto study =
                ulam_refinement_study(resolve_map(ulam_map), parse_int_list(ulam_refine), inv.density);
            auto ref = open_artifact(man, ".refinement.csv");
            ref << "W, w1_to_reference\n";
            for (const auto& p : study)
                ref << p.w << ", " << format_double(p.w1_to_reference) << "\n";
        }
        return 0;
    }

    if (cmd_lat->parsed()) {
        Manifest man("lattice-run", out_dir);
        man.set("map", lat_map);
        man.set("d", lat_d);
        man.set("eps", lat_eps);
        man.set("boundary", lat_boundary);
        man.set("order", lat_order);
        man.set("steps", lat_steps);
        man.set("seed", static_cast<long>(seed));
        man.set("noise", lat_noise ? "true" : "false");
        if (!lat_x0.empty()) man.set("x0", lat_x0);
        man.write();
        const LatticeSystem sys = make_lattice(lat_map, lat_d, lat_eps, lat_boundary, lat_order);
        LatticeState x(lat_d);
        if (!lat_x0.empty()) {
            const auto coords = parse_grid(lat_x0);
            if (static_cast<int>(coords.size()) != lat_d)
                throw CLI::ValidationError("--x0", "needs exactly d coordinates");
            for (int i = 0; i < lat_d; ++i) x[i] = coords[static_cast<std::size_t>(i)];
        } else {
            Rng rng = Rng::stream(seed, 0x1A77ull);
            for (int i = 0; i < lat_d; ++i) x[i] = rng.next_double();
        }
        Rng noise_rng = Rng::stream(seed, 0x401Eull);
        auto out = open_artifact(man, ".csv");
        out << "t";
        for (int i = 0; i < lat_d; ++i) out << ", x_" << i;
        out << "\n";
        for (long t = 0; t <= lat_steps; ++t) {
            out << t;
            for (int i = 0; i < lat_d; ++i) out << ", " << format_double(x[i]);
            out << "\n";
            x = lattice_step(sys, x, lat_noise ? &noise_rng : nullptr);
        }
        return 0;
    }

    if (cmd_dbl->parsed()) {
        Manifest man("doubling-check", out_dir);
        man.set("map", dbl_map);
        man.set("d", dbl_d);
        man.set("eps", dbl_eps);
        man.set("boundary", dbl_boundary);
        man.set("steps", dbl_steps);
        man.set("seeds", dbl_seeds);
        man.set("seed", static_cast<long>(seed));
        man.write();
        const LatticeSystem sys =
            make_lattice(dbl_map, dbl_d, dbl_eps, dbl_boundary, "map-after-interaction");
        const DoubledSystem doubled = doubling_transform(sys);
        auto out = open_artifact(man, ".csv");
        out << "seed, max_deviation\n";
        double worst = 0.0;
        for (int s = 0; s < dbl_seeds; ++s) {
            Rng rng = Rng::stream(seed, 0xD0B1ull + static_cast<std::uint64_t>(s));
            LatticeState x(dbl_d);
            for (int i = 0; i < dbl_d; ++i) x[i] = rng.next_double();
            Eigen::VectorXd xy = doubled_initial(x);
            double dev = 0.0;
            for (long t = 0; t < dbl_steps; ++t) {
                x = lattice_step(sys, x);
                xy = doubled_step(doubled, xy);
                dev = std::max(dev, (xy.head(dbl_d) - x).cwiseAbs().maxCoeff());
            }
            worst = std::max(worst, dev);
            out << s << ", " << format_double(dev) << "\n";
        }
        std::cout << "max deviation over seeds: " << format_double(worst) << "\n";
        return 0;
    }

    if (cmd_census->parsed()) {
        Manifest man("census", out_dir);
        man.set("map", cen_map);
        man.set("d", cen_d);
        man.set("eps", cen_eps);
        man.set("boundary", cen_boundary);
        man.set("transient", cen_transient);
        man.set("tail", cen_tail);
        man.set("samples", cen_samples);
        man.set("merge_radius", cen_merge);
        man.set("seed", static_cast<long>(seed));
        man.set("jobs", jobs);
        CensusParams params;
        params.n_transient = cen_transient;
        params.n_tail = cen_tail;
        params.n_samples = cen_samples;
        params.merge_radius = cen_merge;
        params.seed = seed;
        params.jobs = jobs;
        const AttractorCensus census = attractor_census(
            make_lattice(cen_map, cen_d, cen_eps, cen_boundary, "interaction-after-map"), params);
        man.set("attractor_count", census.count());
        man.set("unresolved_fraction", census.unresolved_fraction);
        man.write();
        auto out = open_artifact(man, ".csv");
        write_census_csv(out, census, 0.0, false, true);
        std::cout << "attractors: " << census.count() << "\n";
        return 0;
    }

    if (cmd_sweep->parsed()) {
        Manifest man("sweep", out_dir);
        man.set("map", sw_map);
        man.set("d", sw_d);
        man.set("eps", sw_eps);
        man.set("boundary", sw_boundary);
        man.set("param", sw_param);
        man.set("grid", sw_grid);
        man.set("transient", sw_transient);
        man.set("tail", sw_tail);
        man.set("samples", sw_samples);
        man.set("merge_radius", sw_merge);
        man.set("seed", static_cast<long>(seed));
        man.set("jobs", jobs);
        man.write();
        ParamFamily family;
        family.base = make_lattice(sw_map, sw_d, sw_eps, sw_boundary, "interaction-after-map");
        family.param = sw_param == "epsilon" ? ParamFamily::Param::epsilon
                                             : ParamFamily::Param::boundary_y;
        CensusParams params;
        params.n_transient = sw_transient;
        params.n_tail = sw_tail;
        params.n_samples = sw_samples;
        params.merge_radius = sw_merge;
        params.seed = seed;
        params.jobs = jobs;
        const PhaseSweep sweep = phase_sweep(family, parse_grid(sw_grid), params);
        auto out = open_artifact(man, ".csv");
        out << "gamma, attractor_count, quality_ok\n";
        for (const auto& pt : sweep.points)
            out << format_double(pt.gamma) << ", " << pt.attractor_count << ", "
                << (pt.quality_ok ? 1 : 0) << "\n";
        auto detail = open_artifact(man, ".attractors.csv");
        for (std::size_t g = 0; g < sweep.censuses.size(); ++g)
            write_census_csv(detail, sweep.censuses[g], sweep.points[g].gamma, true, g == 0);
        auto trans = open_artifact(man, ".transitions.csv");
        trans << "gamma_left, gamma_right, count_left, count_right\n";
        for (const auto& t : sweep.transitions)
            trans << format_double(t.gamma_left) << ", " << format_double(t.gamma_right) << ", "
                  << t.count_left << ", " << t.count_right << "\n";
        std::cout << "transitions detected: " << sweep.transitions.size() << "\n";
        return 0;
    }

    if (cmd_stab->parsed()) {
        Manifest man("stability", out_dir);
        man.set("map", stab_map);
        man.set("d", stab_d);
        man.set("eps", stab_eps);
        man.set("boundary", stab_boundary);
        man.set("windows", stab_windows);
        man.set("pairs", stab_pairs);
        man.set("cloud", stab_cloud);
        man.set("seed", static_cast<long>(seed));
        const auto diag = stability_diagnostics(
            make_lattice(stab_map, stab_d, stab_eps, stab_boundary, "interaction-after-map"),
            parse_int_list(stab_windows), stab_pairs, seed, stab_cloud, stab_phi_n);
        man.set("c_hat_full", diag.c_hat_full);
        man.set("c_hat_interaction", diag.c_hat_interaction);
        man.set("phi_nondecaying", diag.phi_nondecaying ? "true" : "false");
        if (diag.small_sample_warning) man.note("some measure pairs were too close to ratio");
        man.write();
        auto out = open_artifact(man, ".csv");
        out << "quantity, key, value\n";
        out << "c_hat_full, , " << format_double(diag.c_hat_full) << "\n";
        out << "c_hat_interaction, , " << format_double(diag.c_hat_interaction) << "\n";
        for (const auto& [l, psi] : diag.psi_by_window)
            out << "psi_hat, " << l << ", " << format_double(psi) << "\n";
        for (const auto& [n, phi] : diag.phi_by_n)
            out << "phi_hat, " << n << ", " << format_double(phi) << "\n";
        return 0;
    }

    if (cmd_pcac->parsed()) {
        Manifest man("pca-compile", out_dir);
        man.set("spec", pcac_spec);
        const PcaSpec spec = load_pca_spec_file(pcac_spec);
        const CompiledPca compiled = compile_pca(spec);
        long members = 0;
        bool all_ok = true;
        for (const auto& per_vertex : compiled.maps)
            for (const auto& [code, model] : per_vertex) {
                ++members;
                all_ok = all_ok && verify_markov(model).ok;
            }
        man.set("vertices", spec.n_vertices());
        man.set("family_members", members);
        man.set("all_markov", all_ok ? "true" : "false");
        man.write();
        auto out = open_artifact(man, ".csv");
        out << "vertex, config, cell, left, right, slope, intercept\n";
        for (int v = 0; v < spec.n_vertices(); ++v)
            for (const auto& [code, model] : compiled.maps[static_cast<std::size_t>(v)])
                for (int c = 0; c < model.cell_count(); ++c) {
                    const Branch& b = model.map.branches[c];
                    out << v << ", " << code << ", " << c << ", "
                        << format_double(model.refined_breaks[c]) << ", "
                        << format_double(model.refined_breaks[c + 1]) << ", "
                        << format_double(b.slope) << ", " << format_double(b.intercept) << "\n";
                }
        return 0;
    }

    if (cmd_pcae->parsed()) {
        Manifest man("pca-equiv", out_dir);
        man.set("spec", pcae_spec);
        man.set("horizon", pcae_horizon);
        man.set("runs", pcae_runs);
        man.set("mode", pcae_exact ? "exact" : "monte_carlo");
        man.set("seed", static_cast<long>(seed));
        const PcaSpec spec = load_pca_spec_file(pcae_spec);
        const CompiledPca compiled = compile_pca(spec);
        const auto rep = equivalence_report(
            spec, compiled, pcae_horizon, pcae_runs, seed,
            pcae_exact ? EquivalenceMode::exact : EquivalenceMode::monte_carlo);
        man.set("max_tv", rep.max_tv);
        man.write();
        auto out = open_artifact(man, ".csv");
        out << "t, tv_distance\n";
        for (std::size_t t = 0; t < rep.tv_by_step.size(); ++t)
            out << t << ", " << format_double(rep.tv_by_step[t]) << "\n";
        std::cout << "max divergence: " << format_double(rep.max_tv) << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

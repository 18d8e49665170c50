// gmtkit command-line harness: corpus generation, energies, projections,
// lattice/corona runs, capacity certificates, verification suites, and SVG
// plots. Every command echoes its fully resolved configuration as JSON.
// Exit codes: 0 success, 1 assertion/verification failure, 2 usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gmtkit/capacity.hpp"
#include "gmtkit/corona.hpp"
#include "gmtkit/energies.hpp"
#include "gmtkit/grassmann.hpp"
#include "gmtkit/lattice.hpp"
#include "gmtkit/measure.hpp"
#include "gmtkit/projection.hpp"
#include "gmtkit/svg.hpp"
#include "gmtkit/verify.hpp"

using namespace gmtkit;

namespace {

void echo_config(const std::string& command, const json& config) {
    json j{{"command", command}, {"config", config}};
    std::cout << j.dump(2) << "\n";
}

AngularInterval parse_interval(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--interval expects lo,hi in radians");
    AngularInterval interval{std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
    interval.validate();
    return interval;
}

Cone parse_cone(const std::string& spec) {
    return json::parse(spec).get<Cone>();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << body;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --------------------------------------------------------------- gen

int run_gen(const std::string& kind, int k, int atoms, int dim, double slope, double from_x,
            double from_y, double to_x, double to_y, int components, double sigma,
            std::uint64_t seed, const std::string& out) {
    DiscreteMeasure mu(2);
    if (kind == "cantor4") {
        mu = generate_cantor4(k);
    } else if (kind == "segment") {
        mu = generate_segment(Eigen::Vector2d(from_x, from_y), Eigen::Vector2d(to_x, to_y), atoms);
    } else if (kind == "lipschitz-graph") {
        mu = generate_lipschitz_graph(atoms, Subspace::axis(2, 0), slope, seed);
    } else if (kind == "random-box") {
        mu = generate_random_box(atoms, dim, seed);
    } else if (kind == "gaussian-mixture") {
        mu = generate_gaussian_mixture(atoms, components, dim, sigma, seed);
    } else {
        throw CLI::ValidationError("unknown generator " + kind);
    }
    echo_config("gen", json{{"kind", kind},
                            {"k", k},
                            {"atoms", atoms},
                            {"dim", dim},
                            {"slope", slope},
                            {"components", components},
                            {"sigma", sigma},
                            {"seed", seed},
                            {"out", out}});
    write_measure_csv(mu, out);
    json summary{{"atoms", mu.size()}, {"mass", total_mass(mu)}, {"out", out}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- energy

int run_energy(const std::string& kind, const std::string& measure_path, double eps, int n,
               const std::string& cone_spec, double lower, double upper) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    json config{{"kind", kind}, {"measure", measure_path}, {"eps", eps}, {"n", n}};
    json out;
    if (kind == "curvature") {
        out = curvature(mu, eps);
    } else if (kind == "cauchy") {
        out = cauchy_energy(mu, eps);
    } else if (kind == "riesz") {
        out = riesz_energy(mu, n, eps);
    } else if (kind == "melnikov") {
        out = melnikov_residual(mu, eps);
    } else if (kind == "conical") {
        config["cone"] = json::parse(cone_spec);
        out = conical_energy(mu, parse_cone(cone_spec), n, eps);
    } else if (kind == "banded") {
        config["cone"] = json::parse(cone_spec);
        config["lower"] = lower;
        config["upper"] = upper;
        Eigen::VectorXd center = Eigen::VectorXd::Zero(mu.dim);
        double radius = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) center += mu.point(i);
        if (mu.size() > 0) center /= static_cast<double>(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i)
            radius = std::max(radius, (mu.point(i) - center).norm());
        out = banded_conical_energy(mu, parse_cone(cone_spec), n, lower, upper,
                                    Ball(center, radius * 1.001 + 1e-12));
    } else {
        throw CLI::ValidationError("unknown energy kind " + kind);
    }
    echo_config("energy", config);
    std::cout << out.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- project

int run_project(const std::string& kind, const std::string& measure_path,
                const std::string& interval_spec, double eps_moll, int theta_nodes,
                int radial_nodes, int angular_nodes, long long samples, double ball_radius,
                std::uint64_t seed, const std::string& out_csv) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    const MollifierSpec moll(eps_moll);
    json config{{"kind", kind},
                {"measure", measure_path},
                {"eps_moll", eps_moll},
                {"theta_nodes", theta_nodes},
                {"radial_nodes", radial_nodes},
                {"angular_nodes", angular_nodes},
                {"samples", samples},
                {"seed", seed}};
    echo_config("project", config);
    json out;
    if (kind == "interval") {
        out = directional_energy_interval(mu, parse_interval(interval_spec), moll, theta_nodes);
    } else if (kind == "fourier") {
        out = fourier_cone_energy(mu, parse_interval(interval_spec), moll, radial_nodes,
                                  angular_nodes);
    } else if (kind == "smoothed") {
        out = cone_kernel_energy_smoothed(mu, parse_interval(interval_spec), moll, radial_nodes,
                                          angular_nodes);
    } else if (kind == "ball") {
        Rng rng(seed);
        GrassmannBall ball{Subspace::line_at_angle(parse_interval(interval_spec).midpoint()),
                           ball_radius};
        out = grassmann_ball_energy(mu, ball, moll, samples, rng);
    } else if (kind == "profile") {
        const auto profile = directional_profile(mu, parse_interval(interval_spec), moll,
                                                 theta_nodes);
        std::string csv = "theta,energy\n";
        for (const auto& p : profile)
            csv += format_double(p.theta) + "," + format_double(p.energy) + "\n";
        if (out_csv.empty()) {
            std::cout << csv;
        } else {
            write_text(out_csv, csv);
        }
        out = json{{"nodes", profile.size()}, {"out", out_csv}};
    } else {
        throw CLI::ValidationError("unknown project kind " + kind);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- lattice

int run_lattice(const std::string& kind, const std::string& measure_path, double a0, double c0,
                int k_max, const std::string& out) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    echo_config("lattice", json{{"kind", kind},
                                {"measure", measure_path},
                                {"a0", a0},
                                {"c0", c0},
                                {"k_max", k_max},
                                {"out", out}});
    const CubeLattice lat = build_lattice(mu, a0, c0, k_max);
    if (kind == "build") {
        const json j = lat;
        if (out.empty()) std::cout << j.dump(2) << "\n";
        else write_text(out, j.dump(2) + "\n");
        return 0;
    }
    if (kind == "stats") {
        const std::vector<double> lambdas{0.05, 0.1, 0.2, 0.4};
        const BoundaryProfile prof = boundary_mass_profile(lat, lambdas);
        std::string csv = "level,cube_count,doubling_fraction";
        for (const double l : lambdas) csv += ",boundary_mass_lambda_" + format_double(l);
        csv += "\n";
        for (std::size_t k = 0; k < lat.levels.size(); ++k) {
            int doubling = 0;
            for (const int q : lat.levels[k])
                if (lat.cube(q).doubling) ++doubling;
            csv += std::to_string(k) + "," + std::to_string(lat.levels[k].size()) + "," +
                   format_double(static_cast<double>(doubling) / lat.levels[k].size());
            for (std::size_t l = 0; l < lambdas.size(); ++l)
                csv += "," + format_double(prof.fraction_by_level[k][l]);
            csv += "\n";
        }
        if (out.empty()) std::cout << csv;
        else write_text(out, csv);
        const LatticeInvariantReport inv = verify_lattice_invariants(lat);
        json summary{{"partition_ok", inv.partition_ok},
                     {"nesting_ok", inv.nesting_ok},
                     {"ball28_ok", inv.ball28_ok},
                     {"separation_ok", inv.separation_ok},
                     {"containment_violation_fraction", inv.containment_violation_fraction},
                     {"forced_center_adds", lat.forced_center_adds}};
        std::cout << summary.dump(2) << "\n";
        return 0;
    }
    throw CLI::ValidationError("unknown lattice kind " + kind);
}

// --------------------------------------------------------------- corona

json corona_svg(const CubeLattice& lat, const CoronaForest& forest, const std::string& path) {
    if (lat.mu.dim != 2) return json{{"svg", nullptr}, {"reason", "svg output is planar-only"}};
    PlotFrame frame;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (std::size_t i = 0; i < lat.mu.size(); ++i) {
        x_lo = std::min(x_lo, lat.mu.point(i)(0));
        x_hi = std::max(x_hi, lat.mu.point(i)(0));
        y_lo = std::min(y_lo, lat.mu.point(i)(1));
        y_hi = std::max(y_hi, lat.mu.point(i)(1));
    }
    const double pad_x = 0.05 * std::max(x_hi - x_lo, 1e-9);
    const double pad_y = 0.05 * std::max(y_hi - y_lo, 1e-9);
    frame.x_lo = x_lo - pad_x;
    frame.x_hi = x_hi + pad_x;
    frame.y_lo = y_lo - pad_y;
    frame.y_hi = y_hi + pad_y;
    SvgCanvas canvas(frame.width, frame.height);
    frame.draw_axes(canvas, "x", "y");

    // atoms colored by the layer of the deepest root containing them
    std::vector<int> atom_layer(lat.mu.size(), 0);
    for (std::size_t layer = 0; layer < forest.layers.size(); ++layer)
        for (const int root : forest.layers[layer])
            for (const int a : lat.cube(root).members) atom_layer[a] = static_cast<int>(layer);
    for (const std::size_t a : lat.mu.support()) {
        const auto [cx, cy] = frame.map(lat.mu.point(a)(0), lat.mu.point(a)(1));
        canvas.circle(cx, cy, 2.0, layer_color(atom_layer[a]));
    }

    // fitted graphs as polylines over the base range
    for (const auto& dec : forest.trees) {
        if (!dec.graph || dec.graph->anchors() == 0) continue;
        const auto& g = *dec.graph;
        double u_lo = g.anchor_base.row(0).minCoeff();
        double u_hi = g.anchor_base.row(0).maxCoeff();
        if (!(u_hi > u_lo)) continue;
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i <= 100; ++i) {
            Eigen::VectorXd u(1);
            u(0) = u_lo + (u_hi - u_lo) * i / 100.0;
            const Eigen::VectorXd p = g.graph_point(u);
            pts.push_back(frame.map(p(0), p(1)));
        }
        canvas.polyline(pts, "#333333");
    }
    canvas.save(path);
    return json{{"svg", path}};
}

int run_corona(const std::string& measure_path, const std::string& cone_spec,
               const std::string& params_path, double packing_eps,
               const std::string& out_prefix) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    CoronaParams params;
    if (!params_path.empty()) {
        std::ifstream is(params_path);
        if (!is) throw std::runtime_error("cannot open " + params_path);
        json j;
        is >> j;
        params = j.get<CoronaParams>();
    }
    if (!cone_spec.empty()) params.cone = parse_cone(cone_spec);
    params.validate(mu.dim);
    echo_config("corona", json{{"measure", measure_path},
                               {"params", json(params)},
                               {"packing_eps", packing_eps},
                               {"out_prefix", out_prefix}});

    const CubeLattice lat = build_lattice(mu);
    const CoronaForest forest = build_forest(lat, params);
    const auto verification = verify_corona_properties(lat, forest, params, 1e-9);
    const PackingReport packing = packing_report(lat, forest, params, packing_eps);

    write_text(out_prefix + "_forest.json", json(forest).dump(2) + "\n");
    write_text(out_prefix + "_packing.json", json(packing).dump(2) + "\n");
    std::string csv =
        "root,good_mass,good_fraction_on_graph,max_delta_ratio,max_theta_ratio,"
        "ld_mass_ratio,bce_mass,bce_bound,bce_ok,id_root\n";
    for (const auto& v : verification) {
        csv += std::to_string(v.root) + "," + format_double(v.good_mass) + "," +
               format_double(v.good_fraction_on_graph) + "," + format_double(v.max_delta_ratio) +
               "," + format_double(v.max_theta_ratio) + "," + format_double(v.ld_mass_ratio) +
               "," + format_double(v.bce_mass) + "," + format_double(v.bce_bound) + "," +
               (v.bce_ok ? "1" : "0") + "," + (v.id_root ? "1" : "0") + "\n";
    }
    write_text(out_prefix + "_verification.csv", csv);
    const json svg = corona_svg(lat, forest, out_prefix + "_layers.svg");

    json summary{{"layers", forest.layers.size()},
                 {"roots", forest.trees.size()},
                 {"packing_ratio", packing.ratio},
                 {"outputs",
                  {out_prefix + "_forest.json", out_prefix + "_packing.json",
                   out_prefix + "_verification.csv"}},
                 {"svg", svg}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- capacity

int run_capacity_bound(const std::string& measure_path, const std::string& interval_spec,
                       double eps_moll, double r_min, int nodes, const std::string& out) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    const AngularInterval interval = parse_interval(interval_spec);
    echo_config("capacity bound", json{{"measure", measure_path},
                                       {"interval", {interval.theta_lo, interval.theta_hi}},
                                       {"eps_moll", eps_moll},
                                       {"r_min", r_min},
                                       {"nodes", nodes},
                                       {"out", out}});
    const auto cert = theorem1_certificate(mu, interval, MollifierSpec(eps_moll), r_min, nodes);
    const json j = cert;
    if (!out.empty()) write_text(out, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    std::cout << "lower bound " << format_double(cert.lower_bound) << " from mass "
              << format_double(cert.mass) << "; retained " << format_double(cert.retained_mass)
              << " after " << cert.threshold_doublings << " threshold doubling(s); sigma growth "
              << format_double(cert.sigma_growth) << (cert.growth_ok ? " (<= 1+1e-6)" : " (HIGH)")
              << "; energy/mass " << format_double(cert.energy_over_mass) << "\n";
    return 0;
}

int run_capacity_favard(const std::string& measure_path, double delta, int nodes,
                        const std::string& out_csv) {
    const DiscreteMeasure mu = read_measure_csv(measure_path);
    echo_config("capacity favard",
                json{{"measure", measure_path}, {"delta", delta}, {"nodes", nodes}});
    const auto profile = favard_profile(mu, delta, nodes);
    std::string csv = "theta,projected_length\n";
    for (const auto& p : profile)
        csv += format_double(p.theta) + "," + format_double(p.length) + "\n";
    if (out_csv.empty()) std::cout << csv;
    else write_text(out_csv, csv);
    std::cout << json{{"favard", favard_estimate(mu, delta, nodes)}, {"delta", delta}}.dump(2)
              << "\n";
    return 0;
}

// --------------------------------------------------------------- verify

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
    echo_config("verify", json{{"suite", suite}, {"seed", seed}, {"out", out}});
    std::vector<verify::SuiteReport> reports;
    if (suite == "all") {
        reports = verify::run_all(seed);
    } else {
        reports.push_back(verify::run_suite(suite, seed));
    }
    bool all_pass = true;
    for (const auto& r : reports) {
        for (const auto& c : r.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << r.suite << "/" << c.name << "\n";
        all_pass = all_pass && r.pass;
    }
    const json j{{"seed", seed}, {"pass", all_pass}, {"suites", reports}};
    if (!out.empty()) write_text(out, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

// --------------------------------------------------------------- plot

int run_plot(const std::string& kind, const std::string& measure_path,
             const std::string& interval_spec, double eps_moll, int nodes,
             const std::string& cone_spec, const std::string& out) {
    echo_config("plot", json{{"kind", kind},
                             {"measure", measure_path},
                             {"eps_moll", eps_moll},
                             {"nodes", nodes},
                             {"out", out}});
    if (kind == "theta-profile") {
        const DiscreteMeasure mu = read_measure_csv(measure_path);
        const AngularInterval interval =
            interval_spec.empty() ? AngularInterval{0.0, kPi} : parse_interval(interval_spec);
        const auto profile =
            directional_profile(mu, interval, MollifierSpec(eps_moll), nodes);
        PlotFrame frame;
        frame.x_lo = interval.theta_lo;
        frame.x_hi = interval.theta_hi;
        frame.y_lo = 0.0;
        frame.y_hi = 1e-300;
        for (const auto& p : profile) frame.y_hi = std::max(frame.y_hi, p.energy);
        SvgCanvas canvas(frame.width, frame.height);
        frame.draw_axes(canvas, "theta", "energy");
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : profile) pts.push_back(frame.map(p.theta, p.energy));
        canvas.polyline(pts, "#1f77b4", 1.5);
        for (const auto& p : pts) canvas.circle(p.first, p.second, 2.0, "#1f77b4");
        canvas.save(out);
        std::cout << json{{"svg", out}, {"nodes", profile.size()}}.dump(2) << "\n";
        return 0;
    }
    if (kind == "corona") {
        const DiscreteMeasure mu = read_measure_csv(measure_path);
        CoronaParams params;
        if (!cone_spec.empty()) params.cone = parse_cone(cone_spec);
        else params.cone = Cone(Subspace::line_at_angle(kPi / 4.0), 0.5);
        params.validate(mu.dim);
        const CubeLattice lat = build_lattice(mu);
        const CoronaForest forest = build_forest(lat, params);
        std::cout << corona_svg(lat, forest, out).dump(2) << "\n";
        return 0;
    }
    if (kind == "packing") {
        // packing ratio against the Cantor iterate, diagonal cone
        PlotFrame frame;
        frame.x_lo = 2;
        frame.x_hi = 5;
        frame.y_lo = 0.0;
        frame.y_hi = 1e-300;
        std::vector<std::pair<double, double>> data;
        for (int k = 2; k <= 5; ++k) {
            const CubeLattice lat = build_lattice(generate_cantor4(k), 4.0, 2.0, k);
            CoronaParams params;
            params.cone = Cone(Subspace::line_at_angle(kPi / 4.0), 0.5);
            const CoronaForest forest = build_forest(lat, params, /*fit_graphs=*/false);
            const PackingReport rep = packing_report(lat, forest, params, std::pow(4.0, -k));
            data.emplace_back(k, rep.ratio);
            frame.y_hi = std::max(frame.y_hi, rep.ratio);
        }
        SvgCanvas canvas(frame.width, frame.height);
        frame.draw_axes(canvas, "cantor level k", "packing ratio");
        std::vector<std::pair<double, double>> pts;
        for (const auto& [k, ratio] : data) pts.push_back(frame.map(k, ratio));
        canvas.polyline(pts, "#d62728", 1.5);
        for (const auto& p : pts) canvas.circle(p.first, p.second, 3.0, "#d62728");
        canvas.save(out);
        std::cout << json{{"svg", out}, {"points", data.size()}}.dump(2) << "\n";
        return 0;
    }
    throw CLI::ValidationError("unknown plot kind " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gmtkit: geometric energies, cube lattices, corona decompositions, and "
                 "capacity lower-bound certificates for discrete measures"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "kernel thread count (default GMTKIT_THREADS or 1)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a measure and write it as CSV");
    std::string gen_kind, gen_out = "measure.csv";
    int gen_k = 2, gen_atoms = 100, gen_dim = 2, gen_components = 3;
    double gen_slope = 0.5, gen_sigma = 0.1;
    double from_x = 0.0, from_y = 0.0, to_x = 1.0, to_y = 0.0;
    std::uint64_t gen_seed = 1;
    gen->add_option("kind", gen_kind,
                    "cantor4 | segment | lipschitz-graph | random-box | gaussian-mixture")
        ->required();
    gen->add_option("--k", gen_k, "cantor4 generation");
    gen->add_option("--atoms", gen_atoms, "atom count");
    gen->add_option("--dim", gen_dim, "ambient dimension");
    gen->add_option("--slope", gen_slope, "lipschitz slope bound");
    gen->add_option("--components", gen_components, "gaussian mixture components");
    gen->add_option("--sigma", gen_sigma, "gaussian component sigma");
    gen->add_option("--from-x", from_x, "segment start x");
    gen->add_option("--from-y", from_y, "segment start y");
    gen->add_option("--to-x", to_x, "segment end x");
    gen->add_option("--to-y", to_y, "segment end y");
    gen->add_option("--seed", gen_seed, "64-bit seed");
    gen->add_option("--out", gen_out, "output CSV path");

    // energy
    auto* energy = app.add_subcommand("energy", "kernel energies of a measure");
    std::string en_kind, en_measure, en_cone;
    double en_eps = 1e-3, en_lower = 1e-3, en_upper = 1.0;
    int en_n = 1;
    energy->add_option("kind", en_kind,
                       "curvature | cauchy | riesz | conical | banded | melnikov")
        ->required();
    energy->add_option("--measure", en_measure, "measure CSV")->required();
    energy->add_option("--eps", en_eps, "truncation eps");
    energy->add_option("--n", en_n, "kernel dimension n");
    energy->add_option("--cone", en_cone, "cone JSON {subspace, aperture[, apex]}");
    energy->add_option("--lower", en_lower, "band lower bound");
    energy->add_option("--upper", en_upper, "band upper bound");

    // project
    auto* project = app.add_subcommand("project", "projection energies");
    std::string pr_kind, pr_measure, pr_interval = "0.0,1.0", pr_out_csv;
    double pr_eps = 0.01, pr_ball_radius = 0.3;
    int pr_theta_nodes = 64, pr_radial = 256, pr_angular = 128;
    long long pr_samples = 2000;
    std::uint64_t pr_seed = 1;
    project->add_option("kind", pr_kind, "interval | ball | fourier | smoothed | profile")
        ->required();
    project->add_option("--measure", pr_measure, "measure CSV")->required();
    project->add_option("--interval", pr_interval, "angular interval lo,hi");
    project->add_option("--eps-moll", pr_eps, "mollifier bandwidth");
    project->add_option("--theta-nodes", pr_theta_nodes, "Gauss-Legendre theta nodes");
    project->add_option("--radial-nodes", pr_radial, "polar radial nodes");
    project->add_option("--angular-nodes", pr_angular, "polar angular nodes");
    project->add_option("--samples", pr_samples, "MC samples");
    project->add_option("--ball-radius", pr_ball_radius, "Grassmannian ball radius");
    project->add_option("--seed", pr_seed, "64-bit seed");
    project->add_option("--out-csv", pr_out_csv, "profile CSV output");

    // lattice
    auto* lattice = app.add_subcommand("lattice", "cube lattice build and stats");
    std::string lat_kind, lat_measure, lat_out;
    double lat_a0 = 8.0, lat_c0 = 2.0;
    int lat_kmax = 8;
    lattice->add_option("kind", lat_kind, "build | stats")->required();
    lattice->add_option("--measure", lat_measure, "measure CSV")->required();
    lattice->add_option("--a0", lat_a0, "scale base A0 (>= 4)");
    lattice->add_option("--c0", lat_c0, "doubling constant C0 (>= 1)");
    lattice->add_option("--k-max", lat_kmax, "maximum depth");
    lattice->add_option("--out", lat_out, "output path (JSON for build, CSV for stats)");

    // corona
    auto* corona = app.add_subcommand("corona", "corona decomposition run");
    auto* corona_run = corona->add_subcommand("run", "build forest, verify, report");
    std::string co_measure, co_cone, co_params, co_prefix = "corona";
    double co_eps = 1e-3;
    corona_run->add_option("--measure", co_measure, "measure CSV")->required();
    corona_run->add_option("--cone", co_cone, "cone JSON");
    corona_run->add_option("--params", co_params, "corona params JSON file");
    corona_run->add_option("--packing-eps", co_eps, "eps for the packing denominator");
    corona_run->add_option("--out-prefix", co_prefix, "output file prefix");
    corona->require_subcommand(1);

    // capacity
    auto* capacity = app.add_subcommand("capacity", "capacity lower-bound pipelines");
    auto* cap_bound = capacity->add_subcommand("bound", "theorem-1 certificate");
    std::string cb_measure, cb_interval = "0.9,1.2", cb_out;
    double cb_eps = 0.005, cb_rmin = 1e-3;
    int cb_nodes = 64;
    cap_bound->add_option("--measure", cb_measure, "measure CSV")->required();
    cap_bound->add_option("--interval", cb_interval, "angular interval lo,hi");
    cap_bound->add_option("--eps", cb_eps, "mollifier bandwidth");
    cap_bound->add_option("--r-min", cb_rmin, "growth resolution floor");
    cap_bound->add_option("--nodes", cb_nodes, "theta quadrature nodes");
    cap_bound->add_option("--out", cb_out, "certificate JSON output");
    auto* cap_favard = capacity->add_subcommand("favard", "Favard length estimate");
    std::string cf_measure, cf_out;
    double cf_delta = 1e-3;
    int cf_nodes = 256;
    cap_favard->add_option("--measure", cf_measure, "measure CSV")->required();
    cap_favard->add_option("--delta", cf_delta, "fattening radius");
    cap_favard->add_option("--nodes", cf_nodes, "theta quadrature nodes");
    cap_favard->add_option("--out-csv", cf_out, "per-theta CSV output");
    capacity->require_subcommand(1);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a named verification suite");
    std::string vf_suite, vf_out;
    std::uint64_t vf_seed = 7;
    verify_cmd->add_option("suite", vf_suite, "suite name or 'all'")->required();
    verify_cmd->add_option("--seed", vf_seed, "64-bit seed");
    verify_cmd->add_option("--out", vf_out, "JSON report output");

    // plot
    auto* plot = app.add_subcommand("plot", "deterministic SVG plots");
    std::string pl_kind, pl_measure, pl_interval, pl_cone, pl_out = "plot.svg";
    double pl_eps = 0.01;
    int pl_nodes = 64;
    plot->add_option("kind", pl_kind, "theta-profile | corona | packing")->required();
    plot->add_option("--measure", pl_measure, "measure CSV");
    plot->add_option("--interval", pl_interval, "angular interval lo,hi");
    plot->add_option("--eps-moll", pl_eps, "mollifier bandwidth");
    plot->add_option("--nodes", pl_nodes, "quadrature nodes");
    plot->add_option("--cone", pl_cone, "cone JSON");
    plot->add_option("--out", pl_out, "SVG output path")->required();

    try {
        app.parse(argc, argv);
        if (threads > 0) set_num_threads(threads);
        if (*gen)
            return run_gen(gen_kind, gen_k, gen_atoms, gen_dim, gen_slope, from_x, from_y, to_x,
                           to_y, gen_components, gen_sigma, gen_seed, gen_out);
        if (*energy) return run_energy(en_kind, en_measure, en_eps, en_n, en_cone, en_lower,
                                       en_upper);
        if (*project)
            return run_project(pr_kind, pr_measure, pr_interval, pr_eps, pr_theta_nodes, pr_radial,
                               pr_angular, pr_samples, pr_ball_radius, pr_seed, pr_out_csv);
        if (*lattice) return run_lattice(lat_kind, lat_measure, lat_a0, lat_c0, lat_kmax, lat_out);
        if (*corona) return run_corona(co_measure, co_cone, co_params, co_eps, co_prefix);
        if (*cap_bound) return run_capacity_bound(cb_measure, cb_interval, cb_eps, cb_rmin,
                                                  cb_nodes, cb_out);
        if (*cap_favard) return run_capacity_favard(cf_measure, cf_delta, cf_nodes, cf_out);
        if (*verify_cmd) return run_verify(vf_suite, vf_seed, vf_out);
        if (*plot) return run_plot(pl_kind, pl_measure, pl_interval, pl_eps, pl_nodes, pl_cone,
                                   pl_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

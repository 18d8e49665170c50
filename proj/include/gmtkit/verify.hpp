#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/calibration.hpp"
#include "gmtkit/capacity.hpp"
#include "gmtkit/corona.hpp"
#include "gmtkit/energies.hpp"
#include "gmtkit/grassmann.hpp"
#include "gmtkit/lattice.hpp"
#include "gmtkit/measure.hpp"
#include "gmtkit/projection.hpp"

// The named verification suites: every numbered acceptance criterion as an
// executable check with pinned tolerances. Driven by the CLI `verify`
// command and by the acceptance test binary.
namespace gmtkit::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    json details;
};

struct SuiteReport {
    std::string suite;
    bool pass = true;
    double seconds = 0.0;
    std::vector<CheckResult> checks;

    void add(CheckResult c) {
        pass = pass && c.pass;
        checks.push_back(std::move(c));
    }
};

inline void to_json(json& j, const CheckResult& c) {
    j = json{{"name", c.name}, {"pass", c.pass}, {"details", c.details}};
}

inline void to_json(json& j, const SuiteReport& r) {
    j = json{{"suite", r.suite}, {"pass", r.pass}, {"seconds", r.seconds}, {"checks", r.checks}};
}

namespace detail {

// Independent naive energy implementations for the oracle suite. These use
// different membership and circumradius routes than the library kernels.
inline double oracle_inv_circumradius(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                      const Eigen::Vector2d& c) {
    Eigen::Matrix2d m;
    m.row(0) = 2.0 * (b - a).transpose();
    m.row(1) = 2.0 * (c - a).transpose();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::abs(det) < 1e-280) return 0.0;
    const Eigen::Vector2d center =
        m.inverse() * Eigen::Vector2d(b.squaredNorm() - a.squaredNorm(),
                                      c.squaredNorm() - a.squaredNorm());
    const double r = (center - a).norm();
    return r > 0.0 ? 1.0 / r : 0.0;
}

inline double oracle_curvature(const DiscreteMeasure& mu, double eps) {
    double total = 0.0;
    const std::size_t n = mu.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                const Eigen::Vector2d a = mu.point(i), b = mu.point(j), c = mu.point(k);
                if ((a - b).norm() <= eps || (a - c).norm() <= eps || (b - c).norm() <= eps)
                    continue;
                const double ir = oracle_inv_circumradius(a, b, c);
                total += mu.weights[i] * mu.weights[j] * mu.weights[k] * ir * ir;
            }
    return total;
}

inline double oracle_conical(const DiscreteMeasure& mu, const Cone& cone, int n, double eps) {
    const Eigen::MatrixXd p = cone.subspace.projector();
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (i == j) continue;
            const Eigen::VectorXd diff = mu.point(i) - mu.point(j);
            const double dist = diff.norm();
            if (dist <= eps) continue;
            if ((diff - p * diff).norm() >= cone.aperture * dist) continue;
            total += mu.weights[i] * mu.weights[j] / std::pow(dist, n);
        }
    return total;
}

inline double oracle_riesz(const DiscreteMeasure& mu, int n, double eps) {
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(mu.dim);
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const Eigen::VectorXd diff = mu.point(i) - mu.point(j);
            const double dist = diff.norm();
            if (dist > eps) s += mu.weights[j] * diff / std::pow(dist, n + 1);
        }
        total += mu.weights[i] * s.squaredNorm();
    }
    return total;
}

inline DiscreteMeasure dilate(const DiscreteMeasure& mu, double lambda) {
    DiscreteMeasure out(mu.dim);
    for (std::size_t i = 0; i < mu.size(); ++i) out.add(lambda * mu.point(i), mu.weights[i]);
    return out;
}

inline DiscreteMeasure translate(const DiscreteMeasure& mu, const Eigen::VectorXd& v) {
    DiscreteMeasure out(mu.dim);
    for (std::size_t i = 0; i < mu.size(); ++i)
        out.add(Eigen::VectorXd(mu.point(i)) + v, mu.weights[i]);
    return out;
}

inline DiscreteMeasure rotate2d(const DiscreteMeasure& mu, double angle) {
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    DiscreteMeasure out(2);
    for (std::size_t i = 0; i < mu.size(); ++i)
        out.add(rot * Eigen::Vector2d(mu.point(i)), mu.weights[i]);
    return out;
}

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// The fixed 20-measure Melnikov calibration corpus with per-measure eps.
inline std::vector<std::pair<DiscreteMeasure, double>> melnikov_corpus() {
    std::vector<std::pair<DiscreteMeasure, double>> corpus;
    corpus.emplace_back(generate_cantor4(2), std::pow(4.0, -2));
    corpus.emplace_back(generate_cantor4(3), std::pow(4.0, -3));
    corpus.emplace_back(generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 64),
                        1.0 / 64);
    corpus.emplace_back(generate_segment(Eigen::Vector2d(0.2, -0.3), Eigen::Vector2d(0.9, 1.1), 64),
                        std::hypot(0.7, 1.4) / 64);
    const auto x_axis = Subspace::axis(2, 0);
    for (std::uint64_t s = 1; s <= 3; ++s) {
        auto mu = generate_lipschitz_graph(48, x_axis, 0.5, 900 + s);
        const double eps = min_pairwise_distance(mu);
        corpus.emplace_back(std::move(mu), eps);
    }
    for (std::uint64_t s = 1; s <= 6; ++s) {
        auto mu = generate_random_box(40, 2, 700 + s);
        const double eps = min_pairwise_distance(mu);
        corpus.emplace_back(std::move(mu), eps);
    }
    for (std::uint64_t s = 1; s <= 7; ++s) {
        auto mu = generate_gaussian_mixture(36, 3, 2, 0.2, 800 + s);
        const double eps = min_pairwise_distance(mu);
        corpus.emplace_back(std::move(mu), eps);
    }
    return corpus;
}

// Corona corpus entry: a lattice plus parameters, with a human-readable tag.
struct CoronaFixture {
    std::string tag;
    CubeLattice lattice;
    CoronaParams params;
    double packing_eps = 1e-3;
};

inline std::vector<CoronaFixture> corona_corpus() {
    std::vector<CoronaFixture> fixtures;
    const Cone diagonal(Subspace::line_at_angle(kPi / 4.0), 0.5);
    for (int k = 2; k <= 5; ++k) {
        CoronaFixture f;
        f.tag = "cantor" + std::to_string(k);
        f.lattice = build_lattice(generate_cantor4(k), 4.0, 2.0, k);
        f.params.cone = diagonal;
        f.packing_eps = std::pow(4.0, -k);
        fixtures.push_back(std::move(f));
    }
    {
        CoronaFixture f;
        f.tag = "line-transverse";
        f.lattice = build_lattice(
            generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 100), 8.0, 2.0, 4);
        f.params.cone = Cone(Subspace::axis(2, 1), 0.5);
        f.packing_eps = 1e-2;
        fixtures.push_back(std::move(f));
    }
    {
        CoronaFixture f;
        f.tag = "lipschitz-graph";
        f.lattice = build_lattice(
            generate_lipschitz_graph(120, Subspace::axis(2, 0), 0.3, 424242), 8.0, 2.0, 4);
        f.params.cone = Cone(Subspace::axis(2, 1), 0.5);
        f.packing_eps = 1e-2;
        fixtures.push_back(std::move(f));
    }
    {
        // line plus a planted dense blob: forces an HD stop and a second layer
        CoronaFixture f;
        f.tag = "planted-blob";
        DiscreteMeasure mu = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 80);
        Rng rng(31337);
        for (int i = 0; i < 40; ++i) {
            const Eigen::Vector2d p(0.5 + 2e-3 * rng.normal(), 2e-3 * rng.normal());
            mu.add(p, 0.05);
        }
        f.lattice = build_lattice(mu, 8.0, 2.0, 5);
        f.params.cone = Cone(Subspace::axis(2, 1), 0.5);
        f.packing_eps = 1e-3;
        fixtures.push_back(std::move(f));
    }
    return fixtures;
}

}  // namespace detail

// Criterion 1: planar Fourier identity on mollified data.
inline SuiteReport suite_fourier_identity(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "fourier-identity";
    const MollifierSpec moll(0.05);
    const std::vector<AngularInterval> intervals{{0.9, 1.4}, {0.1, 0.55}, {2.0, 2.9}};
    double worst_dir = 0.0, worst_smoothed = 0.0;
    for (std::uint64_t s = 101; s <= 105; ++s) {
        const auto mu = generate_gaussian_mixture(16, 3, 2, 0.15, s);
        for (const auto& interval : intervals) {
            const double fc = fourier_cone_energy(mu, interval, moll).value;
            const double di = directional_energy_interval(mu, interval.perp(), moll, 96).value;
            const double sm = cone_kernel_energy_smoothed(mu, interval, moll).value;
            worst_dir = std::max(worst_dir, detail::rel_err(fc, di));
            worst_smoothed = std::max(worst_smoothed, detail::rel_err(fc, sm));
        }
    }
    report.add({"directional_vs_fourier_1pct", worst_dir < 0.01, json{{"max_rel_err", worst_dir}}});
    report.add({"smoothed_vs_fourier_1e-10", worst_smoothed < 1e-10,
                json{{"max_rel_err", worst_smoothed}}});
    return report;
}

// Criterion 2: the conical-energy / directional-energy inequality.
inline SuiteReport suite_corollary_inequality(std::uint64_t seed) {
    SuiteReport report;
    report.suite = "corollary-inequality";
    Rng base(seed);
    int holds = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int run = 0; run < 100; ++run) {
        Rng rng = base.stream(run);
        const int atoms = 10 + static_cast<int>(rng.uniform() * 41);  // <= 50
        const std::uint64_t mseed = rng.next_u64();
        const DiscreteMeasure mu = (run % 2 == 0)
                                       ? generate_random_box(atoms, 2, mseed)
                                       : generate_gaussian_mixture(atoms, 2, 2, 0.2, mseed);
        const double lo = rng.uniform(0.0, 1.8);
        const AngularInterval interval{lo, lo + rng.uniform(0.2, 1.2)};
        const double eps = min_pairwise_distance(mu);
        if (eps <= 0.0) continue;
        const MollifierSpec moll(eps / 10.0);
        const double lhs = conical_energy(mu, planar_cone(interval), 1, eps).value;
        const double rhs = directional_energy_interval(mu, interval.perp(), moll, 96).value;
        if (lhs <= rhs * (1.0 + 1e-6)) ++holds;
        if (rhs > 0.0) worst_margin = std::min(worst_margin, rhs / std::max(lhs, 1e-300));
    }
    report.add({"conical_le_directional_100of100", holds == 100,
                json{{"holds", holds}, {"min_rhs_over_lhs", worst_margin}}});
    return report;
}

// Criterion 3: Melnikov residual bound with the frozen constant.
inline SuiteReport suite_melnikov(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "melnikov";
    double measured = 0.0;
    for (const auto& [mu, eps] : detail::melnikov_corpus()) {
        const MelnikovReport rep = melnikov_residual(mu, eps);
        if (rep.mass <= 0.0 || rep.growth_c0 <= 0.0) continue;
        measured = std::max(measured,
                            std::abs(rep.residual) / (rep.growth_c0 * rep.growth_c0 * rep.mass));
    }
    const double frozen = calibration::kMelnikovK;
    json details{{"measured_K", measured}, {"frozen_K", frozen}};
    if (std::isnan(frozen)) {
        report.add({"melnikov_K_frozen", false, details});
        return report;
    }
    const bool bound_holds = measured <= frozen * (1.0 + 1e-12);
    const bool exact_rerun = detail::rel_err(measured, frozen) <= 1e-12;
    report.add({"residual_bound_holds", bound_holds, details});
    report.add({"calibration_exact_rerun", exact_rerun, details});
    return report;
}

// Criterion 4: naive-loop oracle agreement for the three kernel energies.
inline SuiteReport suite_energy_oracles(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "energy-oracles";
    double worst_curv = 0.0, worst_con = 0.0, worst_riesz = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto mu = generate_gaussian_mixture(80, 3, 2, 0.2, 1000 + s);
        const double eps = 0.01;
        worst_curv = std::max(
            worst_curv, detail::rel_err(curvature(mu, eps).value, detail::oracle_curvature(mu, eps)));
        const Cone cone(Subspace::line_at_angle(0.3 + 0.1 * s), 0.2 + 0.03 * s);
        worst_con = std::max(worst_con,
                             detail::rel_err(conical_energy(mu, cone, 1, eps).value,
                                             detail::oracle_conical(mu, cone, 1, eps)));
    }
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto mu = generate_random_box(120, 3, 2000 + s);
        const int n = 1 + static_cast<int>(s % 2);
        Rng rng(3000 + s);
        const Cone cone(sample_uniform_subspace(3, 3 - n, rng), 0.5);
        worst_riesz = std::max(worst_riesz, detail::rel_err(riesz_energy(mu, n, 0.02).value,
                                                            detail::oracle_riesz(mu, n, 0.02)));
        worst_con = std::max(worst_con,
                             detail::rel_err(conical_energy(mu, cone, n, 0.02).value,
                                             detail::oracle_conical(mu, cone, n, 0.02)));
    }
    report.add({"curvature_oracle_1e-12", worst_curv < 1e-12, json{{"max_rel_err", worst_curv}}});
    report.add({"conical_oracle_1e-12", worst_con < 1e-12, json{{"max_rel_err", worst_con}}});
    report.add({"riesz_oracle_1e-12", worst_riesz < 1e-12, json{{"max_rel_err", worst_riesz}}});
    return report;
}

// Criterion 5: homogeneity and rigid-motion invariance, exact to 1e-10.
inline SuiteReport suite_scaling_symmetry(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "scaling-symmetry";
    const double lambda = 2.75, angle = 0.643;
    const Eigen::Vector2d shift(1.3, -0.8);
    const auto mu = generate_gaussian_mixture(24, 2, 2, 0.15, 4242);
    const double eps = 0.02;
    const MollifierSpec moll(0.03);

    double worst = 0.0;
    auto track = [&](double err) { worst = std::max(worst, err); };

    // curvature lambda^{-2}; rotation/translation invariance
    const double c = curvature(mu, eps).value;
    track(detail::rel_err(curvature(detail::dilate(mu, lambda), lambda * eps).value,
                          c / (lambda * lambda)));
    track(detail::rel_err(curvature(detail::rotate2d(mu, angle), eps).value, c));
    track(detail::rel_err(curvature(detail::translate(mu, shift), eps).value, c));

    // conical lambda^{-n} with co-rotated cone
    const Cone cone(Subspace::line_at_angle(0.4), 0.35);
    const Cone cone_rot(Subspace::line_at_angle(0.4 + angle), 0.35);
    const double k = conical_energy(mu, cone, 1, eps).value;
    track(detail::rel_err(conical_energy(detail::dilate(mu, lambda), cone, 1, lambda * eps).value,
                          k / lambda));
    track(detail::rel_err(conical_energy(detail::rotate2d(mu, angle), cone_rot, 1, eps).value, k));
    track(detail::rel_err(conical_energy(detail::translate(mu, shift), cone, 1, eps).value, k));

    // projection energy lambda^{-n} (n = 1) with co-scaled mollifier
    const AngularInterval interval{0.7, 1.3};
    const double p = directional_energy_interval(mu, interval, moll, 64).value;
    track(detail::rel_err(directional_energy_interval(detail::dilate(mu, lambda), interval,
                                                      MollifierSpec(lambda * moll.epsilon), 64)
                              .value,
                          p / lambda));
    track(detail::rel_err(
        directional_energy_interval(detail::translate(mu, shift), interval, moll, 64).value, p));

    // favard linear under dilation (delta co-scaled)
    const double fav = favard_estimate(mu, 0.05, 128);
    track(detail::rel_err(favard_estimate(detail::dilate(mu, lambda), lambda * 0.05, 128),
                          lambda * fav));

    // certificate bound linear under dilation, invariant under translation
    const auto segment = generate_segment(Eigen::Vector2d(0.1, 0.2),
                                          Eigen::Vector2d(0.1 + std::cos(1.0), 0.2 + std::sin(1.0)),
                                          120);
    const AngularInterval cert_iv{0.85, 1.15};
    const MollifierSpec cert_moll(5e-3);
    const auto cert = theorem1_certificate(segment, cert_iv, cert_moll, 1e-3);
    const auto cert_dil = theorem1_certificate(detail::dilate(segment, lambda), cert_iv,
                                               MollifierSpec(lambda * cert_moll.epsilon),
                                               lambda * 1e-3);
    const auto cert_shift =
        theorem1_certificate(detail::translate(segment, shift), cert_iv, cert_moll, 1e-3);
    track(detail::rel_err(cert_dil.lower_bound, lambda * cert.lower_bound));
    track(detail::rel_err(cert_shift.lower_bound, cert.lower_bound));

    report.add({"all_exact_to_1e-10", worst < 1e-10, json{{"max_rel_err", worst}}});
    return report;
}

// Criterion 6: Grassmannian ball-volume exponent and the lift isometry.
inline SuiteReport suite_grassmann_exponent(std::uint64_t seed) {
    SuiteReport report;
    report.suite = "grassmann-exponent";
    const std::vector<double> deltas{0.1, 0.2, 0.4};
    const long long samples = 100000;
    for (const auto [d, n] : std::vector<std::pair<int, int>>{{3, 1}, {4, 2}}) {
        Rng rng = Rng(seed).stream(10 * d + n);
        const Subspace center = sample_uniform_subspace(d, n, rng);
        std::vector<double> logs_x, logs_y;
        json fractions = json::array();
        for (const double delta : deltas) {
            const auto est = grassmann_ball_volume_mc(center, delta, samples, rng);
            fractions.push_back(est.fraction);
            logs_x.push_back(std::log(delta));
            logs_y.push_back(std::log(std::max(est.fraction, 1e-300)));
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < logs_x.size(); ++i) {
            mx += logs_x[i];
            my += logs_y[i];
        }
        mx /= logs_x.size();
        my /= logs_y.size();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < logs_x.size(); ++i) {
            num += (logs_x[i] - mx) * (logs_y[i] - my);
            den += (logs_x[i] - mx) * (logs_x[i] - mx);
        }
        const double slope = num / den;
        const double expect = static_cast<double>(n * (d - n));
        const bool ok = std::abs(slope - expect) <= 0.1 * expect;
        report.add({"ball_volume_slope_G(" + std::to_string(d) + "," + std::to_string(n) + ")", ok,
                    json{{"slope", slope}, {"expected", expect}, {"fractions", fractions}}});
    }

    Rng rng = Rng(seed).stream(99);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = rng.normal();
        const Subspace a = sample_uniform_subspace(3, 2, rng);
        const Subspace b = sample_uniform_subspace(3, 2, rng);
        worst = std::max(worst, std::abs(grassmann_metric(lift_isometry(x, a), lift_isometry(x, b)) -
                                         grassmann_metric(a, b)));
    }
    report.add({"lift_isometry_1e-10", worst < 1e-10, json{{"max_abs_err", worst}}});
    return report;
}

// Criterion 7: lattice invariants across the build corpus.
inline SuiteReport suite_lattice_invariants(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "lattice-invariants";

    struct BuildSpec {
        std::string tag;
        DiscreteMeasure mu;
        double a0;
        int k_max;
    };
    std::vector<BuildSpec> builds;
    builds.push_back({"cantor3_a4", generate_cantor4(3), 4.0, 3});
    builds.push_back({"cantor4_a8", generate_cantor4(4), 8.0, 6});
    builds.push_back({"box200_d2", generate_random_box(200, 2, 71), 8.0, 6});
    builds.push_back({"box300_d3", generate_random_box(300, 3, 72), 8.0, 5});
    builds.push_back({"segment200", generate_segment(Eigen::Vector2d(0, 0),
                                                     Eigen::Vector2d(1, 0), 200), 8.0, 6});
    builds.push_back({"graph150", generate_lipschitz_graph(150, Subspace::axis(2, 0), 0.5, 73),
                      8.0, 6});

    bool exact_all = true, containment_all = true, forced_zero = true;
    json per_build = json::array();
    for (const auto& b : builds) {
        const CubeLattice lat = build_lattice(b.mu, b.a0, 2.0, b.k_max);
        const LatticeInvariantReport inv = verify_lattice_invariants(lat);
        const bool exact = inv.partition_ok && inv.nesting_ok && inv.ball28_ok && inv.separation_ok;
        exact_all = exact_all && exact;
        containment_all = containment_all && inv.containment_violation_fraction < 0.01;
        forced_zero = forced_zero && lat.forced_center_adds == 0;
        per_build.push_back(json{{"tag", b.tag},
                                 {"exact", exact},
                                 {"containment_violation_fraction",
                                  inv.containment_violation_fraction},
                                 {"forced_center_adds", lat.forced_center_adds}});
    }
    report.add({"partition_nesting_28ball_5b_exact", exact_all && forced_zero, per_build});
    report.add({"ball_containment_below_1pct", containment_all, per_build});

    const CubeLattice cantor = build_lattice(generate_cantor4(3), 4.0, 2.0, 3);
    std::vector<std::size_t> counts;
    for (const auto& level : cantor.levels) counts.push_back(level.size());
    const bool counts_ok = counts == std::vector<std::size_t>{1, 4, 16, 64};
    report.add({"cantor3_a4_level_counts_1_4_16_64", counts_ok, json{{"counts", counts}}});

    // determinism: identical input and parameters give identical lattices
    const CubeLattice again = build_lattice(generate_cantor4(3), 4.0, 2.0, 3);
    bool same = cantor.cubes.size() == again.cubes.size();
    for (std::size_t i = 0; same && i < cantor.cubes.size(); ++i)
        same = cantor.cubes[i].center_atom == again.cubes[i].center_atom &&
               cantor.cubes[i].members == again.cubes[i].members &&
               cantor.cubes[i].parent == again.cubes[i].parent;
    report.add({"rebuild_bit_identical", same, json{{"cubes", cantor.cubes.size()}}});
    return report;
}

// Criterion 8: corona suite with the frozen packing band.
inline SuiteReport suite_corona(std::uint64_t /*seed*/) {
    SuiteReport report;
    report.suite = "corona";
    auto fixtures = detail::corona_corpus();

    bool bce_all = true, disjoint_all = true, slope_all = true;
    double theta_ratio_max = 0.0;
    json packing = json::array();
    json per_fixture = json::array();
    std::vector<double> cantor_ratios;

    for (auto& f : fixtures) {
        f.params.validate(f.lattice.mu.dim);
        const CoronaForest forest = build_forest(f.lattice, f.params);
        const auto verification = verify_corona_properties(f.lattice, forest, f.params, 1e-9);

        // stop cubes pairwise disjoint
        for (const auto& dec : forest.trees)
            for (std::size_t a = 0; a < dec.stop.size(); ++a)
                for (std::size_t b = a + 1; b < dec.stop.size(); ++b)
                    if (f.lattice.is_ancestor_or_self(dec.stop[a].cube, dec.stop[b].cube) ||
                        f.lattice.is_ancestor_or_self(dec.stop[b].cube, dec.stop[a].cube))
                        disjoint_all = false;

        // exact slope bound on retained anchors
        for (const auto& dec : forest.trees) {
            if (!dec.graph) continue;
            const auto& g = *dec.graph;
            for (int a = 0; a < g.anchors(); ++a)
                for (int b = a + 1; b < g.anchors(); ++b) {
                    const double df = (g.anchor_fiber.col(a) - g.anchor_fiber.col(b)).norm();
                    const double du = (g.anchor_base.col(a) - g.anchor_base.col(b)).norm();
                    if (df > g.slope * du * (1.0 + 1e-12)) slope_all = false;
                }
        }

        double fixture_bce_max = 0.0;
        for (const auto& v : verification) {
            bce_all = bce_all && v.bce_ok;
            theta_ratio_max = std::max(theta_ratio_max, v.max_theta_ratio);
            fixture_bce_max = std::max(fixture_bce_max,
                                       v.bce_bound > 0.0 ? v.bce_mass / v.bce_bound : 0.0);
        }

        const PackingReport pack = packing_report(f.lattice, forest, f.params, f.packing_eps);
        if (f.tag.rfind("cantor", 0) == 0) cantor_ratios.push_back(pack.ratio);
        packing.push_back(json{{"tag", f.tag}, {"ratio", pack.ratio}});
        per_fixture.push_back(json{{"tag", f.tag},
                                   {"layers", forest.layers.size()},
                                   {"roots", forest.trees.size()},
                                   {"bce_max_ratio", fixture_bce_max}});
    }

    report.add({"bce_fubini_bound_exact", bce_all, per_fixture});
    report.add({"stop_cubes_disjoint", disjoint_all, json{}});
    report.add({"graph_slope_exact", slope_all, json{}});

    json pack_details{{"measured", cantor_ratios}, {"packing", packing}};
    bool band_ok = cantor_ratios.size() == 4;
    bool frozen_known = true;
    for (std::size_t i = 0; i < cantor_ratios.size() && i < 4; ++i) {
        const double frozen = calibration::kPackingRatio[i];
        pack_details["frozen"] = {calibration::kPackingRatio[0], calibration::kPackingRatio[1],
                                  calibration::kPackingRatio[2], calibration::kPackingRatio[3]};
        if (std::isnan(frozen)) {
            frozen_known = false;
            continue;
        }
        if (std::abs(cantor_ratios[i] - frozen) > calibration::kPackingBandRel * frozen)
            band_ok = false;
    }
    report.add({"packing_ratio_in_frozen_band", band_ok && frozen_known, pack_details});

    json theta_details{{"measured_max", theta_ratio_max},
                       {"frozen_max", calibration::kCoronaThetaRatioMax}};
    const bool theta_ok = !std::isnan(calibration::kCoronaThetaRatioMax) &&
                          theta_ratio_max <= calibration::kCoronaThetaRatioMax * (1.0 + 1e-12);
    report.add({"theta_ratio_below_frozen_cap", theta_ok, theta_details});
    return report;
}

// Criterion 9: capacity pipeline.
inline SuiteReport suite_capacity(std::uint64_t seed) {
    SuiteReport report;
    report.suite = "capacity";

    // unit-segment fixture, tilted so the interval avoids the mod-pi wrap
    const double theta0 = 1.0;
    const auto segment = generate_segment(
        Eigen::Vector2d(0, 0), Eigen::Vector2d(std::cos(theta0), std::sin(theta0)), 200);
    const AngularInterval interval{theta0 - 0.15, theta0 + 0.15};
    const MollifierSpec moll(5e-3);
    const auto cert = theorem1_certificate(segment, interval, moll, 1e-3);
    const bool fixture_ok = cert.retained_mass >= 0.25 && cert.sigma_growth <= 1.0 + 1e-6 &&
                            cert.lower_bound > 0.0;
    report.add({"segment_certificate", fixture_ok,
                json{{"retained_mass", cert.retained_mass},
                     {"sigma_growth", cert.sigma_growth},
                     {"lower_bound", cert.lower_bound},
                     {"threshold_doublings", cert.threshold_doublings}}});

    // favard inequality on 100 seeded random measures
    Rng base(seed);
    int holds = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int run = 0; run < 100; ++run) {
        Rng rng = base.stream(500 + run);
        const int atoms = 20 + static_cast<int>(rng.uniform() * 31);
        const std::uint64_t mseed = rng.next_u64();
        const DiscreteMeasure mu = (run % 2 == 0)
                                       ? generate_random_box(atoms, 2, mseed)
                                       : generate_gaussian_mixture(atoms, 3, 2, 0.25, mseed);
        const double lo = rng.uniform(0.0, 2.0);
        const AngularInterval iv{lo, lo + rng.uniform(0.3, 1.0)};
        const double eps_m = 0.02;
        const auto check = favard_inequality_check(mu, iv, MollifierSpec(eps_m), 4.0 * eps_m, 96);
        if (check.ratio >= 0.95) ++holds;
        worst_ratio = std::min(worst_ratio, check.ratio);
    }
    report.add({"favard_ratio_100of100", holds == 100,
                json{{"holds", holds}, {"worst_ratio", worst_ratio}}});

    // theorem 2 reduces to theorem 1 in the plane: gamma_{2,1} is the
    // probability measure dtheta/pi, so ball energy = interval energy / pi
    Rng rng = base.stream(777);
    const GrassmannBall ball{Subspace::line_at_angle(theta0), std::sin(0.15)};
    const auto cert2 = theorem2_certificate(segment, ball, moll, 1e-3, 4000, rng);
    Rng rng_energy = base.stream(778);
    const auto ball_energy = grassmann_ball_energy(segment, ball, moll, 4000, rng_energy);
    const double se_bound =
        3.0 * cert.mass * cert.mass * ball_energy.std_error /
        (ball_energy.value * ball_energy.value);
    const double reduction_gap = std::abs(cert2.lower_bound / kPi - cert.lower_bound);
    report.add({"theorem2_matches_theorem1_reduction", reduction_gap <= se_bound,
                json{{"lower1", cert.lower_bound},
                     {"lower2_over_pi", cert2.lower_bound / kPi},
                     {"gap", reduction_gap},
                     {"three_se", se_bound}}});
    return report;
}

// Criterion 10: the reverse-inequality report on the segment fixture.
inline SuiteReport suite_appendix(std::uint64_t seed) {
    SuiteReport report;
    report.suite = "appendix";
    const int atoms = 200;
    const auto segment =
        generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), atoms);
    const double h = 1.0 / atoms;
    const Subspace v0 = Subspace::axis(2, 0);  // project near the segment direction
    const double s = 0.3, lambda_guess = 2.0;
    const std::vector<double> scales{16.0 * h, 8.0 * h, 4.0 * h, 1.5 * h};
    Rng rng = Rng(seed).stream(1010);
    const auto rep = reverse_inequality_report(segment, v0, s, MollifierSpec(2e-3), lambda_guess,
                                               h / 2.0, scales, 4000, rng);
    const double mass = total_mass(segment);
    const bool t1_ok = rep.t1 < 1e-12;
    const bool t2_ok = std::abs(rep.t2 - 2.0 * mass) <= 0.05 * 2.0 * mass;
    report.add({"t1_vanishes", t1_ok, json{{"t1", rep.t1}}});
    report.add({"t2_matches_2mass", t2_ok, json{{"t2", rep.t2}, {"mass", mass}}});

    json cdetails{{"measured_c", rep.measured_c}, {"frozen_c", calibration::kReverseC},
                  {"lhs", rep.lhs}};
    const bool c_ok = !std::isnan(calibration::kReverseC) &&
                      rep.measured_c <= calibration::kReverseC * (1.0 + 1e-9) &&
                      rep.lhs <= calibration::kReverseC * (rep.t1 + rep.t2) * (1.0 + 1e-9);
    report.add({"lhs_below_frozen_c_times_sum", c_ok, cdetails});
    return report;
}

inline std::vector<std::string> suite_names() {
    return {"fourier-identity",  "corollary-inequality", "melnikov",
            "energy-oracles",    "scaling-symmetry",     "grassmann-exponent",
            "lattice-invariants", "corona",              "capacity",
            "appendix"};
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    SuiteReport report;
    if (name == "fourier-identity") report = suite_fourier_identity(seed);
    else if (name == "corollary-inequality") report = suite_corollary_inequality(seed);
    else if (name == "melnikov") report = suite_melnikov(seed);
    else if (name == "energy-oracles") report = suite_energy_oracles(seed);
    else if (name == "scaling-symmetry") report = suite_scaling_symmetry(seed);
    else if (name == "grassmann-exponent") report = suite_grassmann_exponent(seed);
    else if (name == "lattice-invariants") report = suite_lattice_invariants(seed);
    else if (name == "corona") report = suite_corona(seed);
    else if (name == "capacity") report = suite_capacity(seed);
    else if (name == "appendix") report = suite_appendix(seed);
    else throw std::invalid_argument("unknown suite: " + name);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

inline std::vector<SuiteReport> run_all(std::uint64_t seed) {
    std::vector<SuiteReport> reports;
    for (const auto& name : suite_names()) reports.push_back(run_suite(name, seed));
    return reports;
}

}  // namespace gmtkit::verify

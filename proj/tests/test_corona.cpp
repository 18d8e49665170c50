#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmtkit/corona.hpp"
#include "oracles.hpp"

using namespace gmtkit;

namespace {

CoronaParams default_params(Cone cone) {
    CoronaParams p;
    p.cone = std::move(cone);
    return p;
}

}  // namespace

TEST_CASE("corona params validation") {
    CoronaParams p = default_params(Cone(Subspace::axis(2, 1), 0.5));
    CHECK_NOTHROW(p.validate(2));
    p.tau = 2.0;
    CHECK_THROWS_AS(p.validate(2), std::invalid_argument);
    p.tau = 0.05;
    p.t = 5.0;  // must exceed M
    CHECK_THROWS_AS(p.validate(2), std::invalid_argument);
}

TEST_CASE("cell energy") {
    const auto lat = build_lattice(generate_cantor4(2), 4.0, 2.0, 2);
    const Cone diag(Subspace::line_at_angle(kPi / 4.0), 0.5);

    // matches the banded oracle divided by the cube mass
    const int q = lat.levels[1][0];
    const double eta = 0.05;
    const double ell = lat.side_length(q);
    const double mine = cell_energy(lat, q, diag, eta, 1);
    const double naive = oracles::naive_banded_conical(
        lat.mu, diag, 1, eta * ell, ell / eta, lat.center(q), 56.0 * lat.cube(q).r);
    CHECK_THAT(mine, Catch::Matchers::WithinRel(naive / lat.cube(q).mass, 1e-12));

    // rotating measure and cone together leaves it unchanged
    Eigen::Matrix2d rot;
    const double a = 0.9;
    rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    DiscreteMeasure rotated(2);
    for (std::size_t i = 0; i < lat.mu.size(); ++i)
        rotated.add(rot * Eigen::Vector2d(lat.mu.point(i)), lat.mu.weights[i]);
    const auto lat_rot = build_lattice(rotated, 4.0, 2.0, 2);
    const Cone diag_rot(Subspace::line_at_angle(kPi / 4.0 + a), 0.5);
    // same cube in the rotated lattice (construction is index-driven)
    CHECK_THAT(cell_energy(lat_rot, q, diag_rot, eta, 1),
               Catch::Matchers::WithinRel(mine, 1e-10));
}

TEST_CASE("stopping decomposition on a uniform line is trivial") {
    const auto lat = build_lattice(
        generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 100), 8.0, 2.0, 4);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec = stopping_decomposition(lat, lat.root(), params);
    CHECK(dec.stop.empty());
    CHECK(dec.tree.size() == lat.descendants(lat.root()).size());
    CHECK_THAT(dec.good_mass, Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("planted heavy atom stops as HD") {
    DiscreteMeasure mu = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 80);
    Rng rng(8);
    for (int i = 0; i < 40; ++i)
        mu.add(Eigen::Vector2d(0.5 + 2e-3 * rng.normal(), 2e-3 * rng.normal()), 0.05);
    const auto lat = build_lattice(mu, 8.0, 2.0, 5);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec = stopping_decomposition(lat, lat.root(), params);
    bool has_hd = false;
    for (const auto& s : dec.stop)
        if (s.reason == StopReason::HD) has_hd = true;
    CHECK(has_hd);

    // stop cubes are pairwise disjoint and inside the root
    for (std::size_t a = 0; a < dec.stop.size(); ++a) {
        CHECK(lat.is_ancestor_or_self(dec.root, dec.stop[a].cube));
        for (std::size_t b = a + 1; b < dec.stop.size(); ++b) {
            CHECK_FALSE(lat.is_ancestor_or_self(dec.stop[a].cube, dec.stop[b].cube));
            CHECK_FALSE(lat.is_ancestor_or_self(dec.stop[b].cube, dec.stop[a].cube));
        }
    }

    // tree = cubes not strictly below a stop cube
    for (const int q : dec.tree)
        for (const auto& s : dec.stop)
            CHECK((q == s.cube || !lat.is_ancestor_or_self(s.cube, q)));
}

TEST_CASE("parameter degeneration disables LD and BCE") {
    DiscreteMeasure mu = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 60);
    Rng rng(12);
    for (int i = 0; i < 30; ++i)
        mu.add(Eigen::Vector2d(0.25 + 1e-3 * rng.normal(), 1e-3 * rng.normal()), 0.04);
    const auto lat = build_lattice(mu, 8.0, 2.0, 5);
    CoronaParams p = default_params(Cone(Subspace::axis(2, 1), 0.5));
    p.tau = 1e-300;       // effectively tau = 0
    p.eps_stop = 1e-299;  // ordering still valid, threshold effectively infinite
    const auto dec = stopping_decomposition(lat, lat.root(), p);
    for (const auto& s : dec.stop) CHECK(s.reason == StopReason::HD);
}

TEST_CASE("key cone mass") {
    const auto lat = build_lattice(
        generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 100), 8.0, 2.0, 4);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec = stopping_decomposition(lat, lat.root(), params);

    CHECK(key_cone_mass(lat, dec, {}, params) == 0.0);

    // transverse cone: differences along the line never enter the shadow
    std::vector<int> leaves;
    for (const int q : lat.levels.back()) leaves.push_back(q);
    CHECK(key_cone_mass(lat, dec, leaves, params) == 0.0);

    // single cube, measure inside M B_Q
    DiscreteMeasure tight(2);
    tight.add(Eigen::Vector2d(0, 0), 0.5);
    tight.add(Eigen::Vector2d(1e-3, 1e-3), 0.5);
    const auto lat2 = build_lattice(tight, 8.0, 2.0, 2);
    const auto params2 = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec2 = stopping_decomposition(lat2, lat2.root(), params2);
    CHECK(key_cone_mass(lat2, dec2, {lat2.root()}, params2) == 0.0);

    // overlapping family rejected
    CHECK_THROWS_AS(key_cone_mass(lat, dec, {lat.root(), lat.levels[1][0]}, params),
                    std::invalid_argument);
}

TEST_CASE("graph fitting on a lipschitz graph measure") {
    const double slope = 0.3;
    const auto mu = generate_lipschitz_graph(120, Subspace::axis(2, 0), slope, 77);
    const auto lat = build_lattice(mu, 8.0, 2.0, 4);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec = stopping_decomposition(lat, lat.root(), params);
    const auto model = fit_lipschitz_graph(lat, dec, params);

    // no stopping on graph data with these thresholds: every atom anchors
    CHECK(dec.stop.empty());
    CHECK(model.anchor_atoms.size() == mu.size());
    CHECK(model.excluded_atoms.empty());

    // the model interpolates anchors exactly
    for (int a = 0; a < model.anchors(); ++a) {
        const Eigen::VectorXd u = model.anchor_base.col(a);
        CHECK((model.fiber_at(u) - model.anchor_fiber.col(a)).norm() < 1e-12);
        const Eigen::Vector2d atom = lat.mu.point(model.anchor_atoms[a]);
        CHECK(model.distance_estimate(atom) < 1e-12);
    }

    // retained pairs satisfy the slope bound exactly
    for (int a = 0; a < model.anchors(); ++a)
        for (int b = a + 1; b < model.anchors(); ++b) {
            const double df = (model.anchor_fiber.col(a) - model.anchor_fiber.col(b)).norm();
            const double du = (model.anchor_base.col(a) - model.anchor_base.col(b)).norm();
            CHECK(df <= model.slope * du * (1.0 + 1e-12));
        }
}

TEST_CASE("conflicting anchors are excluded greedily") {
    // two atoms stacked almost vertically: the difference lies inside the
    // half cone around the vertical axis, so the later one must be excluded
    DiscreteMeasure mu(2);
    mu.add(Eigen::Vector2d(0.0, 0.0), 0.5);
    mu.add(Eigen::Vector2d(1e-4, 0.7), 0.5);
    const auto lat = build_lattice(mu, 8.0, 2.0, 3);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto dec = stopping_decomposition(lat, lat.root(), params);
    const auto model = fit_lipschitz_graph(lat, dec, params);
    CHECK(model.anchors() == 1);
    REQUIRE(model.excluded_atoms.size() == 1);
    CHECK(model.anchor_atoms[0] == 0);  // lowest index kept
    CHECK(model.excluded_atoms[0] == 1);
}

TEST_CASE("forest on a single atom") {
    DiscreteMeasure mu(2);
    mu.add(Eigen::Vector2d(0.5, 0.5), 1.0);
    const auto lat = build_lattice(mu, 8.0, 2.0, 3);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto forest = build_forest(lat, params);
    CHECK(forest.layers.size() == 1);
    CHECK(forest.trees.size() == 1);
    CHECK(forest.trees[0].stop.empty());
}

TEST_CASE("forest layering on the planted blob") {
    DiscreteMeasure mu = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 80);
    Rng rng(31337);
    for (int i = 0; i < 40; ++i)
        mu.add(Eigen::Vector2d(0.5 + 2e-3 * rng.normal(), 2e-3 * rng.normal()), 0.05);
    const auto lat = build_lattice(mu, 8.0, 2.0, 5);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto forest = build_forest(lat, params);
    REQUIRE(forest.layers.size() >= 2);

    // layer k+1 roots are exactly the union of Next over layer-k roots
    for (std::size_t k = 0; k + 1 < forest.layers.size(); ++k) {
        std::vector<int> expected;
        for (const int root : forest.layers[k]) {
            const auto& dec = forest.tree_of(root);
            expected.insert(expected.end(), dec.next.begin(), dec.next.end());
        }
        std::sort(expected.begin(), expected.end());
        CHECK(forest.layers[k + 1] == expected);
    }

    // roots are doubling
    for (const auto& layer : forest.layers)
        for (const int root : layer) CHECK(lat.cube(root).doubling);

    // packing report fields are consistent
    const auto pack = packing_report(lat, forest, params, 1e-3);
    CHECK(pack.numerator > 0.0);
    CHECK_THAT(pack.denominator, Catch::Matchers::WithinRel(pack.mass + pack.conical, 1e-12));
    CHECK_THAT(pack.ratio, Catch::Matchers::WithinRel(pack.numerator / pack.denominator, 1e-12));
}

TEST_CASE("single-layer packing numerator") {
    const auto lat = build_lattice(
        generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 100), 8.0, 2.0, 4);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto forest = build_forest(lat, params);
    REQUIRE(forest.layers.size() == 1);
    const double theta_root = lat.theta_ball(lat.root(), 2.0, 1);
    CHECK_THAT(forest.packing_numerator,
               Catch::Matchers::WithinRel(theta_root * lat.cube(lat.root()).mass, 1e-12));
}

TEST_CASE("packing denominator blows up when the cone sees the line") {
    const auto lat = build_lattice(
        generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 100), 8.0, 2.0, 4);
    // cone around the x-axis contains every pair difference
    const auto params = default_params(Cone(Subspace::axis(2, 0), 0.5));
    const auto forest = build_forest(lat, params, /*fit_graphs=*/false);
    const auto pack = packing_report(lat, forest, params, 1e-4);
    CHECK(pack.conical > 100.0);
    CHECK(pack.ratio < 0.1);
}

TEST_CASE("verify corona properties") {
    const auto mu = generate_lipschitz_graph(100, Subspace::axis(2, 0), 0.3, 2020);
    const auto lat = build_lattice(mu, 8.0, 2.0, 4);
    const auto params = default_params(Cone(Subspace::axis(2, 1), 0.5));
    const auto forest = build_forest(lat, params);
    const auto verification = verify_corona_properties(lat, forest, params, 1e-9);
    REQUIRE(!verification.empty());
    const auto& root_v = verification[0];

    // graph measure, no stopping: all good mass on the graph at tol ~ 0
    CHECK_THAT(root_v.good_fraction_on_graph, Catch::Matchers::WithinRel(1.0, 1e-12));
    CHECK(root_v.bce_ok);
    CHECK(root_v.ld_mass_ratio <= std::sqrt(params.tau) + 1e-12);
    CHECK(root_v.max_theta_ratio > 0.0);

    // BCE Fubini bound holds on the blob fixture too
    DiscreteMeasure blob = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 80);
    Rng rng(31337);
    for (int i = 0; i < 40; ++i)
        blob.add(Eigen::Vector2d(0.5 + 2e-3 * rng.normal(), 2e-3 * rng.normal()), 0.05);
    const auto lat2 = build_lattice(blob, 8.0, 2.0, 5);
    const auto forest2 = build_forest(lat2, params);
    for (const auto& v : verify_corona_properties(lat2, forest2, params, 1e-9)) {
        CHECK(v.bce_ok);
        if (v.id_root) CHECK(v.id_lhs <= v.id_rhs * (1.0 + 1e-9));
    }
}

TEST_CASE("forest json round structure") {
    const auto lat = build_lattice(generate_cantor4(2), 4.0, 2.0, 2);
    const auto params = default_params(Cone(Subspace::line_at_angle(kPi / 4.0), 0.5));
    const auto forest = build_forest(lat, params);
    const json j = forest;
    CHECK(j.contains("layers"));
    CHECK(j.contains("trees"));
    CHECK(j.at("trees").size() == forest.trees.size());
}

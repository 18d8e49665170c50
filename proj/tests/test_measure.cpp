#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gmtkit/measure.hpp"

using namespace gmtkit;

TEST_CASE("total mass") {
    DiscreteMeasure one(2);
    one.add(Eigen::Vector2d(0.1, 0.2), 1.0);
    CHECK(total_mass(one) == 1.0);

    DiscreteMeasure empty(2);
    CHECK(total_mass(empty) == 0.0);

    DiscreteMeasure four(2);
    for (int i = 0; i < 4; ++i) four.add(Eigen::Vector2d(i, 0.0), 0.25);
    CHECK(total_mass(four) == 1.0);
}

TEST_CASE("theta density") {
    DiscreteMeasure mu(2);
    mu.add(Eigen::Vector2d(0.0, 0.0), 1.0);
    CHECK(theta_density(mu, Ball(Eigen::Vector2d(0.0, 0.0), 0.5), 1) == 1.0);
    CHECK(theta_density(mu, Ball(Eigen::Vector2d(5.0, 0.0), 0.5), 1) == 0.0);

    DiscreteMeasure two(2);
    two.add(Eigen::Vector2d(0.0, 0.0), 0.5);
    two.add(Eigen::Vector2d(0.3, 0.0), 0.5);
    CHECK(theta_density(two, Ball(Eigen::Vector2d(0.0, 0.0), 0.5), 1) == 1.0);
}

TEST_CASE("theta density scaling and translation") {
    auto mu = generate_random_box(30, 2, 7);
    const Ball ball(Eigen::Vector2d(0.4, 0.6), 0.3);
    const double base = theta_density(mu, ball, 1);

    DiscreteMeasure shifted(2);
    const Eigen::Vector2d offset(3.0, -2.0);
    for (std::size_t i = 0; i < mu.size(); ++i)
        shifted.add(Eigen::Vector2d(mu.point(i)) + offset, mu.weights[i]);
    CHECK_THAT(theta_density(shifted, Ball(Eigen::Vector2d(ball.center) + offset, ball.radius), 1),
               Catch::Matchers::WithinRel(base, 1e-12));

    const double lambda = 2.5;
    DiscreteMeasure scaled(2);
    for (std::size_t i = 0; i < mu.size(); ++i) scaled.add(lambda * mu.point(i), mu.weights[i]);
    CHECK_THAT(theta_density(scaled, Ball(lambda * ball.center, lambda * ball.radius), 1),
               Catch::Matchers::WithinRel(base / lambda, 1e-12));
}

TEST_CASE("growth constant") {
    DiscreteMeasure one(2);
    one.add(Eigen::Vector2d(0.0, 0.0), 1.0);
    CHECK(growth_constant(one, 1, 1.0) == 1.0);

    DiscreteMeasure two(1);
    two.add(Eigen::VectorXd::Constant(1, 0.0), 0.5);
    two.add(Eigen::VectorXd::Constant(1, 1.0), 0.5);
    // candidates r in {0.5, 1}: max(0.5/0.5, 1/1) = 1
    CHECK(growth_constant(two, 1, 0.5) == 1.0);

    CHECK_THROWS_AS(growth_constant(two, 1, 0.0), std::invalid_argument);
}

TEST_CASE("cantor iterates") {
    auto c0 = generate_cantor4(0);
    REQUIRE(c0.size() == 1);
    CHECK(c0.point(0).isApprox(Eigen::Vector2d(0.5, 0.5)));
    CHECK(c0.weights[0] == 1.0);

    auto c1 = generate_cantor4(1);
    REQUIRE(c1.size() == 4);
    CHECK(c1.point(0).isApprox(Eigen::Vector2d(0.125, 0.125)));
    CHECK(c1.point(1).isApprox(Eigen::Vector2d(0.875, 0.125)));
    CHECK(c1.point(2).isApprox(Eigen::Vector2d(0.125, 0.875)));
    CHECK(c1.point(3).isApprox(Eigen::Vector2d(0.875, 0.875)));
    for (double w : c1.weights) CHECK(w == 0.25);

    auto c2 = generate_cantor4(2);
    REQUIRE(c2.size() == 16);
    CHECK(total_mass(c2) == 1.0);
    // brute-force min pairwise distance: neighbors inside one level-1 square
    double expect = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c2.size(); ++i)
        for (std::size_t j = i + 1; j < c2.size(); ++j)
            expect = std::min(expect, (c2.point(i) - c2.point(j)).norm());
    CHECK_THAT(min_pairwise_distance(c2), Catch::Matchers::WithinRel(expect, 1e-14));
    CHECK_THAT(expect, Catch::Matchers::WithinRel(3.0 / 16.0, 1e-12));

    CHECK_THROWS_AS(generate_cantor4(-1), std::invalid_argument);
}

TEST_CASE("cantor growth stays in a fixed band") {
    for (int k = 1; k <= 5; ++k) {
        auto mu = generate_cantor4(k);
        const double c0 = growth_constant(mu, 1, std::pow(4.0, -k));
        CHECK(c0 >= 1.0);
        CHECK(c0 <= 4.0);
    }
}

TEST_CASE("lipschitz graph generator") {
    const auto base = Subspace::axis(2, 0);

    auto flat = generate_lipschitz_graph(40, base, 0.0, 11);
    double y0 = flat.point(0)(1);
    for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat.point(i)(1) == y0);

    auto mu = generate_lipschitz_graph(60, base, 0.7, 5);
    CHECK_THAT(total_mass(mu), Catch::Matchers::WithinRel(1.0, 1e-12));
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            const Eigen::Vector2d diff = mu.point(i) - mu.point(j);
            CHECK(std::abs(diff(1)) <= 0.7 * std::abs(diff(0)) + 1e-12);
        }

    auto again = generate_lipschitz_graph(60, base, 0.7, 5);
    CHECK(mu.coords == again.coords);
    CHECK(mu.weights == again.weights);
}

TEST_CASE("lipschitz graph generator in R^3 over a plane") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 0, 0, 1, 0, 0;
    const Subspace base(b);
    auto mu = generate_lipschitz_graph(50, base, 0.4, 9);
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            const Eigen::Vector3d diff = mu.point(i) - mu.point(j);
            const double along = std::hypot(diff(0), diff(1));
            CHECK(std::abs(diff(2)) <= 0.4 * along + 1e-12);
        }
}

TEST_CASE("segment generator") {
    auto two = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 2);
    REQUIRE(two.size() == 2);
    CHECK(two.point(0).isApprox(Eigen::Vector2d(0.25, 0.0)));
    CHECK(two.point(1).isApprox(Eigen::Vector2d(0.75, 0.0)));
    CHECK(two.weights[0] == 0.5);
    CHECK(two.weights[1] == 0.5);

    auto seg = generate_segment(Eigen::Vector2d(1, 1), Eigen::Vector2d(4, 5), 17);
    CHECK_THAT(total_mass(seg), Catch::Matchers::WithinRel(5.0, 1e-12));

    CHECK_THROWS_AS(generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 0),
                    std::invalid_argument);
}

TEST_CASE("random box determinism") {
    auto a = generate_random_box(25, 3, 123);
    auto b = generate_random_box(25, 3, 123);
    CHECK(a.coords == b.coords);
    CHECK_THAT(total_mass(a), Catch::Matchers::WithinRel(1.0, 1e-12));
    for (double c : a.coords) {
        CHECK(c >= 0.0);
        CHECK(c < 1.0);
    }
}

TEST_CASE("csv round trip") {
    auto mu = generate_gaussian_mixture(15, 2, 3, 0.05, 99);
    std::stringstream ss;
    write_measure_csv(mu, ss);
    auto back = read_measure_csv(ss);
    REQUIRE(back.dim == 3);
    REQUIRE(back.size() == mu.size());
    CHECK(back.coords == mu.coords);
    CHECK(back.weights == mu.weights);
}

TEST_CASE("csv rejects malformed input") {
    std::stringstream bad("a,b\n1,2\n");
    CHECK_THROWS(read_measure_csv(bad));
    std::stringstream shortrow("x1,x2,w\n1,2\n");
    CHECK_THROWS(read_measure_csv(shortrow));
}
